#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fedsov/attacks.hpp"
#include "fedsov/boundary.hpp"
#include "fedsov/fl_sim.hpp"
#include "fedsov/protocol.hpp"

namespace py = pybind11;
using namespace fedsov;

namespace {

Bytes to_bytes(const py::bytes& b) {
    std::string s = b;
    return Bytes(s.begin(), s.end());
}

py::bytes from_bytes(const Bytes& b) {
    return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Federated model ownership verification core";

    // --- hashing / watermark --------------------------------------------
    m.def(
        "generate_watermark_hex",
        [](const py::bytes& pk_con, size_t n) {
            return generate_watermark(to_bytes(pk_con), n).bits_hex();
        },
        py::arg("pk_con"), py::arg("n"),
        "First n bits of the domain-tagged SHAKE-256 digest, as packed hex.");

    m.def(
        "hamming_distance_hex",
        [](const std::string& a_hex, const std::string& b_hex, size_t n) {
            return hamming_distance(Watermark(n, from_hex(a_hex)),
                                    Watermark(n, from_hex(b_hex)));
        },
        py::arg("a_hex"), py::arg("b_hex"), py::arg("n"));

    m.def(
        "shake256",
        [](const py::bytes& data, size_t out_len) {
            return from_bytes(shake256(to_bytes(data), out_len));
        },
        py::arg("data"), py::arg("out_len"));

    // --- security boundary ----------------------------------------------
    py::class_<BoundaryResult>(m, "BoundaryResult")
        .def_readonly("n", &BoundaryResult::n)
        .def_readonly("target_pa_log2", &BoundaryResult::target_pa_log2)
        .def_readonly("err_n", &BoundaryResult::err_n)
        .def_readonly("r_n", &BoundaryResult::r_n)
        .def_readonly("bracket_low_log2", &BoundaryResult::bracket_low_log2)
        .def_readonly("bracket_high_log2", &BoundaryResult::bracket_high_log2);

    m.def("solve_boundary", &solve_boundary, py::arg("n"),
          py::arg("target_pa_log2"));
    m.def(
        "cumulative_ball_size_log2",
        [](int64_t n, int64_t radius) {
            return mpz_log2(cumulative_ball_size(n, radius));
        },
        py::arg("n"), py::arg("radius"));
    m.def("convergence_curve", &convergence_curve, py::arg("err_fraction"),
          py::arg("n_values"));
    m.def(
        "attacker_bound_log2",
        [](int64_t n, int64_t err, int64_t k, int64_t q) {
            return attacker_bound(n, err, k, q).bound_log2;
        },
        py::arg("n"), py::arg("err"), py::arg("k"), py::arg("q") = 1);

    // --- embedding --------------------------------------------------------
    m.def(
        "extract_hex",
        [](const Eigen::VectorXd& w, int64_t n, uint64_t seed) {
            EmbeddingMatrix e = gen_embedding_matrix(w.size(), n, seed);
            return extract(w, e).bits_hex();
        },
        py::arg("w"), py::arg("n"), py::arg("seed"),
        "Extract sgn(w E) for the seeded embedding matrix, as packed hex.");

    m.def(
        "embed_hex",
        [](const Eigen::VectorXd& w0, const std::string& target_hex, int64_t n,
           uint64_t seed, double alpha, double mu, double step_size,
           int max_steps) {
            EmbeddingMatrix e = gen_embedding_matrix(w0.size(), n, seed);
            Watermark target(size_t(n), from_hex(target_hex));
            EmbedResult res =
                embed_standalone(w0, e, target, {alpha, mu}, step_size, max_steps);
            return py::make_tuple(res.w, res.rate, res.converged);
        },
        py::arg("w0"), py::arg("target_hex"), py::arg("n"), py::arg("seed"),
        py::arg("alpha") = 0.5, py::arg("mu") = 0.1, py::arg("step_size") = 0.05,
        py::arg("max_steps") = 2000,
        "Hinge-descent embedding; returns (w, detection_rate, converged).");

    // --- signatures -------------------------------------------------------
    py::class_<SignatureScheme>(m, "SignatureScheme")
        .def_static(
            "setup",
            [](const std::string& curve, uint64_t seed) {
                return SignatureScheme::setup(curve_from_name(curve), seed);
            },
            py::arg("curve") = "desk_toy", py::arg("seed") = 1)
        .def_property_readonly(
            "curve", [](const SignatureScheme& s) { return curve_name(s.curve()); })
        .def_property_readonly("pk_length_bytes",
                               &SignatureScheme::pk_length_bytes)
        .def("keygen",
             [](const SignatureScheme& s, uint64_t seed) {
                 std::mt19937_64 rng(seed);
                 KeyPair kp = s.keygen(rng);
                 return py::make_tuple(kp.sk.x.get_str(16), kp.sk.y.get_str(16),
                                       to_hex(s.encode_pk(kp.pk)));
             },
             py::arg("seed"), "Returns (sk_x_hex, sk_y_hex, pk_hex).")
        .def("sign",
             [](const SignatureScheme& s, const std::string& x_hex,
                const std::string& y_hex, const py::bytes& message,
                uint64_t seed) {
                 SecretKey sk{mpz_class(x_hex, 16), mpz_class(y_hex, 16)};
                 std::mt19937_64 rng(seed);
                 Signature sig =
                     s.sign(s.hash_to_scalar(to_bytes(message)), sk, rng);
                 return to_hex(s.encode_sig(sig));
             },
             py::arg("sk_x_hex"), py::arg("sk_y_hex"), py::arg("message"),
             py::arg("seed"))
        .def("verify",
             [](const SignatureScheme& s, const py::bytes& message,
                const std::string& sig_hex, const std::string& pk_hex) {
                 try {
                     return s.verify(s.hash_to_scalar(to_bytes(message)),
                                     s.decode_sig(from_hex(sig_hex)),
                                     s.decode_pk(from_hex(pk_hex)));
                 } catch (const MalformedEncoding&) {
                     return false;
                 }
             },
             py::arg("message"), py::arg("sig_hex"), py::arg("pk_hex"));

    // --- simulation -------------------------------------------------------
    py::class_<RoundMetrics>(m, "RoundMetrics")
        .def_readonly("round", &RoundMetrics::round)
        .def_readonly("main_accuracy", &RoundMetrics::main_accuracy)
        .def_readonly("detection", &RoundMetrics::detection)
        .def_readonly("hinge", &RoundMetrics::hinge);

    m.def(
        "run_federation",
        [](int clients, int rounds, int n_bits, int omega, double alpha,
           uint64_t seed) {
            FLConfig cfg;
            cfg.clients = clients;
            cfg.global_epochs = rounds;
            cfg.n_bits = n_bits;
            cfg.omega = omega;
            cfg.alpha = alpha;
            cfg.seed = seed;
            FederationResult res = run_federation(cfg);
            py::dict out;
            out["rounds"] = res.rounds;
            out["final_accuracy"] = res.rounds.back().main_accuracy;
            out["final_detection"] = res.rounds.back().detection;
            out["watermark_hex"] = res.fed.wm.bits_hex();
            out["gamma"] = res.fed.global.gamma;
            out["embed_seed"] = res.fed.embed.seed;
            return out;
        },
        py::arg("clients") = 10, py::arg("rounds") = 30, py::arg("n_bits") = 256,
        py::arg("omega") = 512, py::arg("alpha") = 0.5, py::arg("seed") = 1,
        "Run the federated simulation; returns summary metrics and the "
        "trained host slice.");
}
