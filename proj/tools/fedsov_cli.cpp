#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "json.hpp"

#include "fedsov/attacks.hpp"
#include "fedsov/boundary.hpp"
#include "fedsov/io.hpp"
#include "fedsov/protocol.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fedsov;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitReject = 2;

void fail(const std::string& message) {
    std::cerr << json{{"error", message}}.dump() << "\n";
    std::exit(kExitError);
}

FLConfig config_from_flags(int clients, int wm_bits, int omega, int rounds,
                           int local_epochs, int batch, double lr, double alpha,
                           double mu, uint64_t seed, const std::string& curve) {
    FLConfig cfg;
    cfg.clients = clients;
    cfg.n_bits = wm_bits;
    cfg.omega = omega;
    cfg.global_epochs = rounds;
    cfg.local_epochs = local_epochs;
    cfg.batch_size = batch;
    cfg.lr = lr;
    cfg.alpha = alpha;
    cfg.mu = mu;
    cfg.seed = seed;
    cfg.curve = curve_from_name(curve);
    return cfg;
}

json report_to_json(const RemovalReport& r) {
    json trace = json::array();
    for (const auto& p : r.trace)
        trace.push_back({{"epoch", p.epoch},
                         {"accuracy", p.accuracy},
                         {"detection", p.detection}});
    return json{{"attack_kind", r.kind},
                {"before", {{"acc", r.before.accuracy}, {"rate", r.before.detection}}},
                {"after", {{"acc", r.after.accuracy}, {"rate", r.after.detection}}},
                {"trace", trace}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FedSOV: federated model ownership verification toolkit"};
    app.require_subcommand(1);

    uint64_t seed = 1;
    std::string out_dir = ".";
    std::string format = "json";
    app.add_option("--seed", seed, "global rng seed")->capture_default_str();
    app.add_option("--out-dir", out_dir, "output directory")->capture_default_str();
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));

    // setup
    auto* setup_cmd = app.add_subcommand("setup", "write system public parameters");
    std::string curve = "desk_toy";
    int n_bits = 256, omega = 512;
    double pa_log2 = -128.0;
    setup_cmd->add_option("--curve", curve)->check(CLI::IsMember({"desk_toy", "production_curve"}));
    setup_cmd->add_option("--n", n_bits, "watermark bit length");
    setup_cmd->add_option("--omega", omega, "host parameter count");
    setup_cmd->add_option("--pa-log2", pa_log2, "log2 of target attacker probability");

    // keygen
    auto* keygen_cmd = app.add_subcommand("keygen", "generate client keypairs");
    int key_count = 1;
    std::string keygen_curve = "desk_toy";
    keygen_cmd->add_option("--count", key_count, "number of keypairs");
    keygen_cmd->add_option("--curve", keygen_curve)
        ->check(CLI::IsMember({"desk_toy", "production_curve"}));

    // wmgen
    auto* wmgen_cmd = app.add_subcommand(
        "wmgen", "hash watermark from stored client public keys");
    std::string wmgen_keys_dir;
    int wmgen_n = 256;
    wmgen_cmd->add_option("--keys-dir", wmgen_keys_dir, "directory of key files")
        ->required();
    wmgen_cmd->add_option("--n", wmgen_n, "watermark bit length");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "run the federated simulation");
    int sim_clients = 10, sim_bits = 256, sim_omega = 512, sim_rounds = 30;
    int sim_local = 2, sim_batch = 16;
    double sim_lr = 0.02, sim_alpha = 0.5, sim_mu = 0.1;
    std::string sim_curve = "desk_toy";
    int fedipr_bits = 0;
    sim_cmd->add_option("--clients", sim_clients);
    sim_cmd->add_option("--wm-bits", sim_bits);
    sim_cmd->add_option("--omega", sim_omega);
    sim_cmd->add_option("--rounds", sim_rounds);
    sim_cmd->add_option("--local-epochs", sim_local);
    sim_cmd->add_option("--batch", sim_batch);
    sim_cmd->add_option("--lr", sim_lr);
    sim_cmd->add_option("--alpha", sim_alpha);
    sim_cmd->add_option("--mu", sim_mu);
    sim_cmd->add_option("--curve", sim_curve)
        ->check(CLI::IsMember({"desk_toy", "production_curve"}));
    sim_cmd->add_option("--fedipr-bits", fedipr_bits,
                        "per-client watermark bits; enables the FedIPR baseline");

    // embed
    auto* embed_cmd = app.add_subcommand(
        "embed", "standalone hinge-descent embedding into host parameters");
    int em_omega = 512, em_n = 64, em_steps = 1000;
    double em_step_size = 0.05, em_alpha = 0.5, em_mu = 0.1;
    embed_cmd->add_option("--omega", em_omega);
    embed_cmd->add_option("--n", em_n);
    embed_cmd->add_option("--step-size", em_step_size);
    embed_cmd->add_option("--max-steps", em_steps);
    embed_cmd->add_option("--alpha", em_alpha);
    embed_cmd->add_option("--mu", em_mu);

    // extract
    auto* extract_cmd = app.add_subcommand(
        "extract", "extract the watermark from a stored run");
    std::string extract_run;
    extract_cmd->add_option("--run-dir", extract_run)->required();

    // boundary
    auto* boundary_cmd = app.add_subcommand(
        "boundary", "exact security-boundary computation");
    std::vector<int64_t> bd_n{2048};
    double bd_pa = -128.0;
    boundary_cmd->add_option("--n", bd_n, "watermark lengths");
    boundary_cmd->add_option("--pa-log2", bd_pa);

    // attack
    auto* attack_cmd = app.add_subcommand("attack", "run an attack harness");
    std::string at_kind, at_run;
    int at_epochs = 50;
    double at_rate = 0.6, at_phi = 0.5;
    size_t fg_n = 16, fg_err = 1, fg_k = 100, fg_reps = 10000;
    attack_cmd->add_option("--kind", at_kind)
        ->required()
        ->check(CLI::IsMember({"finetune", "prune", "gaussian", "ambiguity", "forgegame"}));
    attack_cmd->add_option("--run-dir", at_run);
    attack_cmd->add_option("--epochs", at_epochs);
    attack_cmd->add_option("--prune-rate", at_rate);
    attack_cmd->add_option("--phi", at_phi);
    attack_cmd->add_option("--game-n", fg_n);
    attack_cmd->add_option("--game-err", fg_err);
    attack_cmd->add_option("--game-k", fg_k);
    attack_cmd->add_option("--game-reps", fg_reps);

    // verify
    auto* verify_cmd = app.add_subcommand(
        "verify", "three-role ownership verification session");
    std::string vf_run, vf_model_dir;
    int vf_client = 0;
    bool vf_adversary = false;
    verify_cmd->add_option("--run-dir", vf_run)->required();
    verify_cmd->add_option("--client", vf_client, "client index inside pk_con");
    verify_cmd->add_option("--model-dir", vf_model_dir,
                           "suspect model directory (defaults to run dir)");
    verify_cmd->add_flag("--adversary", vf_adversary,
                         "sign with a fresh unrelated key instead of the client sk");

    // report
    auto* report_cmd = app.add_subcommand(
        "report", "summarize a run directory and re-verify stored transcripts");
    std::string rp_run;
    report_cmd->add_option("--run-dir", rp_run)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        fs::path out(out_dir);

        if (*setup_cmd) {
            fs::create_directories(out);
            FLConfig cfg;
            cfg.curve = curve_from_name(curve);
            cfg.n_bits = n_bits;
            cfg.omega = omega;
            cfg.seed = seed;
            SystemPublicParams pp =
                SystemPublicParams::from_config(cfg, seed ^ 0xe4bed, pa_log2);
            io::save_public_params(out / "public_params.json", pp);
            std::cout << json{{"written", (out / "public_params.json").string()},
                              {"err_n", pp.err_n}}
                             .dump()
                      << "\n";
            return kExitOk;
        }

        if (*keygen_cmd) {
            fs::create_directories(out / "keys");
            auto scheme = SignatureScheme::setup(curve_from_name(keygen_curve), seed);
            std::mt19937_64 rng(seed ^ 0x6b657967u);
            for (int i = 0; i < key_count; ++i) {
                KeyPair kp = scheme.keygen(rng);
                io::save_keypair(out / "keys" / ("client_" + std::to_string(i) + ".json"),
                                 scheme, kp);
            }
            std::cout << json{{"keys_written", key_count}}.dump() << "\n";
            return kExitOk;
        }

        if (*wmgen_cmd) {
            fs::create_directories(out);
            std::vector<Bytes> pks;
            std::string curve_id;
            for (int i = 0;; ++i) {
                fs::path key_file =
                    fs::path(wmgen_keys_dir) / ("client_" + std::to_string(i) + ".json");
                if (!fs::exists(key_file)) break;
                std::ifstream in(key_file);
                json j;
                in >> j;
                curve_id = j.at("curve_id").get<std::string>();
                pks.push_back(from_hex(j.at("pk").get<std::string>()));
            }
            if (pks.empty()) fail("no client_<i>.json key files found");
            auto scheme = SignatureScheme::setup(curve_from_name(curve_id), seed);
            ConcatenatedKey pk_con = ConcatenatedKey::from_pks(std::move(pks));
            Watermark wm = generate_watermark(pk_con.bytes, static_cast<size_t>(wmgen_n));
            io::save_pk_con(out, pk_con, scheme.pk_length_bytes());
            io::save_watermark(out / "watermark.json", wm);
            std::cout << json{{"clients", pk_con.client_pks.size()},
                              {"n", wmgen_n},
                              {"bits_hex", wm.bits_hex()}}
                             .dump()
                      << "\n";
            return kExitOk;
        }

        if (*sim_cmd) {
            fs::create_directories(out);
            FLConfig cfg = config_from_flags(sim_clients, sim_bits, sim_omega,
                                             sim_rounds, sim_local, sim_batch, sim_lr,
                                             sim_alpha, sim_mu, seed, sim_curve);
            if (fedipr_bits > 0) {
                FedIprResult res = baseline_fedipr_mode(cfg, fedipr_bits);
                io::save_metrics_csv(out / "metrics.csv", res.rounds);
                json rates = json::array();
                for (double r : res.per_client_rates) rates.push_back(r);
                std::ofstream(out / "fedipr_rates.json") << rates.dump(2) << "\n";
                std::cout << json{{"mode", "fedipr"},
                                  {"final_acc", res.rounds.back().main_accuracy},
                                  {"mean_rate", res.rounds.back().detection}}
                                 .dump()
                          << "\n";
                return kExitOk;
            }
            FederationResult res = run_federation(cfg);
            io::save_run(out, res);
            std::cout << json{{"mode", "fedsov"},
                              {"rounds", res.rounds.size()},
                              {"final_acc", res.rounds.back().main_accuracy},
                              {"final_detection", res.rounds.back().detection}}
                             .dump()
                      << "\n";
            return kExitOk;
        }

        if (*embed_cmd) {
            fs::create_directories(out);
            EmbeddingMatrix e = gen_embedding_matrix(em_omega, em_n, seed ^ 0xe4bed);
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> small(0.0, 0.1);
            Eigen::VectorXd w0(em_omega);
            for (int i = 0; i < em_omega; ++i) w0(i) = small(rng);
            std::mt19937_64 wm_rng(seed ^ 0x77u);
            Watermark target = random_watermark(static_cast<size_t>(em_n), wm_rng);
            EmbedResult res = embed_standalone(w0, e, target, {em_alpha, em_mu},
                                               em_step_size, em_steps);
            std::ofstream bin(out / "hostparams.bin", std::ios::binary);
            bin.write(reinterpret_cast<const char*>(res.w.data()),
                      static_cast<std::streamsize>(res.w.size() * sizeof(double)));
            std::ofstream(out / "hostparams.json")
                << json{{"omega", em_omega}}.dump(2) << "\n";
            io::save_watermark(out / "watermark.json", target);
            io::save_embedding(out / "embedding.json", e);
            std::cout << json{{"rate", res.rate},
                              {"final_loss", res.final_loss},
                              {"steps", res.steps_taken},
                              {"converged", res.converged}}
                             .dump()
                      << "\n";
            return kExitOk;
        }

        if (*extract_cmd) {
            io::LoadedRun run = io::load_run(extract_run);
            Watermark extracted = extract(run.model.gamma, run.embed);
            std::cout << json{{"bits_hex", extracted.bits_hex()},
                              {"n", extracted.size()},
                              {"detection_rate", detection_rate(run.wm, extracted)}}
                             .dump()
                      << "\n";
            return kExitOk;
        }

        if (*boundary_cmd) {
            std::cout << "n,target_pa_log2,err_n,r_n,bracket_low_log2,bracket_high_log2\n";
            for (int64_t n : bd_n) {
                BoundaryResult r = solve_boundary(n, bd_pa);
                std::printf("%lld,%.6g,%lld,%.6f,%.6f,%.6f\n",
                            static_cast<long long>(r.n), r.target_pa_log2,
                            static_cast<long long>(r.err_n), r.r_n,
                            r.bracket_low_log2, r.bracket_high_log2);
            }
            return kExitOk;
        }

        if (*attack_cmd) {
            if (at_kind == "forgegame") {
                std::mt19937_64 rng(seed);
                double empirical =
                    near_collision_forging_game(fg_n, fg_err, fg_k, fg_reps, rng);
                AdvantageBound bound = attacker_bound(
                    static_cast<int64_t>(fg_n), static_cast<int64_t>(fg_err),
                    static_cast<int64_t>(fg_k), 1);
                std::cout << json{{"attack_kind", "forgegame"},
                                  {"empirical_rate", empirical},
                                  {"bound", std::exp2(bound.bound_log2)}}
                                 .dump()
                          << "\n";
                return kExitOk;
            }
            if (at_run.empty()) fail("--run-dir is required for this attack kind");
            io::LoadedRun run = io::load_run(at_run);
            Dataset test = synth_dataset(run.cfg.task, run.cfg.task.test_samples,
                                         run.cfg.seed, run.cfg.seed ^ 0x7e57u);
            if (at_kind == "ambiguity") {
                AmbiguityReport rep =
                    ambiguity_attack_demo(run.model, test, run.cfg.n_bits, seed);
                std::cout << json{{"attack_kind", "ambiguity"},
                                  {"forged_detection_rate", rep.forged_detection_rate},
                                  {"params_unchanged", rep.params_unchanged},
                                  {"accuracy_delta", rep.accuracy_delta},
                                  {"fedsov_rejects", rep.fedsov_rejects}}
                                 .dump()
                          << "\n";
                return kExitOk;
            }
            RemovalReport rep;
            if (at_kind == "finetune") {
                Dataset attacker_data =
                    synth_dataset(run.cfg.task, run.cfg.task.samples_per_client,
                                  run.cfg.seed, seed ^ 0xa77acc);
                rep = finetune_attack(run.model, attacker_data, test, run.wm,
                                      run.embed, at_epochs, run.cfg.batch_size,
                                      run.cfg.lr, seed);
            } else if (at_kind == "prune") {
                rep = prune_attack(run.model, test, run.wm, run.embed, at_rate);
            } else {
                rep = gaussian_target_attack(run.model, test, run.wm, run.embed,
                                             at_phi, seed);
            }
            std::cout << report_to_json(rep).dump() << "\n";
            return kExitOk;
        }

        if (*verify_cmd) {
            io::LoadedRun run = io::load_run(vf_run);
            ToyModel suspect =
                vf_model_dir.empty() ? run.model : io::load_model(vf_model_dir);
            auto scheme = SignatureScheme::setup(run.pp.curve, run.pp.group_seed);
            Signer signer;
            std::mt19937_64 rng(seed ^ 0x5e5510u);
            if (vf_adversary) {
                std::mt19937_64 adv_rng(seed ^ 0xbadu);
                KeyPair adv = scheme.keygen(adv_rng);
                signer = honest_signer(scheme, adv.sk, seed ^ 0xbad2u);
            } else {
                KeyPair kp = io::load_keypair(
                    fs::path(vf_run) / "keys" /
                        ("client_" + std::to_string(vf_client) + ".json"),
                    scheme);
                signer = honest_signer(scheme, kp.sk, seed ^ 0x51u);
            }
            VerificationTranscript t = verify_ownership(
                suspect, run.pk_con, vf_client, signer, run.pp, rng);
            fs::create_directories(fs::path(vf_run) / "sessions");
            std::ofstream(fs::path(vf_run) / "sessions" / (t.session_id + ".jsonl"),
                          std::ios::app)
                << t.to_json() << "\n";
            std::cout << t.to_json() << "\n";
            return t.verdict == Verdict::owner_verified ? kExitOk : kExitReject;
        }

        if (*report_cmd) {
            io::LoadedRun run = io::load_run(rp_run);
            json sessions = json::array();
            fs::path sess_dir = fs::path(rp_run) / "sessions";
            if (fs::exists(sess_dir)) {
                for (const auto& entry : fs::directory_iterator(sess_dir)) {
                    std::ifstream in(entry.path());
                    std::string line;
                    while (std::getline(in, line)) {
                        if (line.empty()) continue;
                        VerificationTranscript t =
                            VerificationTranscript::from_json(line);
                        bool ok = reverify_transcript(t, run.model, run.pk_con, run.pp);
                        sessions.push_back({{"session_id", t.session_id},
                                            {"verdict", verdict_name(t.verdict)},
                                            {"reverified", ok}});
                    }
                }
            }
            Watermark extracted = extract(run.model.gamma, run.embed);
            std::cout << json{{"n", run.wm.size()},
                              {"detection_rate", detection_rate(run.wm, extracted)},
                              {"err_n", run.pp.err_n},
                              {"sessions", sessions}}
                             .dump(2)
                      << "\n";
            return kExitOk;
        }
    } catch (const std::exception& e) {
        fail(e.what());
    }
    return kExitError;
}
