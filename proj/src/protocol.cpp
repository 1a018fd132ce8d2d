#include "fedsov/protocol.hpp"

#include <chrono>
#include <ctime>

#include "json.hpp"

namespace fedsov {

using nlohmann::json;

SystemPublicParams SystemPublicParams::from_config(const FLConfig& cfg,
                                                   uint64_t embed_seed,
                                                   double target_pa_log2) {
    SystemPublicParams pp;
    pp.curve = cfg.curve;
    pp.group_seed = cfg.seed;
    pp.embed_seed = embed_seed;
    pp.omega = cfg.omega;
    pp.n = cfg.n_bits;
    pp.target_pa_log2 = target_pa_log2;
    pp.err_n = solve_boundary(cfg.n_bits, target_pa_log2).err_n;
    return pp;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::owner_verified: return "owner_verified";
        case Verdict::watermark_check_failed: return "watermark_check_failed";
        case Verdict::signature_failed: return "signature_failed";
    }
    return "unknown";
}

Verdict verdict_from_name(const std::string& name) {
    if (name == "owner_verified") return Verdict::owner_verified;
    if (name == "watermark_check_failed") return Verdict::watermark_check_failed;
    if (name == "signature_failed") return Verdict::signature_failed;
    throw std::invalid_argument("unknown verdict: " + name);
}

std::string model_param_sha256(const ToyModel& model) {
    Eigen::VectorXd flat = model.flatten();
    return to_hex(sha256({reinterpret_cast<const uint8_t*>(flat.data()),
                          static_cast<size_t>(flat.size()) * sizeof(double)}));
}

WatermarkCheckResult watermark_check(const ToyModel& model,
                                     std::span<const uint8_t> pk_con,
                                     const SystemPublicParams& pp) {
    if (model.gamma.size() != pp.omega)
        throw std::invalid_argument("host slice length does not match omega");
    EmbeddingMatrix embed = gen_embedding_matrix(pp.omega, pp.n, pp.embed_seed);
    Watermark extracted = extract(model.gamma, embed);
    Watermark expected = generate_watermark(pk_con, static_cast<size_t>(pp.n));
    size_t distance = hamming_distance(expected, extracted);
    // Strict inequality: exactly err_n corrupted bits fails.
    return WatermarkCheckResult{distance, pp.err_n,
                                distance < static_cast<size_t>(pp.err_n)};
}

Bytes make_challenge(std::mt19937_64& rng) {
    Bytes out(32);
    for (auto& b : out) b = static_cast<uint8_t>(rng());
    return out;
}

Signature respond(const SignatureScheme& scheme, const SecretKey& sk,
                  std::span<const uint8_t> challenge, std::mt19937_64& rng) {
    return scheme.sign(scheme.hash_to_scalar(challenge), sk, rng);
}

Signer honest_signer(const SignatureScheme& scheme, SecretKey sk, uint64_t seed) {
    auto rng = std::make_shared<std::mt19937_64>(seed);
    return [scheme, sk = std::move(sk), rng](std::span<const uint8_t> challenge) {
        return respond(scheme, sk, challenge, *rng);
    };
}

namespace {

std::string utc_now_rfc3339() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string session_id_from(std::mt19937_64& rng) {
    Bytes raw(8);
    for (auto& b : raw) b = static_cast<uint8_t>(rng());
    return to_hex(raw);
}

}  // namespace

VerificationTranscript verify_ownership(const ToyModel& model,
                                        std::span<const uint8_t> pk_con,
                                        int client_index, const Signer& signer,
                                        const SystemPublicParams& pp,
                                        std::mt19937_64& rng) {
    SignatureScheme scheme = SignatureScheme::setup(pp.curve, pp.group_seed);
    size_t pk_len = scheme.pk_length_bytes();
    if (pk_con.size() % pk_len != 0)
        throw MalformedEncoding("pk_con length is not a multiple of the pk size");
    size_t count = pk_con.size() / pk_len;
    if (client_index < 0 || static_cast<size_t>(client_index) >= count)
        throw std::out_of_range("client index outside pk_con");

    VerificationTranscript t;
    t.session_id = session_id_from(rng);
    t.model_sha256 = model_param_sha256(model);
    t.n = pp.n;
    t.err_n = pp.err_n;
    t.pk_index = client_index;
    t.ts = utc_now_rfc3339();

    WatermarkCheckResult wm = watermark_check(model, pk_con, pp);
    t.distance = wm.distance;
    t.wm_pass = wm.passed;
    if (!wm.passed) {
        t.challenge_hex.clear();
        t.sig_s_hex.clear();
        t.sig_r_hex.clear();
        t.sig_pass = false;
        t.verdict = Verdict::watermark_check_failed;
        return t;
    }

    // The verifier binds the signature check to the pk embedded in the
    // watermark by parsing it out of pk_con at the claimed offset.
    PublicKey pk = scheme.decode_pk(
        pk_con.subspan(static_cast<size_t>(client_index) * pk_len, pk_len));
    Bytes challenge = make_challenge(rng);
    t.challenge_hex = to_hex(challenge);
    Signature sig = signer(challenge);
    Bytes sig_bytes = scheme.encode_sig(sig);
    size_t s_len = sig_bytes.size() / 2;
    if (pp.curve == CurveId::production_curve) s_len = 96;
    t.sig_s_hex = to_hex({sig_bytes.data(), s_len});
    t.sig_r_hex = to_hex({sig_bytes.data() + s_len, sig_bytes.size() - s_len});
    t.sig_pass = scheme.verify(scheme.hash_to_scalar(challenge), sig, pk);
    t.verdict = t.sig_pass ? Verdict::owner_verified : Verdict::signature_failed;
    return t;
}

bool reverify_transcript(const VerificationTranscript& t, const ToyModel& model,
                         std::span<const uint8_t> pk_con,
                         const SystemPublicParams& pp) {
    if (model_param_sha256(model) != t.model_sha256) return false;
    WatermarkCheckResult wm = watermark_check(model, pk_con, pp);
    if (wm.distance != t.distance || wm.passed != t.wm_pass) return false;
    if (!t.wm_pass)
        return t.verdict == Verdict::watermark_check_failed && !t.sig_pass;

    SignatureScheme scheme = SignatureScheme::setup(pp.curve, pp.group_seed);
    size_t pk_len = scheme.pk_length_bytes();
    if (static_cast<size_t>(t.pk_index + 1) * pk_len > pk_con.size()) return false;
    PublicKey pk = scheme.decode_pk(
        pk_con.subspan(static_cast<size_t>(t.pk_index) * pk_len, pk_len));
    Bytes challenge = from_hex(t.challenge_hex);
    Bytes sig_bytes = from_hex(t.sig_s_hex + t.sig_r_hex);
    bool sig_ok;
    try {
        Signature sig = scheme.decode_sig(sig_bytes);
        sig_ok = scheme.verify(scheme.hash_to_scalar(challenge), sig, pk);
    } catch (const MalformedEncoding&) {
        sig_ok = false;
    }
    if (sig_ok != t.sig_pass) return false;
    Verdict expected =
        sig_ok ? Verdict::owner_verified : Verdict::signature_failed;
    return t.verdict == expected;
}

std::string VerificationTranscript::to_json() const {
    json j{{"session_id", session_id},
           {"model_sha256", model_sha256},
           {"n", n},
           {"err_n", err_n},
           {"distance", distance},
           {"wm_pass", wm_pass},
           {"challenge_hex", challenge_hex},
           {"sig", {{"s_hex", sig_s_hex}, {"r_hex", sig_r_hex}}},
           {"pk_index", pk_index},
           {"sig_pass", sig_pass},
           {"verdict", verdict_name(verdict)},
           {"ts", ts}};
    return j.dump();
}

VerificationTranscript VerificationTranscript::from_json(const std::string& text) {
    json j = json::parse(text);
    VerificationTranscript t;
    t.session_id = j.at("session_id").get<std::string>();
    t.model_sha256 = j.at("model_sha256").get<std::string>();
    t.n = j.at("n").get<int64_t>();
    t.err_n = j.at("err_n").get<int64_t>();
    t.distance = j.at("distance").get<size_t>();
    t.wm_pass = j.at("wm_pass").get<bool>();
    t.challenge_hex = j.at("challenge_hex").get<std::string>();
    t.sig_s_hex = j.at("sig").at("s_hex").get<std::string>();
    t.sig_r_hex = j.at("sig").at("r_hex").get<std::string>();
    t.pk_index = j.at("pk_index").get<int>();
    t.sig_pass = j.at("sig_pass").get<bool>();
    t.verdict = verdict_from_name(j.at("verdict").get<std::string>());
    t.ts = j.at("ts").get<std::string>();
    return t;
}

}  // namespace fedsov
