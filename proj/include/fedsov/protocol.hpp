#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>

#include "fedsov/boundary.hpp"
#include "fedsov/fl_sim.hpp"
#include "fedsov/sig.hpp"

namespace fedsov {

// Public verification standard: everything a verifier needs to re-derive the
// embedding matrix, the expected watermark, and the error tolerance.
struct SystemPublicParams {
    CurveId curve = CurveId::desk_toy;
    uint64_t group_seed = 1;
    uint64_t embed_seed = 0;
    int64_t omega = 0;
    int64_t n = 0;
    double target_pa_log2 = -128.0;
    int64_t err_n = 0;  // solve_boundary(n, target_pa_log2).err_n

    static SystemPublicParams from_config(const FLConfig& cfg,
                                          uint64_t embed_seed,
                                          double target_pa_log2 = -128.0);
};

enum class Verdict { owner_verified, watermark_check_failed, signature_failed };

const char* verdict_name(Verdict v);
Verdict verdict_from_name(const std::string& name);

struct WatermarkCheckResult {
    size_t distance;
    int64_t err_n;
    bool passed;  // distance < err_n, strict
};

struct VerificationTranscript {
    std::string session_id;
    std::string model_sha256;
    int64_t n;
    int64_t err_n;
    size_t distance;
    bool wm_pass;
    std::string challenge_hex;
    std::string sig_s_hex;
    std::string sig_r_hex;
    int pk_index;
    bool sig_pass;
    Verdict verdict;
    std::string ts;  // RFC 3339 UTC

    std::string to_json() const;
    static VerificationTranscript from_json(const std::string& text);
};

// Extracts h' = sgn(gamma E) and compares against H(pk_con).
WatermarkCheckResult watermark_check(const ToyModel& model,
                                     std::span<const uint8_t> pk_con,
                                     const SystemPublicParams& pp);

// 32 random bytes per session.
Bytes make_challenge(std::mt19937_64& rng);

// sigma = sign(hash_to_scalar(challenge), sk).
Signature respond(const SignatureScheme& scheme, const SecretKey& sk,
                  std::span<const uint8_t> challenge, std::mt19937_64& rng);

// A signer is whoever answers the challenge; honest clients close over their
// secret key, adversaries over whatever they managed to steal.
using Signer = std::function<Signature(std::span<const uint8_t> challenge)>;

Signer honest_signer(const SignatureScheme& scheme, SecretKey sk, uint64_t seed);

// Full three-role session: watermark check, then challenge/response against
// the pk parsed out of pk_con at client_index.
VerificationTranscript verify_ownership(const ToyModel& model,
                                        std::span<const uint8_t> pk_con,
                                        int client_index, const Signer& signer,
                                        const SystemPublicParams& pp,
                                        std::mt19937_64& rng);

// Offline re-check of a stored transcript against the same model and pk_con.
// True iff every recomputable field and the verdict agree.
bool reverify_transcript(const VerificationTranscript& t, const ToyModel& model,
                         std::span<const uint8_t> pk_con,
                         const SystemPublicParams& pp);

std::string model_param_sha256(const ToyModel& model);

}  // namespace fedsov
