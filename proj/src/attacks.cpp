#include "fedsov/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fedsov/bytes.hpp"
#include "fedsov/sig.hpp"

namespace fedsov {

ForgedEmbedding forge_embedding(const Eigen::VectorXd& w_t,
                                const Eigen::VectorXd& target_signs,
                                double margin) {
    double norm_sq = w_t.squaredNorm();
    if (norm_sq == 0.0)
        throw std::invalid_argument("cannot forge against all-zero host parameters");
    if (margin <= 0.0) throw std::invalid_argument("margin must be positive");
    ForgedEmbedding out;
    out.margin = margin;
    out.target_signs = target_signs;
    out.e_prime.resize(w_t.size(), target_signs.size());
    for (int64_t j = 0; j < target_signs.size(); ++j) {
        double b = target_signs(j);
        if (b != 1.0 && b != -1.0)
            throw std::invalid_argument("target signs must be +1 or -1");
        out.e_prime.col(j) = (margin * b / norm_sq) * w_t;
    }
    return out;
}

namespace {

Bytes param_hash(const ToyModel& model) {
    Eigen::VectorXd flat = model.flatten();
    return sha256({reinterpret_cast<const uint8_t*>(flat.data()),
                   static_cast<size_t>(flat.size()) * sizeof(double)});
}

BeforeAfter measure(const ToyModel& model, const Dataset& test,
                    const Watermark& wm, const EmbeddingMatrix& embed) {
    return {model.accuracy(test),
            detection_rate(extract(model.gamma, embed), wm)};
}

}  // namespace

AmbiguityReport ambiguity_attack_demo(const ToyModel& model, const Dataset& test,
                                      int forged_bits, uint64_t seed) {
    std::mt19937_64 rng(seed);
    Watermark forged_wm = random_watermark(static_cast<size_t>(forged_bits), rng);
    Eigen::VectorXd signs = sign_targets(forged_wm);

    Bytes hash_before = param_hash(model);
    double acc_before = model.accuracy(test);

    ForgedEmbedding forged = forge_embedding(model.gamma, signs);
    EmbeddingMatrix as_embed;
    as_embed.entries = forged.e_prime;
    as_embed.omega = forged.e_prime.rows();
    as_embed.n = forged.e_prime.cols();
    Watermark extracted = extract(model.gamma, as_embed);

    AmbiguityReport report;
    report.forged_detection_rate = detection_rate(extracted, forged_wm);
    report.forged_rate_is_one = report.forged_detection_rate == 1.0;
    report.params_unchanged = param_hash(model) == hash_before;
    report.accuracy_delta = model.accuracy(test) - acc_before;

    // Same transcript against FedSOV: the forger holds no secret key matching
    // any pk in the watermark, so the challenge-response signature fails.
    auto scheme = SignatureScheme::setup(CurveId::desk_toy, seed);
    auto honest = scheme.keygen(rng);
    auto attacker = scheme.keygen(rng);
    Bytes challenge(32);
    for (auto& b : challenge) b = static_cast<uint8_t>(rng());
    mpz_class m = scheme.hash_to_scalar(challenge);
    Signature forged_sig = scheme.sign(m, attacker.sk, rng);
    report.fedsov_rejects = !scheme.verify(m, forged_sig, honest.pk);
    return report;
}

double near_collision_forging_game(size_t n, size_t err, size_t k,
                                   size_t repetitions, std::mt19937_64& rng) {
    if (n > 24) throw std::invalid_argument("forging game is limited to n <= 24");
    size_t radius = std::min(2 * err, n);
    size_t wins = 0;
    for (size_t rep = 0; rep < repetitions; ++rep) {
        Watermark target = random_watermark(n, rng);
        for (size_t attempt = 0; attempt < k; ++attempt) {
            Watermark candidate = random_watermark(n, rng);
            if (hamming_distance(candidate, target) <= radius) {
                ++wins;
                break;
            }
        }
    }
    return static_cast<double>(wins) / static_cast<double>(repetitions);
}

RemovalReport finetune_attack(const ToyModel& model, const Dataset& data,
                              const Dataset& test, const Watermark& wm,
                              const EmbeddingMatrix& embed, int epochs,
                              int batch_size, double lr, uint64_t seed) {
    RemovalReport report;
    report.kind = "finetune";
    report.before = measure(model, test, wm, embed);
    ToyModel attacked = model;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        sgd_task_only(attacked, data, 1, batch_size, lr,
                      seed + static_cast<uint64_t>(epoch));
        report.trace.push_back(
            {epoch + 1, attacked.accuracy(test),
             detection_rate(extract(attacked.gamma, embed), wm)});
    }
    report.after = measure(attacked, test, wm, embed);
    return report;
}

RemovalReport prune_attack(const ToyModel& model, const Dataset& test,
                           const Watermark& wm, const EmbeddingMatrix& embed,
                           double prune_rate) {
    if (prune_rate < 0.0 || prune_rate >= 1.0)
        throw std::invalid_argument("prune_rate must lie in [0, 1)");
    RemovalReport report;
    report.kind = "prune";
    report.before = measure(model, test, wm, embed);

    Eigen::VectorXd flat = model.flatten();
    std::vector<double> magnitudes(static_cast<size_t>(flat.size()));
    for (int64_t i = 0; i < flat.size(); ++i)
        magnitudes[static_cast<size_t>(i)] = std::abs(flat(i));
    auto cutoff_index = static_cast<size_t>(
        prune_rate * static_cast<double>(magnitudes.size()));
    ToyModel attacked = model;
    if (cutoff_index > 0) {
        std::nth_element(magnitudes.begin(), magnitudes.begin() + (cutoff_index - 1),
                         magnitudes.end());
        double threshold = magnitudes[cutoff_index - 1];
        for (int64_t i = 0; i < flat.size(); ++i)
            if (std::abs(flat(i)) <= threshold) flat(i) = 0.0;
        attacked.unflatten(flat);
    }
    report.after = measure(attacked, test, wm, embed);
    report.trace.push_back({0, report.after.accuracy, report.after.detection});
    return report;
}

RemovalReport gaussian_target_attack(const ToyModel& model, const Dataset& test,
                                     const Watermark& wm,
                                     const EmbeddingMatrix& embed, double phi,
                                     uint64_t seed) {
    if (phi <= 0.0 || phi >= 1.0)
        throw std::invalid_argument("noise intensity phi must lie in (0, 1)");
    RemovalReport report;
    report.kind = "gaussian_target";
    report.before = measure(model, test, wm, embed);

    const Eigen::VectorXd& gamma = model.gamma;
    double mean = gamma.mean();
    double var = (gamma.array() - mean).square().sum() /
                 static_cast<double>(gamma.size());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(mean, std::sqrt(phi * var));
    ToyModel attacked = model;
    for (int64_t i = 0; i < attacked.gamma.size(); ++i)
        attacked.gamma(i) += noise(rng);
    report.after = measure(attacked, test, wm, embed);
    report.trace.push_back({0, report.after.accuracy, report.after.detection});
    return report;
}

}  // namespace fedsov
