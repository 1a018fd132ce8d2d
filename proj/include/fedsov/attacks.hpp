#pragma once

#include <Eigen/Dense>

#include <random>
#include <vector>

#include "fedsov/embedding.hpp"
#include "fedsov/fl_sim.hpp"
#include "fedsov/watermark.hpp"

namespace fedsov {

struct ForgedEmbedding {
    Eigen::MatrixXd e_prime;        // omega x n
    Eigen::VectorXd target_signs;   // entries in {-1, +1}
    double margin;
};

// Minimum-norm column construction: e'_j = (margin * b'_j / ||w||^2) * w,
// so (w . E')_j = margin * b'_j and sgn matches the target exactly.
ForgedEmbedding forge_embedding(const Eigen::VectorXd& w_t,
                                const Eigen::VectorXd& target_signs,
                                double margin = 1.0);

struct BeforeAfter {
    double accuracy;
    double detection;
};

struct AmbiguityReport {
    bool forged_rate_is_one;       // forged credential verifies at 100%
    double forged_detection_rate;
    bool params_unchanged;         // parameter buffer hash identical
    double accuracy_delta;         // exactly 0 when params unchanged
    bool fedsov_rejects;           // same attack fails signature verification
};

// Runs the constructive ambiguity attack against watermark-as-credential
// verification, then replays it against signature-backed verification.
AmbiguityReport ambiguity_attack_demo(const ToyModel& model, const Dataset& test,
                                      int forged_bits, uint64_t seed);

// Attacker draws k uniform candidate digests against one fixed target
// (q = 1); success when any lands within Hamming distance 2*err. Returns the
// empirical success rate over `repetitions` independent games.
double near_collision_forging_game(size_t n, size_t err, size_t k,
                                   size_t repetitions, std::mt19937_64& rng);

struct AttackTracePoint {
    int epoch;
    double accuracy;
    double detection;
};

struct RemovalReport {
    std::string kind;
    BeforeAfter before;
    BeforeAfter after;
    std::vector<AttackTracePoint> trace;
};

// Continued SGD on task loss only (no watermark regularizer).
RemovalReport finetune_attack(const ToyModel& model, const Dataset& data,
                              const Dataset& test, const Watermark& wm,
                              const EmbeddingMatrix& embed, int epochs,
                              int batch_size, double lr, uint64_t seed);

// Global magnitude pruning: the prune_rate fraction of smallest-|w|
// parameters across all layers is zeroed.
RemovalReport prune_attack(const ToyModel& model, const Dataset& test,
                           const Watermark& wm, const EmbeddingMatrix& embed,
                           double prune_rate);

// Adds N(mean(gamma), phi * var(gamma)) noise to the host slice only.
RemovalReport gaussian_target_attack(const ToyModel& model, const Dataset& test,
                                     const Watermark& wm,
                                     const EmbeddingMatrix& embed, double phi,
                                     uint64_t seed);

}  // namespace fedsov
