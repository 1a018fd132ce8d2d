#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "fedsov/watermark.hpp"

namespace fedsov {

// Seeded omega x n standard-normal matrix mapping host parameters to
// watermark bits. Persisted as (omega, n, seed) and regenerated on load.
struct EmbeddingMatrix {
    Eigen::MatrixXd entries;  // omega x n
    int64_t omega = 0;
    int64_t n = 0;
    uint64_t seed = 0;
};

struct HingeConfig {
    double alpha = 0.5;
    double mu = 0.1;
};

EmbeddingMatrix gen_embedding_matrix(int64_t omega, int64_t n, uint64_t seed);

// h' = sgn(w E); bit i is 1 iff the i-th projection is strictly positive.
Watermark extract(const Eigen::VectorXd& w, const EmbeddingMatrix& e);

// Sign targets: bit 1 -> +1, bit 0 -> -1.
Eigen::VectorXd sign_targets(const Watermark& target);

// alpha * sum_i max(0, mu - t_i (w E)_i)
double hinge_loss(const Eigen::VectorXd& w, const EmbeddingMatrix& e,
                  const Watermark& target, const HingeConfig& cfg);

// d/dw of hinge_loss; subgradient 0 at the kink.
Eigen::VectorXd hinge_grad(const Eigen::VectorXd& w, const EmbeddingMatrix& e,
                           const Watermark& target, const HingeConfig& cfg);

struct EmbedResult {
    Eigen::VectorXd w;
    double final_loss;
    double rate;       // detection rate of extract(w) against the target
    int steps_taken;
    bool converged;    // loss reached zero (all margins cleared)
};

// Plain gradient descent on the hinge loss alone.
EmbedResult embed_standalone(const Eigen::VectorXd& w0, const EmbeddingMatrix& e,
                             const Watermark& target, const HingeConfig& cfg,
                             double step_size, int max_steps);

}  // namespace fedsov
