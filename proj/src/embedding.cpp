#include "fedsov/embedding.hpp"

#include <random>
#include <stdexcept>

namespace fedsov {

EmbeddingMatrix gen_embedding_matrix(int64_t omega, int64_t n, uint64_t seed) {
    if (omega < 1 || n < 1)
        throw std::invalid_argument("embedding matrix dimensions must be >= 1");
    EmbeddingMatrix e;
    e.omega = omega;
    e.n = n;
    e.seed = seed;
    e.entries.resize(omega, n);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    // Row-major fill order so the layout is part of the format.
    for (int64_t i = 0; i < omega; ++i)
        for (int64_t j = 0; j < n; ++j) e.entries(i, j) = normal(rng);
    return e;
}

static void check_shapes(const Eigen::VectorXd& w, const EmbeddingMatrix& e) {
    if (w.size() != e.entries.rows())
        throw std::invalid_argument("host parameter length does not match omega");
}

Watermark extract(const Eigen::VectorXd& w, const EmbeddingMatrix& e) {
    check_shapes(w, e);
    Eigen::VectorXd proj = e.entries.transpose() * w;
    Watermark out(static_cast<size_t>(e.n));
    for (int64_t i = 0; i < e.n; ++i)
        out.set_bit(static_cast<size_t>(i), proj(i) > 0.0 ? 1 : 0);
    return out;
}

Eigen::VectorXd sign_targets(const Watermark& target) {
    Eigen::VectorXd t(static_cast<int64_t>(target.size()));
    for (size_t i = 0; i < target.size(); ++i)
        t(static_cast<int64_t>(i)) = target.bit(i) ? 1.0 : -1.0;
    return t;
}

double hinge_loss(const Eigen::VectorXd& w, const EmbeddingMatrix& e,
                  const Watermark& target, const HingeConfig& cfg) {
    check_shapes(w, e);
    if (static_cast<int64_t>(target.size()) != e.n)
        throw std::invalid_argument("target watermark length does not match n");
    Eigen::VectorXd proj = e.entries.transpose() * w;
    Eigen::VectorXd t = sign_targets(target);
    double loss = 0.0;
    for (int64_t i = 0; i < e.n; ++i)
        loss += std::max(0.0, cfg.mu - t(i) * proj(i));
    return cfg.alpha * loss;
}

Eigen::VectorXd hinge_grad(const Eigen::VectorXd& w, const EmbeddingMatrix& e,
                           const Watermark& target, const HingeConfig& cfg) {
    check_shapes(w, e);
    if (static_cast<int64_t>(target.size()) != e.n)
        throw std::invalid_argument("target watermark length does not match n");
    Eigen::VectorXd proj = e.entries.transpose() * w;
    Eigen::VectorXd t = sign_targets(target);
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(w.size());
    for (int64_t i = 0; i < e.n; ++i) {
        if (cfg.mu - t(i) * proj(i) > 0.0)
            grad -= cfg.alpha * t(i) * e.entries.col(i);
    }
    return grad;
}

EmbedResult embed_standalone(const Eigen::VectorXd& w0, const EmbeddingMatrix& e,
                             const Watermark& target, const HingeConfig& cfg,
                             double step_size, int max_steps) {
    Eigen::VectorXd w = w0;
    int step = 0;
    double loss = hinge_loss(w, e, target, cfg);
    while (step < max_steps && loss > 0.0) {
        w -= step_size * hinge_grad(w, e, target, cfg);
        loss = hinge_loss(w, e, target, cfg);
        ++step;
    }
    EmbedResult res;
    res.w = std::move(w);
    res.final_loss = loss;
    res.rate = detection_rate(extract(res.w, e), target);
    res.steps_taken = step;
    res.converged = loss == 0.0;
    return res;
}

}  // namespace fedsov
