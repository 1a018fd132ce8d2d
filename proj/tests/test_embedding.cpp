#include "doctest.h"

#include <cmath>
#include <random>

#include "fedsov/embedding.hpp"

using namespace fedsov;

TEST_CASE("embedding matrix is seeded and deterministic") {
    EmbeddingMatrix a = gen_embedding_matrix(64, 16, 9);
    EmbeddingMatrix b = gen_embedding_matrix(64, 16, 9);
    EmbeddingMatrix c = gen_embedding_matrix(64, 16, 10);
    CHECK(a.entries.isApprox(b.entries));
    CHECK(!a.entries.isApprox(c.entries));
    CHECK(a.entries.rows() == 64);
    CHECK(a.entries.cols() == 16);
    // Standard normal entries: mean near 0, variance near 1.
    double mean = a.entries.mean();
    double var = (a.entries.array() - mean).square().mean();
    CHECK(std::abs(mean) < 0.1);
    CHECK(var == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("extraction sign convention: strictly positive means bit 1") {
    EmbeddingMatrix e;
    e.omega = 1;
    e.n = 3;
    e.entries = Eigen::MatrixXd(1, 3);
    e.entries << 1.0, -1.0, 0.0;
    Eigen::VectorXd w(1);
    w << 1.0;
    Watermark h = extract(w, e);
    CHECK(h.bit(0) == 1);  // projection +1
    CHECK(h.bit(1) == 0);  // projection -1
    CHECK(h.bit(2) == 0);  // projection exactly 0 maps to bit 0
}

TEST_CASE("sign targets map bit 1 to +1 and bit 0 to -1") {
    Watermark wm(3);
    wm.set_bit(1, 1);
    Eigen::VectorXd t = sign_targets(wm);
    CHECK(t(0) == -1.0);
    CHECK(t(1) == 1.0);
    CHECK(t(2) == -1.0);
}

TEST_CASE("hinge gradient matches central finite differences off the kink") {
    std::mt19937_64 rng(3);
    EmbeddingMatrix e = gen_embedding_matrix(24, 8, 12);
    Watermark target = random_watermark(8, rng);
    HingeConfig cfg{0.7, 0.1};
    std::normal_distribution<double> dist(0.0, 0.5);
    const double h = 1e-6;
    int checked = 0;
    while (checked < 100) {
        Eigen::VectorXd w(24);
        for (int i = 0; i < 24; ++i) w(i) = dist(rng);
        // Skip points near a hinge kink, where the loss is not differentiable.
        Eigen::VectorXd proj = e.entries.transpose() * w;
        Eigen::VectorXd t = sign_targets(target);
        bool near_kink = false;
        for (int i = 0; i < 8; ++i)
            if (std::abs(cfg.mu - t(i) * proj(i)) < 1e-4) near_kink = true;
        if (near_kink) continue;

        Eigen::VectorXd g = hinge_grad(w, e, target, cfg);
        int coord = static_cast<int>(rng() % 24);
        Eigen::VectorXd wp = w, wm = w;
        wp(coord) += h;
        wm(coord) -= h;
        double fd = (hinge_loss(wp, e, target, cfg) -
                     hinge_loss(wm, e, target, cfg)) /
                    (2 * h);
        double denom = std::max({std::abs(fd), std::abs(g(coord)), 1e-8});
        CHECK(std::abs(fd - g(coord)) / denom < 1e-5);
        ++checked;
    }
}

TEST_CASE("hinge loss is convex along random segments") {
    std::mt19937_64 rng(4);
    EmbeddingMatrix e = gen_embedding_matrix(16, 6, 21);
    Watermark target = random_watermark(6, rng);
    HingeConfig cfg{1.0, 0.1};
    std::normal_distribution<double> dist(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::VectorXd a(16), b(16);
        for (int i = 0; i < 16; ++i) {
            a(i) = dist(rng);
            b(i) = dist(rng);
        }
        double mid = hinge_loss(0.5 * (a + b), e, target, cfg);
        double chord =
            0.5 * (hinge_loss(a, e, target, cfg) + hinge_loss(b, e, target, cfg));
        CHECK(mid <= chord + 1e-12);
    }
}

TEST_CASE("hinge loss is nonnegative and zero once margins clear") {
    std::mt19937_64 rng(5);
    EmbeddingMatrix e = gen_embedding_matrix(32, 8, 31);
    Watermark target = random_watermark(8, rng);
    HingeConfig cfg{0.5, 0.1};
    Eigen::VectorXd w = Eigen::VectorXd::Zero(32);
    CHECK(hinge_loss(w, e, target, cfg) ==
          doctest::Approx(0.5 * 8 * 0.1));  // all projections at 0, margin mu
    EmbedResult res = embed_standalone(w, e, target, cfg, 0.05, 2000);
    CHECK(res.converged);
    CHECK(res.final_loss == 0.0);
    CHECK(res.rate == 1.0);
    CHECK(extract(res.w, e) == target);
    CHECK(hinge_grad(res.w, e, target, cfg).norm() == 0.0);
}

TEST_CASE("embedding succeeds from a random start") {
    std::mt19937_64 rng(6);
    EmbeddingMatrix e = gen_embedding_matrix(128, 32, 77);
    Watermark target = random_watermark(32, rng);
    std::normal_distribution<double> dist(0.0, 0.3);
    Eigen::VectorXd w0(128);
    for (int i = 0; i < 128; ++i) w0(i) = dist(rng);
    EmbedResult res = embed_standalone(w0, e, target, {0.5, 0.1}, 0.05, 5000);
    CHECK(res.rate == 1.0);
    CHECK(res.converged);
}
