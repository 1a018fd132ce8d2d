#include "doctest.h"

#include <cmath>
#include <random>

#include "fedsov/attacks.hpp"
#include "fedsov/boundary.hpp"

using namespace fedsov;

TEST_CASE("forged embedding reproduces the worked numeric example") {
    // Frozen 4-parameter example: host vector and target sign pattern.
    Eigen::VectorXd w(4);
    w << 0.1048, 0.1316, 0.1148, -0.1190;
    Eigen::VectorXd b(4);
    b << 1, 1, -1, 1;
    ForgedEmbedding forged = forge_embedding(w, b, 1.0);
    Eigen::VectorXd proj = forged.e_prime.transpose() * w;
    for (int j = 0; j < 4; ++j) {
        CHECK(proj(j) == doctest::Approx(b(j)).epsilon(1e-12));
        CHECK((proj(j) > 0 ? 1.0 : -1.0) == b(j));
    }
    // Each forged column is the host vector scaled by margin*b_j/||w||^2.
    double wn2 = w.squaredNorm();
    for (int j = 0; j < 4; ++j)
        CHECK(forged.e_prime.col(j).isApprox(w * (b(j) / wn2), 1e-12));
}

TEST_CASE("forged embedding achieves rate 1.0 for random instances") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        int omega = 8 + int(rng() % 64);
        int n = 4 + int(rng() % 32);
        Eigen::VectorXd w(omega);
        for (int i = 0; i < omega; ++i) w(i) = dist(rng);
        Watermark target = random_watermark(size_t(n), rng);
        ForgedEmbedding forged = forge_embedding(w, sign_targets(target));
        EmbeddingMatrix e;
        e.entries = forged.e_prime;
        e.omega = omega;
        e.n = n;
        CHECK(extract(w, e) == target);
    }
}

TEST_CASE("ambiguity demo: credential forges but signatures do not") {
    TaskSpec task;
    Dataset test = synth_dataset(task, 256, 3, 4);
    ToyModel model = ToyModel::init(task.dim, 32, task.classes, 9);
    AmbiguityReport rep = ambiguity_attack_demo(model, test, 32, 10);
    CHECK(rep.forged_rate_is_one);
    CHECK(rep.forged_detection_rate == 1.0);
    CHECK(rep.params_unchanged);
    CHECK(rep.accuracy_delta == 0.0);
    CHECK(rep.fedsov_rejects);
}

TEST_CASE("forging game matches the exact Bernoulli probability") {
    // p_single = S(16,2)/2^16 = 137/65536; success over k=100 draws.
    std::mt19937_64 rng(11);
    const size_t reps = 20000;
    double rate = near_collision_forging_game(16, 1, 100, reps, rng);
    double exact = 1.0 - std::pow(1.0 - 137.0 / 65536.0, 100);
    double sigma = std::sqrt(exact * (1.0 - exact) / double(reps));
    CHECK(std::abs(rate - exact) <= 3 * sigma);
    // And the union bound from the advantage lemma dominates it.
    CHECK(rate <= std::exp2(attacker_bound(16, 1, 100, 1).bound_log2));
}

TEST_CASE("near-collision frequency matches the combinatorial probability") {
    std::mt19937_64 rng(12);
    const size_t trials = 100000;
    double freq = near_collision_frequency(16, 2, trials, rng);
    double exact = 137.0 / 65536.0;
    double sigma = std::sqrt(exact * (1.0 - exact) / double(trials));
    CHECK(std::abs(freq - exact) <= 3 * sigma);
}

namespace {

struct TrainedRun {
    FederationResult res;
    Dataset test;
};

TrainedRun small_trained_run() {
    FLConfig cfg;
    cfg.clients = 3;
    cfg.global_epochs = 15;
    cfg.n_bits = 32;
    cfg.omega = 64;
    cfg.task.samples_per_client = 48;
    cfg.seed = 5;
    FederationResult res = run_federation(cfg);
    Dataset test = synth_dataset(cfg.task, cfg.task.test_samples, cfg.seed,
                                 cfg.seed ^ 0x7e57u);
    return {std::move(res), std::move(test)};
}

}  // namespace

TEST_CASE("prune attack zeroes the requested fraction") {
    TrainedRun run = small_trained_run();
    const Federation& fed = run.res.fed;
    RemovalReport rep =
        prune_attack(fed.global, run.test, fed.wm, fed.embed, 0.5);
    CHECK(rep.kind == "prune");
    CHECK(rep.before.detection >= 0.99);
    // The report is non-destructive: the federation model is untouched, so
    // re-running gives identical numbers.
    RemovalReport again =
        prune_attack(fed.global, run.test, fed.wm, fed.embed, 0.5);
    CHECK(rep.after.detection == again.after.detection);
    CHECK(rep.after.accuracy == again.after.accuracy);
}

TEST_CASE("attack harnesses validate their parameters") {
    TrainedRun run = small_trained_run();
    const Federation& fed = run.res.fed;
    CHECK_THROWS_AS(prune_attack(fed.global, run.test, fed.wm, fed.embed, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(prune_attack(fed.global, run.test, fed.wm, fed.embed, -0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        gaussian_target_attack(fed.global, run.test, fed.wm, fed.embed, 0.0, 1),
        std::invalid_argument);
    CHECK_THROWS_AS(
        gaussian_target_attack(fed.global, run.test, fed.wm, fed.embed, 1.0, 1),
        std::invalid_argument);
    CHECK_THROWS_AS(forge_embedding(Eigen::VectorXd::Zero(4),
                                    Eigen::VectorXd::Ones(4)),
                    std::invalid_argument);
    std::mt19937_64 rng(1);
    CHECK_THROWS_AS(near_collision_forging_game(32, 1, 10, 10, rng),
                    std::invalid_argument);
}

TEST_CASE("finetune attack records a trace and keeps accuracy") {
    TrainedRun run = small_trained_run();
    const Federation& fed = run.res.fed;
    Dataset attacker = synth_dataset(run.res.fed.cfg.task, 48,
                                     run.res.fed.cfg.seed, 999);
    RemovalReport rep = finetune_attack(fed.global, attacker, run.test, fed.wm,
                                        fed.embed, 10, 16, 0.02, 7);
    CHECK(rep.kind == "finetune");
    CHECK(rep.trace.size() == 10);
    CHECK(rep.trace.front().epoch == 1);
    CHECK(rep.trace.back().epoch == 10);
    CHECK(rep.after.accuracy > 0.6);
    CHECK(rep.after.detection >= 0.9);  // hinge margins survive mild tuning
}

TEST_CASE("gaussian attack strength trades detection against accuracy") {
    TrainedRun run = small_trained_run();
    const Federation& fed = run.res.fed;
    RemovalReport mild =
        gaussian_target_attack(fed.global, run.test, fed.wm, fed.embed, 0.05, 3);
    RemovalReport harsh =
        gaussian_target_attack(fed.global, run.test, fed.wm, fed.embed, 0.95, 3);
    CHECK(mild.kind == "gaussian_target");
    // Heavy targeted noise must damage the embedded digest.
    CHECK(harsh.after.detection < harsh.before.detection);
    CHECK(mild.before.accuracy == harsh.before.accuracy);
}
