#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

#include "fedsov/embedding.hpp"
#include "fedsov/sig.hpp"
#include "fedsov/watermark.hpp"

namespace fedsov {

struct TaskSpec {
    int classes = 4;
    int dim = 32;
    int samples_per_client = 64;
    int test_samples = 512;
    double cluster_sep = 3.0;  // distance scale between class means
};

enum class Sharding { iid };

struct FLConfig {
    int clients = 10;
    int global_epochs = 30;
    int local_epochs = 2;
    int batch_size = 16;
    double lr = 0.02;
    double lr_decay = 0.99;  // multiplicative per global epoch
    double alpha = 0.5;      // hinge weight; 0 disables watermark embedding
    double mu = 0.1;
    int n_bits = 256;
    int omega = 512;
    uint64_t seed = 1;
    CurveId curve = CurveId::desk_toy;
    Sharding sharding = Sharding::iid;
    TaskSpec task;
};

struct Dataset {
    Eigen::MatrixXd x;       // samples x dim
    std::vector<int> y;
    int64_t size() const { return x.rows(); }
};

// dense -> per-channel scale/offset -> tanh -> classifier head. The
// saturating activation keeps accuracy sensitive to corruption of the
// scale vector gamma, which is the watermark host slice.
// The scale vector gamma is the watermark host slice.
struct ToyModel {
    Eigen::MatrixXd w1;  // dim x omega
    Eigen::VectorXd b1;  // omega
    Eigen::VectorXd gamma, beta;  // omega
    Eigen::MatrixXd w2;  // omega x classes
    Eigen::VectorXd b2;  // classes

    static ToyModel init(int dim, int omega, int classes, uint64_t seed);

    Eigen::MatrixXd logits(const Eigen::MatrixXd& x) const;
    double accuracy(const Dataset& data) const;

    Eigen::VectorXd flatten() const;
    void unflatten(const Eigen::VectorXd& params);
    int64_t param_count() const;
};

struct RoundMetrics {
    int round;
    double main_accuracy;
    double detection;
    double hinge;
};

struct ClientState {
    KeyPair keys;
    Dataset shard;
};

struct Federation {
    FLConfig cfg;
    SignatureScheme scheme;
    std::vector<ClientState> clients;
    ConcatenatedKey pk_con;
    Watermark wm;
    EmbeddingMatrix embed;
    ToyModel global;
    Dataset test;
};

struct FederationResult {
    Federation fed;
    std::vector<RoundMetrics> rounds;
};

Dataset synth_dataset(const TaskSpec& task, int samples, uint64_t task_seed,
                      uint64_t sample_seed);

Federation setup_federation(const FLConfig& cfg);

// One client's local SGD pass: task loss plus the hinge regularizer on gamma.
// Throws on non-finite loss.
ToyModel local_train(const ClientState& client, const ToyModel& global,
                     const FLConfig& cfg, const Watermark& wm,
                     const EmbeddingMatrix& embed, double lr, uint64_t step_seed);

// Plain task-loss SGD over an arbitrary dataset (used by removal attacks).
void sgd_task_only(ToyModel& model, const Dataset& data, int epochs,
                   int batch_size, double lr, uint64_t seed);

ToyModel fedavg(const std::vector<ToyModel>& updates,
                const std::vector<int64_t>& weights);

FederationResult run_federation(const FLConfig& cfg);

struct FedIprResult {
    FLConfig cfg;
    std::vector<Watermark> client_wms;
    std::vector<EmbeddingMatrix> client_embeds;
    ToyModel global;
    Dataset test;
    std::vector<double> per_client_rates;
    std::vector<RoundMetrics> rounds;  // detection = mean per-client rate
};

// FedIPR-style baseline: every client embeds its own random b-bit watermark
// with its own embedding matrix into the shared gamma slice.
FedIprResult baseline_fedipr_mode(const FLConfig& cfg, int bits_per_client);

}  // namespace fedsov
