#include "fedsov/fl_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fedsov {

namespace {

Eigen::MatrixXd class_means(const TaskSpec& task, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd means(task.classes, task.dim);
    for (int c = 0; c < task.classes; ++c) {
        Eigen::VectorXd dir(task.dim);
        for (int d = 0; d < task.dim; ++d) dir(d) = normal(rng);
        means.row(c) = task.cluster_sep * dir.normalized();
    }
    return means;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd out = logits;
    for (int64_t i = 0; i < out.rows(); ++i) {
        double m = out.row(i).maxCoeff();
        out.row(i) = (out.row(i).array() - m).exp();
        out.row(i) /= out.row(i).sum();
    }
    return out;
}

struct Batch {
    Eigen::MatrixXd x;
    std::vector<int> y;
};

// One SGD minibatch step on task cross-entropy, optionally plus the hinge
// regularizer on gamma. Returns the task loss for divergence checks.
double sgd_step(ToyModel& m, const Batch& batch, double lr, double alpha,
                const Watermark* wm, const EmbeddingMatrix* embed, double mu) {
    int64_t bsz = batch.x.rows();
    Eigen::MatrixXd z1 = (batch.x * m.w1).rowwise() + m.b1.transpose();
    Eigen::MatrixXd s =
        (z1.array().rowwise() * m.gamma.transpose().array()).rowwise() +
        m.beta.transpose().array();
    Eigen::MatrixXd a = s.array().tanh();
    Eigen::MatrixXd logits = (a * m.w2).rowwise() + m.b2.transpose();
    Eigen::MatrixXd probs = softmax_rows(logits);

    double loss = 0.0;
    Eigen::MatrixXd dlogits = probs;
    for (int64_t i = 0; i < bsz; ++i) {
        loss -= std::log(std::max(probs(i, batch.y[i]), 1e-300));
        dlogits(i, batch.y[i]) -= 1.0;
    }
    loss /= static_cast<double>(bsz);
    dlogits /= static_cast<double>(bsz);

    Eigen::MatrixXd dw2 = a.transpose() * dlogits;
    Eigen::VectorXd db2 = dlogits.colwise().sum();
    Eigen::MatrixXd da = dlogits * m.w2.transpose();
    Eigen::MatrixXd ds = da.array() * (1.0 - a.array().square());
    Eigen::VectorXd dgamma = (ds.array() * z1.array()).colwise().sum();
    Eigen::VectorXd dbeta = ds.colwise().sum();
    Eigen::MatrixXd dz1 = ds.array().rowwise() * m.gamma.transpose().array();
    Eigen::MatrixXd dw1 = batch.x.transpose() * dz1;
    Eigen::VectorXd db1 = dz1.colwise().sum();

    if (alpha > 0.0 && wm != nullptr) {
        HingeConfig cfg{alpha, mu};
        dgamma += hinge_grad(m.gamma, *embed, *wm, cfg);
    }

    m.w2 -= lr * dw2;
    m.b2 -= lr * db2;
    m.gamma -= lr * dgamma;
    m.beta -= lr * dbeta;
    m.w1 -= lr * dw1;
    m.b1 -= lr * db1;
    return loss;
}

void run_epochs(ToyModel& model, const Dataset& data, int epochs, int batch_size,
                double lr, uint64_t seed, double alpha, const Watermark* wm,
                const EmbeddingMatrix* embed, double mu) {
    std::mt19937_64 rng(seed);
    std::vector<int64_t> order(static_cast<size_t>(data.size()));
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (int64_t start = 0; start < data.size(); start += batch_size) {
            int64_t end = std::min<int64_t>(start + batch_size, data.size());
            Batch batch;
            batch.x.resize(end - start, data.x.cols());
            batch.y.resize(static_cast<size_t>(end - start));
            for (int64_t i = start; i < end; ++i) {
                batch.x.row(i - start) = data.x.row(order[static_cast<size_t>(i)]);
                batch.y[static_cast<size_t>(i - start)] =
                    data.y[static_cast<size_t>(order[static_cast<size_t>(i)])];
            }
            double loss = sgd_step(model, batch, lr, alpha, wm, embed, mu);
            if (!std::isfinite(loss))
                throw std::runtime_error("training diverged: non-finite loss");
        }
    }
}

}  // namespace

Dataset synth_dataset(const TaskSpec& task, int samples, uint64_t task_seed,
                      uint64_t sample_seed) {
    Eigen::MatrixXd means = class_means(task, task_seed ^ 0x5eed0001u);
    std::mt19937_64 rng(sample_seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Dataset data;
    data.x.resize(samples, task.dim);
    data.y.resize(static_cast<size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        int c = static_cast<int>(rng() % static_cast<uint64_t>(task.classes));
        for (int d = 0; d < task.dim; ++d)
            data.x(i, d) = means(c, d) + normal(rng);
        data.y[static_cast<size_t>(i)] = c;
    }
    return data;
}

ToyModel ToyModel::init(int dim, int omega, int classes, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    ToyModel m;
    double s1 = 1.0 / std::sqrt(static_cast<double>(dim));
    double s2 = 1.0 / std::sqrt(static_cast<double>(omega));
    m.w1.resize(dim, omega);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < omega; ++j) m.w1(i, j) = s1 * normal(rng);
    m.b1 = Eigen::VectorXd::Zero(omega);
    m.gamma = Eigen::VectorXd::Ones(omega);
    m.beta = Eigen::VectorXd::Zero(omega);
    m.w2.resize(omega, classes);
    for (int i = 0; i < omega; ++i)
        for (int j = 0; j < classes; ++j) m.w2(i, j) = s2 * normal(rng);
    m.b2 = Eigen::VectorXd::Zero(classes);
    return m;
}

Eigen::MatrixXd ToyModel::logits(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd z1 = (x * w1).rowwise() + b1.transpose();
    Eigen::MatrixXd s =
        (z1.array().rowwise() * gamma.transpose().array()).rowwise() +
        beta.transpose().array();
    Eigen::MatrixXd a = s.array().tanh();
    return (a * w2).rowwise() + b2.transpose();
}

double ToyModel::accuracy(const Dataset& data) const {
    Eigen::MatrixXd out = logits(data.x);
    int64_t correct = 0;
    for (int64_t i = 0; i < out.rows(); ++i) {
        Eigen::Index argmax;
        out.row(i).maxCoeff(&argmax);
        if (static_cast<int>(argmax) == data.y[static_cast<size_t>(i)]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(out.rows());
}

int64_t ToyModel::param_count() const {
    return w1.size() + b1.size() + gamma.size() + beta.size() + w2.size() + b2.size();
}

Eigen::VectorXd ToyModel::flatten() const {
    Eigen::VectorXd out(param_count());
    int64_t pos = 0;
    auto put = [&](const Eigen::MatrixXd& m) {
        out.segment(pos, m.size()) = Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
        pos += m.size();
    };
    put(w1);
    put(b1);
    put(gamma);
    put(beta);
    put(w2);
    put(b2);
    return out;
}

void ToyModel::unflatten(const Eigen::VectorXd& params) {
    if (params.size() != param_count())
        throw std::invalid_argument("parameter vector length mismatch");
    int64_t pos = 0;
    auto take = [&](Eigen::MatrixXd& m) {
        m = Eigen::Map<const Eigen::MatrixXd>(params.data() + pos, m.rows(), m.cols());
        pos += m.size();
    };
    auto take_v = [&](Eigen::VectorXd& v) {
        v = params.segment(pos, v.size());
        pos += v.size();
    };
    take(w1);
    take_v(b1);
    take_v(gamma);
    take_v(beta);
    take(w2);
    take_v(b2);
}

Federation setup_federation(const FLConfig& cfg) {
    if (cfg.clients < 1) throw std::invalid_argument("need at least one client");
    Federation fed;
    fed.cfg = cfg;
    fed.scheme = SignatureScheme::setup(cfg.curve, cfg.seed);
    std::mt19937_64 key_rng(cfg.seed ^ 0x6b657967u);
    std::vector<Bytes> pk_encodings;
    fed.clients.resize(static_cast<size_t>(cfg.clients));
    for (int i = 0; i < cfg.clients; ++i) {
        fed.clients[static_cast<size_t>(i)].keys = fed.scheme.keygen(key_rng);
        pk_encodings.push_back(
            fed.scheme.encode_pk(fed.clients[static_cast<size_t>(i)].keys.pk));
        fed.clients[static_cast<size_t>(i)].shard = synth_dataset(
            cfg.task, cfg.task.samples_per_client, cfg.seed,
            cfg.seed + 101 * static_cast<uint64_t>(i) + 1);
    }
    fed.pk_con = ConcatenatedKey::from_pks(std::move(pk_encodings));
    fed.wm = generate_watermark(fed.pk_con.bytes, static_cast<size_t>(cfg.n_bits));
    fed.embed = gen_embedding_matrix(cfg.omega, cfg.n_bits, cfg.seed ^ 0xe4bed);
    fed.global = ToyModel::init(cfg.task.dim, cfg.omega, cfg.task.classes,
                                cfg.seed ^ 0x304d11u);
    fed.test = synth_dataset(cfg.task, cfg.task.test_samples, cfg.seed,
                             cfg.seed ^ 0x7e57u);
    return fed;
}

ToyModel local_train(const ClientState& client, const ToyModel& global,
                     const FLConfig& cfg, const Watermark& wm,
                     const EmbeddingMatrix& embed, double lr, uint64_t step_seed) {
    ToyModel model = global;
    run_epochs(model, client.shard, cfg.local_epochs, cfg.batch_size, lr,
               step_seed, cfg.alpha, &wm, &embed, cfg.mu);
    return model;
}

void sgd_task_only(ToyModel& model, const Dataset& data, int epochs,
                   int batch_size, double lr, uint64_t seed) {
    run_epochs(model, data, epochs, batch_size, lr, seed, 0.0, nullptr, nullptr, 0.0);
}

ToyModel fedavg(const std::vector<ToyModel>& updates,
                const std::vector<int64_t>& weights) {
    if (updates.empty()) throw std::invalid_argument("fedavg needs >= 1 update");
    if (updates.size() != weights.size())
        throw std::invalid_argument("fedavg: weights/updates size mismatch");
    int64_t total = std::accumulate(weights.begin(), weights.end(), int64_t{0});
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(updates[0].param_count());
    // Fixed client-index order keeps the reduction reproducible.
    for (size_t i = 0; i < updates.size(); ++i) {
        Eigen::VectorXd flat = updates[i].flatten();
        if (flat.size() != acc.size())
            throw std::invalid_argument("fedavg: inconsistent model shapes");
        acc += (static_cast<double>(weights[i]) / static_cast<double>(total)) * flat;
    }
    ToyModel out = updates[0];
    out.unflatten(acc);
    return out;
}

FederationResult run_federation(const FLConfig& cfg) {
    FederationResult res;
    res.fed = setup_federation(cfg);
    Federation& fed = res.fed;
    double lr = cfg.lr;
    HingeConfig hinge_cfg{cfg.alpha, cfg.mu};
    for (int round = 0; round < cfg.global_epochs; ++round) {
        std::vector<ToyModel> updates;
        std::vector<int64_t> weights;
        updates.reserve(fed.clients.size());
        for (size_t i = 0; i < fed.clients.size(); ++i) {
            uint64_t step_seed =
                cfg.seed ^ (0x10c0ul * (static_cast<uint64_t>(round) + 1) + i);
            updates.push_back(local_train(fed.clients[i], fed.global, cfg, fed.wm,
                                          fed.embed, lr, step_seed));
            weights.push_back(fed.clients[i].shard.size());
        }
        fed.global = fedavg(updates, weights);
        RoundMetrics rm;
        rm.round = round;
        rm.main_accuracy = fed.global.accuracy(fed.test);
        rm.detection = detection_rate(extract(fed.global.gamma, fed.embed), fed.wm);
        rm.hinge = hinge_loss(fed.global.gamma, fed.embed, fed.wm, hinge_cfg);
        res.rounds.push_back(rm);
        lr *= cfg.lr_decay;
    }
    return res;
}

FedIprResult baseline_fedipr_mode(const FLConfig& cfg, int bits_per_client) {
    if (bits_per_client < 8)
        throw std::invalid_argument("per-client watermark must be >= 8 bits");
    FedIprResult res;
    res.cfg = cfg;
    std::mt19937_64 wm_rng(cfg.seed ^ 0xfed1f2u);
    std::vector<ClientState> clients(static_cast<size_t>(cfg.clients));
    for (int i = 0; i < cfg.clients; ++i) {
        res.client_wms.push_back(
            random_watermark(static_cast<size_t>(bits_per_client), wm_rng));
        res.client_embeds.push_back(gen_embedding_matrix(
            cfg.omega, bits_per_client, cfg.seed + 7919 * static_cast<uint64_t>(i)));
        clients[static_cast<size_t>(i)].shard = synth_dataset(
            cfg.task, cfg.task.samples_per_client, cfg.seed,
            cfg.seed + 101 * static_cast<uint64_t>(i) + 1);
    }
    res.global = ToyModel::init(cfg.task.dim, cfg.omega, cfg.task.classes,
                                cfg.seed ^ 0x304d11u);
    res.test = synth_dataset(cfg.task, cfg.task.test_samples, cfg.seed,
                             cfg.seed ^ 0x7e57u);

    double lr = cfg.lr;
    for (int round = 0; round < cfg.global_epochs; ++round) {
        std::vector<ToyModel> updates;
        std::vector<int64_t> weights;
        for (size_t i = 0; i < clients.size(); ++i) {
            ToyModel model = res.global;
            run_epochs(model, clients[i].shard, cfg.local_epochs, cfg.batch_size,
                       lr, cfg.seed ^ (0x10c0ul * (static_cast<uint64_t>(round) + 1) + i),
                       cfg.alpha, &res.client_wms[i], &res.client_embeds[i], cfg.mu);
            updates.push_back(std::move(model));
            weights.push_back(clients[i].shard.size());
        }
        res.global = fedavg(updates, weights);
        double mean_rate = 0.0;
        for (size_t i = 0; i < clients.size(); ++i)
            mean_rate += detection_rate(
                extract(res.global.gamma, res.client_embeds[i]), res.client_wms[i]);
        mean_rate /= static_cast<double>(clients.size());
        res.rounds.push_back(RoundMetrics{round, res.global.accuracy(res.test),
                                          mean_rate, 0.0});
        lr *= cfg.lr_decay;
    }
    for (size_t i = 0; i < clients.size(); ++i)
        res.per_client_rates.push_back(detection_rate(
            extract(res.global.gamma, res.client_embeds[i]), res.client_wms[i]));
    return res;
}

}  // namespace fedsov
