#include "fedsov/io.hpp"

#include <ctime>
#include <fstream>

#include "json.hpp"

namespace fedsov::io {

using nlohmann::json;

namespace {

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json j;
    in >> j;
    return j;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

}  // namespace

void save_watermark(const fs::path& path, const Watermark& wm) {
    write_json(path, json{{"n", wm.size()}, {"bits_hex", wm.bits_hex()}});
}

Watermark load_watermark(const fs::path& path) {
    json j = read_json(path);
    return Watermark(j.at("n").get<size_t>(),
                     from_hex(j.at("bits_hex").get<std::string>()));
}

void save_embedding(const fs::path& path, const EmbeddingMatrix& e) {
    write_json(path, json{{"omega", e.omega}, {"n", e.n}, {"seed", e.seed}});
}

EmbeddingMatrix load_embedding(const fs::path& path) {
    json j = read_json(path);
    return gen_embedding_matrix(j.at("omega").get<int64_t>(),
                                j.at("n").get<int64_t>(),
                                j.at("seed").get<uint64_t>());
}

void save_model(const fs::path& dir, const ToyModel& model, int dim, int classes) {
    Eigen::VectorXd flat = model.flatten();
    std::ofstream bin(dir / "model.bin", std::ios::binary);
    if (!bin) throw std::runtime_error("cannot write model.bin");
    // Little-endian f64; this code assumes a little-endian host.
    bin.write(reinterpret_cast<const char*>(flat.data()),
              static_cast<std::streamsize>(flat.size() * sizeof(double)));
    write_json(dir / "model.json",
               json{{"dim", dim},
                    {"omega", model.gamma.size()},
                    {"classes", classes},
                    {"param_count", flat.size()}});
}

ToyModel load_model(const fs::path& dir) {
    json j = read_json(dir / "model.json");
    int dim = j.at("dim").get<int>();
    int omega = j.at("omega").get<int>();
    int classes = j.at("classes").get<int>();
    ToyModel model = ToyModel::init(dim, omega, classes, 0);
    Eigen::VectorXd flat(model.param_count());
    std::ifstream bin(dir / "model.bin", std::ios::binary);
    if (!bin) throw std::runtime_error("cannot open model.bin");
    bin.read(reinterpret_cast<char*>(flat.data()),
             static_cast<std::streamsize>(flat.size() * sizeof(double)));
    if (bin.gcount() != static_cast<std::streamsize>(flat.size() * sizeof(double)))
        throw std::runtime_error("model.bin truncated");
    model.unflatten(flat);
    return model;
}

void save_keypair(const fs::path& path, const SignatureScheme& scheme,
                  const KeyPair& kp) {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char ts[32];
    std::strftime(ts, sizeof(ts), "%Y-%m-%dT%H:%M:%SZ", &tm);
    write_json(path, json{{"curve_id", curve_name(scheme.curve())},
                          {"sk", {kp.sk.x.get_str(16), kp.sk.y.get_str(16)}},
                          {"pk", to_hex(scheme.encode_pk(kp.pk))},
                          {"created_at", ts}});
}

KeyPair load_keypair(const fs::path& path, const SignatureScheme& scheme) {
    json j = read_json(path);
    if (curve_from_name(j.at("curve_id").get<std::string>()) != scheme.curve())
        throw std::runtime_error("key file curve does not match scheme");
    mpz_class x(j.at("sk")[0].get<std::string>(), 16);
    mpz_class y(j.at("sk")[1].get<std::string>(), 16);
    KeyPair kp = scheme.keypair_from_scalars(x, y);
    // Stored pk must match the one re-derived from sk.
    if (to_hex(scheme.encode_pk(kp.pk)) != j.at("pk").get<std::string>())
        throw std::runtime_error("stored pk does not match secret key");
    return kp;
}

void save_pk_con(const fs::path& dir, const ConcatenatedKey& pk_con,
                 size_t pk_len_bytes) {
    std::ofstream bin(dir / "pkcon.bin", std::ios::binary);
    bin.write(reinterpret_cast<const char*>(pk_con.bytes.data()),
              static_cast<std::streamsize>(pk_con.bytes.size()));
    write_json(dir / "pkcon.json", json{{"count", pk_con.client_pks.size()},
                                        {"pk_len_bytes", pk_len_bytes}});
}

Bytes load_pk_con(const fs::path& dir) {
    json j = read_json(dir / "pkcon.json");
    size_t expected = j.at("count").get<size_t>() * j.at("pk_len_bytes").get<size_t>();
    std::ifstream bin(dir / "pkcon.bin", std::ios::binary);
    if (!bin) throw std::runtime_error("cannot open pkcon.bin");
    Bytes bytes((std::istreambuf_iterator<char>(bin)),
                std::istreambuf_iterator<char>());
    if (bytes.size() != expected)
        throw std::runtime_error("pkcon.bin length does not match sidecar");
    return bytes;
}

void save_public_params(const fs::path& path, const SystemPublicParams& pp) {
    write_json(path, json{{"curve_id", curve_name(pp.curve)},
                          {"group_seed", pp.group_seed},
                          {"embed_seed", pp.embed_seed},
                          {"omega", pp.omega},
                          {"n", pp.n},
                          {"target_pa_log2", pp.target_pa_log2},
                          {"err_n", pp.err_n}});
}

SystemPublicParams load_public_params(const fs::path& path) {
    json j = read_json(path);
    SystemPublicParams pp;
    pp.curve = curve_from_name(j.at("curve_id").get<std::string>());
    pp.group_seed = j.at("group_seed").get<uint64_t>();
    pp.embed_seed = j.at("embed_seed").get<uint64_t>();
    pp.omega = j.at("omega").get<int64_t>();
    pp.n = j.at("n").get<int64_t>();
    pp.target_pa_log2 = j.at("target_pa_log2").get<double>();
    pp.err_n = j.at("err_n").get<int64_t>();
    // Declared tolerance must match the boundary solver.
    if (solve_boundary(pp.n, pp.target_pa_log2).err_n != pp.err_n)
        throw std::runtime_error("public params err_n inconsistent with boundary");
    return pp;
}

void save_config(const fs::path& path, const FLConfig& cfg) {
    write_json(path,
               json{{"clients", cfg.clients},
                    {"global_epochs", cfg.global_epochs},
                    {"local_epochs", cfg.local_epochs},
                    {"batch_size", cfg.batch_size},
                    {"lr", cfg.lr},
                    {"lr_decay", cfg.lr_decay},
                    {"alpha", cfg.alpha},
                    {"mu", cfg.mu},
                    {"n_bits", cfg.n_bits},
                    {"omega", cfg.omega},
                    {"seed", cfg.seed},
                    {"curve_id", curve_name(cfg.curve)},
                    {"sharding", "iid"},
                    {"task",
                     {{"classes", cfg.task.classes},
                      {"dim", cfg.task.dim},
                      {"samples_per_client", cfg.task.samples_per_client},
                      {"test_samples", cfg.task.test_samples},
                      {"cluster_sep", cfg.task.cluster_sep}}}});
}

FLConfig load_config(const fs::path& path) {
    json j = read_json(path);
    FLConfig cfg;
    cfg.clients = j.at("clients").get<int>();
    cfg.global_epochs = j.at("global_epochs").get<int>();
    cfg.local_epochs = j.at("local_epochs").get<int>();
    cfg.batch_size = j.at("batch_size").get<int>();
    cfg.lr = j.at("lr").get<double>();
    cfg.lr_decay = j.at("lr_decay").get<double>();
    cfg.alpha = j.at("alpha").get<double>();
    cfg.mu = j.at("mu").get<double>();
    cfg.n_bits = j.at("n_bits").get<int>();
    cfg.omega = j.at("omega").get<int>();
    cfg.seed = j.at("seed").get<uint64_t>();
    cfg.curve = curve_from_name(j.at("curve_id").get<std::string>());
    const json& t = j.at("task");
    cfg.task.classes = t.at("classes").get<int>();
    cfg.task.dim = t.at("dim").get<int>();
    cfg.task.samples_per_client = t.at("samples_per_client").get<int>();
    cfg.task.test_samples = t.at("test_samples").get<int>();
    cfg.task.cluster_sep = t.at("cluster_sep").get<double>();
    return cfg;
}

void save_metrics_csv(const fs::path& path, const std::vector<RoundMetrics>& rounds) {
    std::ofstream out(path);
    out << "round,main_acc,detection_rate,hinge_loss\n";
    char buf[128];
    for (const RoundMetrics& rm : rounds) {
        std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f\n", rm.round,
                      rm.main_accuracy, rm.detection, rm.hinge);
        out << buf;
    }
}

void save_run(const fs::path& dir, const FederationResult& result) {
    const Federation& fed = result.fed;
    fs::create_directories(dir / "keys");
    save_config(dir / "config.json", fed.cfg);
    save_metrics_csv(dir / "metrics.csv", result.rounds);
    save_model(dir, fed.global, fed.cfg.task.dim, fed.cfg.task.classes);
    for (size_t i = 0; i < fed.clients.size(); ++i)
        save_keypair(dir / "keys" / ("client_" + std::to_string(i) + ".json"),
                     fed.scheme, fed.clients[i].keys);
    save_watermark(dir / "watermark.json", fed.wm);
    save_embedding(dir / "embedding.json", fed.embed);
    save_pk_con(dir, fed.pk_con, fed.scheme.pk_length_bytes());
    save_public_params(dir / "public_params.json",
                       SystemPublicParams::from_config(fed.cfg, fed.embed.seed));
}

LoadedRun load_run(const fs::path& dir) {
    LoadedRun run;
    run.cfg = load_config(dir / "config.json");
    run.model = load_model(dir);
    run.wm = load_watermark(dir / "watermark.json");
    run.embed = load_embedding(dir / "embedding.json");
    run.pk_con = load_pk_con(dir);
    run.pp = load_public_params(dir / "public_params.json");
    return run;
}

}  // namespace fedsov::io
