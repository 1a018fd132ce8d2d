#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>

#include "fedsov/io.hpp"

using namespace fedsov;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("fedsov_io_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("watermark file round trip") {
    TempDir dir;
    std::mt19937_64 rng(1);
    Watermark wm = random_watermark(100, rng);
    io::save_watermark(dir.path / "wm.json", wm);
    CHECK(io::load_watermark(dir.path / "wm.json") == wm);
}

TEST_CASE("embedding file round trip regenerates identical entries") {
    TempDir dir;
    EmbeddingMatrix e = gen_embedding_matrix(64, 16, 77);
    io::save_embedding(dir.path / "e.json", e);
    EmbeddingMatrix back = io::load_embedding(dir.path / "e.json");
    CHECK(back.seed == 77);
    CHECK(back.entries.isApprox(e.entries));
}

TEST_CASE("model round trip preserves every parameter bit") {
    TempDir dir;
    ToyModel m = ToyModel::init(8, 16, 4, 5);
    m.gamma(3) = 1.25;
    io::save_model(dir.path, m, 8, 4);
    ToyModel back = io::load_model(dir.path);
    CHECK(back.flatten() == m.flatten());  // exact, not approximate
    // Truncated binary payload is detected.
    fs::resize_file(dir.path / "model.bin", 16);
    CHECK_THROWS(io::load_model(dir.path));
}

TEST_CASE("keypair round trip and tamper detection") {
    TempDir dir;
    auto scheme = SignatureScheme::setup(CurveId::desk_toy, 1);
    std::mt19937_64 rng(2);
    KeyPair kp = scheme.keygen(rng);
    io::save_keypair(dir.path / "k.json", scheme, kp);
    KeyPair back = io::load_keypair(dir.path / "k.json", scheme);
    CHECK(back.sk.x == kp.sk.x);
    CHECK(back.sk.y == kp.sk.y);
    CHECK(back.pk == kp.pk);

    // Stored pk that disagrees with sk must be rejected.
    std::ifstream in(dir.path / "k.json");
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    in.close();
    KeyPair other = scheme.keygen(rng);
    std::string good_pk = to_hex(scheme.encode_pk(kp.pk));
    std::string bad_pk = to_hex(scheme.encode_pk(other.pk));
    auto at = text.find(good_pk);
    REQUIRE(at != std::string::npos);
    text.replace(at, good_pk.size(), bad_pk);
    std::ofstream(dir.path / "k.json") << text;
    CHECK_THROWS(io::load_keypair(dir.path / "k.json", scheme));
}

TEST_CASE("pk_con round trip and length validation") {
    TempDir dir;
    auto scheme = SignatureScheme::setup(CurveId::desk_toy, 1);
    std::mt19937_64 rng(3);
    std::vector<Bytes> pks;
    for (int i = 0; i < 4; ++i) pks.push_back(scheme.encode_pk(scheme.keygen(rng).pk));
    ConcatenatedKey con = ConcatenatedKey::from_pks(pks);
    io::save_pk_con(dir.path, con, scheme.pk_length_bytes());
    CHECK(io::load_pk_con(dir.path) == con.bytes);
    fs::resize_file(dir.path / "pkcon.bin", con.bytes.size() - 1);
    CHECK_THROWS(io::load_pk_con(dir.path));
}

TEST_CASE("public params round trip cross-checks the boundary") {
    TempDir dir;
    FLConfig cfg;
    cfg.n_bits = 64;
    SystemPublicParams pp = SystemPublicParams::from_config(cfg, 9, -16.0);
    io::save_public_params(dir.path / "pp.json", pp);
    SystemPublicParams back = io::load_public_params(dir.path / "pp.json");
    CHECK(back.err_n == pp.err_n);
    CHECK(back.n == 64);
    CHECK(back.curve == pp.curve);

    // A declared err_n that disagrees with the solver is rejected.
    std::ifstream in(dir.path / "pp.json");
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    in.close();
    std::string needle = "\"err_n\": " + std::to_string(pp.err_n);
    auto at = text.find(needle);
    REQUIRE(at != std::string::npos);
    text.replace(at, needle.size(), "\"err_n\": " + std::to_string(pp.err_n + 1));
    std::ofstream(dir.path / "pp.json") << text;
    CHECK_THROWS(io::load_public_params(dir.path / "pp.json"));
}

TEST_CASE("config round trip") {
    TempDir dir;
    FLConfig cfg;
    cfg.clients = 7;
    cfg.lr = 0.034;
    cfg.curve = CurveId::production_curve;
    cfg.task.dim = 12;
    io::save_config(dir.path / "c.json", cfg);
    FLConfig back = io::load_config(dir.path / "c.json");
    CHECK(back.clients == 7);
    CHECK(back.lr == 0.034);
    CHECK(back.curve == CurveId::production_curve);
    CHECK(back.task.dim == 12);
}

TEST_CASE("full run directory round trip") {
    TempDir dir;
    FLConfig cfg;
    cfg.clients = 2;
    cfg.global_epochs = 3;
    cfg.n_bits = 256;  // the default P_A target needs n > 128
    cfg.omega = 64;
    cfg.task.samples_per_client = 32;
    cfg.task.test_samples = 64;
    FederationResult res = run_federation(cfg);
    io::save_run(dir.path, res);
    io::LoadedRun run = io::load_run(dir.path);
    CHECK(run.model.flatten() == res.fed.global.flatten());
    CHECK(run.wm == res.fed.wm);
    CHECK(run.pk_con == res.fed.pk_con.bytes);
    CHECK(run.embed.entries.isApprox(res.fed.embed.entries));
    CHECK(run.cfg.clients == 2);
    CHECK(run.pp.n == 256);
    // The stored keys still answer for their pk_con slots.
    auto scheme = SignatureScheme::setup(run.pp.curve, run.pp.group_seed);
    KeyPair kp = io::load_keypair(dir.path / "keys" / "client_1.json", scheme);
    CHECK(scheme.encode_pk(kp.pk) == res.fed.pk_con.client_pks[1]);
}

TEST_CASE("missing files raise errors") {
    TempDir dir;
    CHECK_THROWS(io::load_watermark(dir.path / "nope.json"));
    CHECK_THROWS(io::load_model(dir.path));
    CHECK_THROWS(io::load_run(dir.path));
}
