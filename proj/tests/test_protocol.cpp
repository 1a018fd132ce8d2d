#include "doctest.h"

#include <random>

#include "fedsov/io.hpp"
#include "fedsov/protocol.hpp"

using namespace fedsov;

namespace {

struct Fixture {
    FLConfig cfg;
    SystemPublicParams pp;
    SignatureScheme scheme;
    std::vector<KeyPair> keys;
    ConcatenatedKey pk_con;
    ToyModel model;

    Fixture()
        : scheme(SignatureScheme::setup(CurveId::desk_toy, 5)) {
        cfg.clients = 3;
        cfg.n_bits = 32;
        cfg.omega = 64;
        cfg.seed = 5;
        // Loose tolerance so the exact-distance tests have headroom.
        pp = SystemPublicParams::from_config(cfg, 123, -8.0);
        std::mt19937_64 rng(17);
        std::vector<Bytes> pks;
        for (int i = 0; i < cfg.clients; ++i) {
            keys.push_back(scheme.keygen(rng));
            pks.push_back(scheme.encode_pk(keys.back().pk));
        }
        pk_con = ConcatenatedKey::from_pks(std::move(pks));
        model = ToyModel::init(cfg.task.dim, cfg.omega, cfg.task.classes, 3);
        set_distance(0);
    }

    // Sets gamma so the extracted digest differs from the expected watermark
    // in exactly `errors` bit positions, via least squares on the embedding.
    void set_distance(size_t errors) {
        EmbeddingMatrix e = gen_embedding_matrix(pp.omega, pp.n, pp.embed_seed);
        Watermark expected = generate_watermark(pk_con.bytes, size_t(pp.n));
        Eigen::VectorXd y = sign_targets(expected);
        for (size_t i = 0; i < errors; ++i) y(Eigen::Index(i)) = -y(Eigen::Index(i));
        // omega > n, so E^T E is invertible and gamma E^T == y exactly.
        model.gamma = e.entries *
                      (e.entries.transpose() * e.entries).ldlt().solve(y);
    }
};

}  // namespace

TEST_CASE("watermark check distance and the strict threshold") {
    Fixture f;
    int64_t err_n = f.pp.err_n;
    REQUIRE(err_n >= 2);

    f.set_distance(0);
    WatermarkCheckResult r0 = watermark_check(f.model, f.pk_con.bytes, f.pp);
    CHECK(r0.distance == 0);
    CHECK(r0.passed);

    f.set_distance(size_t(err_n) - 1);
    WatermarkCheckResult r1 = watermark_check(f.model, f.pk_con.bytes, f.pp);
    CHECK(r1.distance == size_t(err_n) - 1);
    CHECK(r1.passed);

    // Exactly err_n corrupted bits fails: the threshold is strict.
    f.set_distance(size_t(err_n));
    WatermarkCheckResult r2 = watermark_check(f.model, f.pk_con.bytes, f.pp);
    CHECK(r2.distance == size_t(err_n));
    CHECK(!r2.passed);
}

TEST_CASE("challenges are 32 bytes and vary per session") {
    std::mt19937_64 rng(2);
    Bytes a = make_challenge(rng);
    Bytes b = make_challenge(rng);
    CHECK(a.size() == 32);
    CHECK(a != b);
}

TEST_CASE("honest client is verified; transcript fields are consistent") {
    Fixture f;
    std::mt19937_64 rng(3);
    Signer signer = honest_signer(f.scheme, f.keys[1].sk, 4);
    VerificationTranscript t =
        verify_ownership(f.model, f.pk_con.bytes, 1, signer, f.pp, rng);
    CHECK(t.verdict == Verdict::owner_verified);
    CHECK(t.wm_pass);
    CHECK(t.sig_pass);
    CHECK(t.distance == 0);
    CHECK(t.pk_index == 1);
    CHECK(t.n == f.pp.n);
    CHECK(t.err_n == f.pp.err_n);
    CHECK(t.model_sha256 == model_param_sha256(f.model));
    CHECK(t.challenge_hex.size() == 64);
}

TEST_CASE("wrong-key signer yields signature_failed") {
    Fixture f;
    std::mt19937_64 rng(4);
    // Client 0's key cannot answer for client 1's pk slot.
    Signer signer = honest_signer(f.scheme, f.keys[0].sk, 4);
    VerificationTranscript t =
        verify_ownership(f.model, f.pk_con.bytes, 1, signer, f.pp, rng);
    CHECK(t.verdict == Verdict::signature_failed);
    CHECK(t.wm_pass);
    CHECK(!t.sig_pass);
}

TEST_CASE("corrupted watermark short-circuits before the challenge") {
    Fixture f;
    f.set_distance(size_t(f.pp.err_n));
    std::mt19937_64 rng(5);
    bool signer_called = false;
    Signer signer = [&](std::span<const uint8_t>) -> Signature {
        signer_called = true;
        throw std::logic_error("must not be reached");
    };
    VerificationTranscript t =
        verify_ownership(f.model, f.pk_con.bytes, 0, signer, f.pp, rng);
    CHECK(t.verdict == Verdict::watermark_check_failed);
    CHECK(!signer_called);
    CHECK(t.challenge_hex.empty());
    CHECK(!t.sig_pass);
}

TEST_CASE("out-of-range client index and malformed pk_con are errors") {
    Fixture f;
    std::mt19937_64 rng(6);
    Signer signer = honest_signer(f.scheme, f.keys[0].sk, 4);
    CHECK_THROWS_AS(
        verify_ownership(f.model, f.pk_con.bytes, 3, signer, f.pp, rng),
        std::out_of_range);
    Bytes truncated(f.pk_con.bytes.begin(), f.pk_con.bytes.end() - 1);
    CHECK_THROWS_AS(verify_ownership(f.model, truncated, 0, signer, f.pp, rng),
                    MalformedEncoding);
}

TEST_CASE("transcript json round trips byte for byte") {
    Fixture f;
    std::mt19937_64 rng(7);
    Signer signer = honest_signer(f.scheme, f.keys[2].sk, 9);
    VerificationTranscript t =
        verify_ownership(f.model, f.pk_con.bytes, 2, signer, f.pp, rng);
    std::string text = t.to_json();
    VerificationTranscript back = VerificationTranscript::from_json(text);
    CHECK(back.to_json() == text);
    CHECK(back.session_id == t.session_id);
    CHECK(back.verdict == t.verdict);
}

TEST_CASE("offline re-verification accepts honest transcripts only") {
    Fixture f;
    std::mt19937_64 rng(8);
    Signer signer = honest_signer(f.scheme, f.keys[0].sk, 10);
    VerificationTranscript t =
        verify_ownership(f.model, f.pk_con.bytes, 0, signer, f.pp, rng);
    CHECK(reverify_transcript(t, f.model, f.pk_con.bytes, f.pp));

    // Tampered verdict is caught.
    VerificationTranscript bad = t;
    bad.verdict = Verdict::signature_failed;
    CHECK(!reverify_transcript(bad, f.model, f.pk_con.bytes, f.pp));

    // Tampered distance is caught.
    bad = t;
    bad.distance += 1;
    CHECK(!reverify_transcript(bad, f.model, f.pk_con.bytes, f.pp));

    // A different model no longer matches the transcript hash.
    ToyModel other = f.model;
    other.gamma(0) += 1e-3;
    CHECK(!reverify_transcript(t, other, f.pk_con.bytes, f.pp));

    // A spliced signature from another session fails.
    std::mt19937_64 rng2(9);
    VerificationTranscript t2 =
        verify_ownership(f.model, f.pk_con.bytes, 0, signer, f.pp, rng2);
    bad = t;
    bad.sig_s_hex = t2.sig_s_hex;
    bad.sig_r_hex = t2.sig_r_hex;
    CHECK(!reverify_transcript(bad, f.model, f.pk_con.bytes, f.pp));
}

TEST_CASE("failed-watermark transcripts also re-verify") {
    Fixture f;
    f.set_distance(size_t(f.pp.err_n) + 3);
    std::mt19937_64 rng(11);
    Signer signer = honest_signer(f.scheme, f.keys[0].sk, 12);
    VerificationTranscript t =
        verify_ownership(f.model, f.pk_con.bytes, 0, signer, f.pp, rng);
    CHECK(t.verdict == Verdict::watermark_check_failed);
    CHECK(reverify_transcript(t, f.model, f.pk_con.bytes, f.pp));
}
