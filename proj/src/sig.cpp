#include "fedsov/sig.hpp"

#include <stdexcept>

namespace fedsov {

const char* curve_name(CurveId id) {
    return id == CurveId::desk_toy ? "desk_toy" : "production_curve";
}

CurveId curve_from_name(const std::string& name) {
    if (name == "desk_toy") return CurveId::desk_toy;
    if (name == "production_curve") return CurveId::production_curve;
    throw std::invalid_argument("unknown curve id: " + name);
}

namespace desk {

uint32_t pow_mod(uint32_t base, uint64_t exp, uint32_t modulus) {
    uint64_t result = 1;
    uint64_t b = base % modulus;
    while (exp > 0) {
        if (exp & 1) result = result * b % modulus;
        b = b * b % modulus;
        exp >>= 1;
    }
    return static_cast<uint32_t>(result);
}

uint32_t dlog(const Params& params, uint32_t element) {
    uint64_t acc = 1;
    for (uint32_t k = 0; k < params.order; ++k) {
        if (acc == element) return k;
        acc = acc * params.g % params.modulus;
    }
    throw std::domain_error("dlog: element not in the generated subgroup");
}

}  // namespace desk

namespace {

constexpr uint32_t kDeskModulus = 12109;  // prime, 12109 = 12 * 1009 + 1
constexpr uint32_t kDeskOrder = 1009;

mpz_class mpz_from_rng(std::mt19937_64& rng, size_t words) {
    mpz_class acc = 0;
    for (size_t i = 0; i < words; ++i) {
        acc <<= 64;
        acc += mpz_class(static_cast<unsigned long>(rng() >> 32)) << 32 |
               mpz_class(static_cast<unsigned long>(rng() & 0xffffffffu));
    }
    return acc;
}

}  // namespace

const desk::Params& SignatureScheme::desk_params() const {
    if (curve_ != CurveId::desk_toy)
        throw std::logic_error("desk_params on production backend");
    return desk_;
}

SignatureScheme SignatureScheme::setup(CurveId id, std::optional<uint64_t> seed) {
    SignatureScheme scheme;
    scheme.curve_ = id;
    if (id == CurveId::desk_toy) {
        scheme.order_ = kDeskOrder;
        uint32_t cofactor_exp = (kDeskModulus - 1) / kDeskOrder;
        // Deterministic generator search; the seed picks the starting candidate.
        uint32_t candidate = 2 + static_cast<uint32_t>(seed.value_or(0) % 50);
        uint32_t g = 1;
        while (g == 1) {
            g = desk::pow_mod(candidate, cofactor_exp, kDeskModulus);
            ++candidate;
        }
        scheme.desk_ = desk::Params{kDeskModulus, kDeskOrder, g};
    } else {
        scheme.order_ = bls381::group_order();
        scheme.desk_ = desk::Params{0, 0, 0};
    }
    return scheme;
}

mpz_class SignatureScheme::random_unit_scalar(std::mt19937_64& rng) const {
    // Rejection-free: 2x oversampled modular reduction, then resample zeros.
    size_t words = curve_ == CurveId::desk_toy ? 1 : 8;
    while (true) {
        mpz_class v = mpz_from_rng(rng, words) % order_;
        if (v != 0) return v;
    }
}

KeyPair SignatureScheme::keypair_from_scalars(const mpz_class& x,
                                              const mpz_class& y) const {
    if (x < 1 || x >= order_ || y < 1 || y >= order_)
        throw std::invalid_argument("secret scalars must lie in [1, p-1]");
    KeyPair kp;
    kp.sk = SecretKey{x, y};
    if (curve_ == CurveId::desk_toy) {
        kp.pk.value = DeskPk{desk::pow_mod(desk_.g, x.get_ui(), desk_.modulus),
                             desk::pow_mod(desk_.g, y.get_ui(), desk_.modulus)};
    } else {
        const bls381::G2& g2 = bls381::G2::generator();
        kp.pk.value = BlsPk{bls381::scalar_mul(g2, x), bls381::scalar_mul(g2, y)};
    }
    return kp;
}

KeyPair SignatureScheme::keygen(std::mt19937_64& rng) const {
    return keypair_from_scalars(random_unit_scalar(rng), random_unit_scalar(rng));
}

Signature SignatureScheme::sign_with_r(const mpz_class& m, const SecretKey& sk,
                                       mpz_class r, std::mt19937_64& rng) const {
    if (m < 0 || m >= order_)
        throw std::invalid_argument("message scalar out of range");
    mpz_class denom;
    while (true) {
        denom = (sk.x + m + sk.y * r) % order_;
        if (denom != 0 && r != 0) break;
        r = random_unit_scalar(rng);
    }
    mpz_class exp;
    if (mpz_invert(exp.get_mpz_t(), denom.get_mpz_t(), order_.get_mpz_t()) == 0)
        throw std::logic_error("unreachable: nonzero denominator not invertible");
    Signature sig;
    sig.r = r;
    if (curve_ == CurveId::desk_toy) {
        sig.s = desk::pow_mod(desk_.g, exp.get_ui(), desk_.modulus);
    } else {
        sig.s = bls381::scalar_mul(bls381::G1::generator(), exp);
    }
    return sig;
}

Signature SignatureScheme::sign(const mpz_class& m, const SecretKey& sk,
                                std::mt19937_64& rng) const {
    return sign_with_r(m, sk, random_unit_scalar(rng), rng);
}

bool SignatureScheme::verify(const mpz_class& m, const Signature& sig,
                             const PublicKey& pk) const {
    if (m < 0 || m >= order_ || sig.r < 1 || sig.r >= order_) return false;
    if (curve_ == CurveId::desk_toy) {
        const auto* dpk = std::get_if<DeskPk>(&pk.value);
        const auto* s = std::get_if<uint32_t>(&sig.s);
        if (!dpk || !s) throw MalformedEncoding("backend mismatch in verify");
        // e(s, u g^m v^r) == e(g, g) checked in the exponent group:
        // dlog(s) * (x + m + y r) == 1 mod p.
        uint64_t combined = static_cast<uint64_t>(dpk->u) *
                            desk::pow_mod(desk_.g, m.get_ui(), desk_.modulus) %
                            desk_.modulus;
        combined = combined *
                   desk::pow_mod(dpk->v, sig.r.get_ui(), desk_.modulus) %
                   desk_.modulus;
        uint32_t left_log, right_log;
        try {
            left_log = desk::dlog(desk_, *s);
            right_log = desk::dlog(desk_, static_cast<uint32_t>(combined));
        } catch (const std::domain_error&) {
            return false;  // element outside the prime-order subgroup
        }
        return static_cast<uint64_t>(left_log) * right_log % desk_.order == 1;
    }
    const auto* bpk = std::get_if<BlsPk>(&pk.value);
    const auto* s = std::get_if<bls381::G1>(&sig.s);
    if (!bpk || !s) throw MalformedEncoding("backend mismatch in verify");
    if (s->infinity) return false;
    const bls381::G2& g2 = bls381::G2::generator();
    // Type-3 layout: s in G1; u, v, g in G2.
    bls381::G2 combined = bls381::add(
        bls381::add(bpk->u, bls381::scalar_mul(g2, m)),
        bls381::scalar_mul(bpk->v, sig.r));
    bls381::Fp12 lhs = bls381::pairing(*s, combined);
    static const bls381::Fp12 rhs =
        bls381::pairing(bls381::G1::generator(), bls381::G2::generator());
    return lhs == rhs;
}

size_t SignatureScheme::pk_length_bytes() const {
    return curve_ == CurveId::desk_toy ? 4 : 384;
}

size_t SignatureScheme::sig_length_bytes() const {
    return curve_ == CurveId::desk_toy ? 4 : 128;
}

Bytes SignatureScheme::encode_pk(const PublicKey& pk) const {
    Bytes out;
    if (curve_ == CurveId::desk_toy) {
        const auto& d = std::get<DeskPk>(pk.value);
        out = {static_cast<uint8_t>(d.u >> 8), static_cast<uint8_t>(d.u & 0xff),
               static_cast<uint8_t>(d.v >> 8), static_cast<uint8_t>(d.v & 0xff)};
    } else {
        const auto& b = std::get<BlsPk>(pk.value);
        auto eu = bls381::encode_g2(b.u);
        auto ev = bls381::encode_g2(b.v);
        out.assign(eu.begin(), eu.end());
        out.insert(out.end(), ev.begin(), ev.end());
    }
    return out;
}

PublicKey SignatureScheme::decode_pk(std::span<const uint8_t> bytes) const {
    if (bytes.size() != pk_length_bytes())
        throw MalformedEncoding("public key encoding has wrong length");
    PublicKey pk;
    if (curve_ == CurveId::desk_toy) {
        uint32_t u = static_cast<uint32_t>(bytes[0]) << 8 | bytes[1];
        uint32_t v = static_cast<uint32_t>(bytes[2]) << 8 | bytes[3];
        if (u == 0 || u >= desk_.modulus || v == 0 || v >= desk_.modulus)
            throw MalformedEncoding("desk public key element out of range");
        if (desk::pow_mod(u, desk_.order, desk_.modulus) != 1 ||
            desk::pow_mod(v, desk_.order, desk_.modulus) != 1)
            throw MalformedEncoding("desk public key outside the subgroup");
        pk.value = DeskPk{u, v};
    } else {
        pk.value = BlsPk{bls381::decode_g2(bytes.subspan(0, 192)),
                         bls381::decode_g2(bytes.subspan(192, 192))};
    }
    return pk;
}

Bytes SignatureScheme::encode_sig(const Signature& sig) const {
    Bytes out;
    if (curve_ == CurveId::desk_toy) {
        uint32_t s = std::get<uint32_t>(sig.s);
        uint32_t r = static_cast<uint32_t>(sig.r.get_ui());
        out = {static_cast<uint8_t>(s >> 8), static_cast<uint8_t>(s & 0xff),
               static_cast<uint8_t>(r >> 8), static_cast<uint8_t>(r & 0xff)};
    } else {
        auto es = bls381::encode_g1(std::get<bls381::G1>(sig.s));
        out.assign(es.begin(), es.end());
        Bytes rbuf(32, 0);
        size_t count = 0;
        mpz_export(rbuf.data(), &count, 1, 1, 1, 0, sig.r.get_mpz_t());
        out.insert(out.end(), 32 - count, 0);
        out.insert(out.end(), rbuf.begin(), rbuf.begin() + count);
    }
    return out;
}

Signature SignatureScheme::decode_sig(std::span<const uint8_t> bytes) const {
    if (bytes.size() != sig_length_bytes())
        throw MalformedEncoding("signature encoding has wrong length");
    Signature sig;
    if (curve_ == CurveId::desk_toy) {
        uint32_t s = static_cast<uint32_t>(bytes[0]) << 8 | bytes[1];
        uint32_t r = static_cast<uint32_t>(bytes[2]) << 8 | bytes[3];
        if (s == 0 || s >= desk_.modulus)
            throw MalformedEncoding("desk signature element out of range");
        if (desk::pow_mod(s, desk_.order, desk_.modulus) != 1)
            throw MalformedEncoding("desk signature element outside the subgroup");
        if (r == 0 || r >= desk_.order)
            throw MalformedEncoding("signature randomness out of range");
        sig.s = s;
        sig.r = r;
    } else {
        sig.s = bls381::decode_g1(bytes.subspan(0, 96));
        mpz_class r;
        mpz_import(r.get_mpz_t(), 32, 1, 1, 1, 0, bytes.data() + 96);
        if (r == 0 || r >= order_)
            throw MalformedEncoding("signature randomness out of range");
        sig.r = r;
    }
    return sig;
}

mpz_class SignatureScheme::hash_to_scalar(std::span<const uint8_t> message) const {
    Bytes digest = shake256("FEDSOV-SIG-v1", message, 64);
    mpz_class v;
    mpz_import(v.get_mpz_t(), digest.size(), 1, 1, 1, 0, digest.data());
    return v % order_;
}

}  // namespace fedsov
