#include "fedsov/bls381.hpp"

#include <algorithm>
#include <stdexcept>

#include "fedsov/bytes.hpp"

namespace fedsov::bls381 {

namespace {

const mpz_class kP(
    "1a0111ea397fe69a4b1ba7b6434bacd764774b84f38512bf6730d2a0f6b0f624"
    "1eabfffeb153ffffb9feffffffffaaab",
    16);
const mpz_class kR(
    "73eda753299d7d483339d80809a1d80553bda402fffe5bfeffffffff00000001", 16);

mpz_class mod(const mpz_class& a) {
    mpz_class r = a % kP;
    if (r < 0) r += kP;
    return r;
}

mpz_class fp_inv(const mpz_class& a) {
    mpz_class out;
    if (mpz_invert(out.get_mpz_t(), a.get_mpz_t(), kP.get_mpz_t()) == 0)
        throw std::domain_error("fp_inv: element not invertible");
    return out;
}

}  // namespace

const mpz_class& field_modulus() { return kP; }
const mpz_class& group_order() { return kR; }

// ---- Fp2 ----

Fp2 add(const Fp2& a, const Fp2& b) { return {mod(a.c0 + b.c0), mod(a.c1 + b.c1)}; }
Fp2 sub(const Fp2& a, const Fp2& b) { return {mod(a.c0 - b.c0), mod(a.c1 - b.c1)}; }
Fp2 neg(const Fp2& a) { return {mod(-a.c0), mod(-a.c1)}; }

Fp2 mul(const Fp2& a, const Fp2& b) {
    return {mod(a.c0 * b.c0 - a.c1 * b.c1), mod(a.c0 * b.c1 + a.c1 * b.c0)};
}

Fp2 square(const Fp2& a) { return mul(a, a); }

Fp2 inverse(const Fp2& a) {
    mpz_class norm_inv = fp_inv(mod(a.c0 * a.c0 + a.c1 * a.c1));
    return {mod(a.c0 * norm_inv), mod(-a.c1 * norm_inv)};
}

Fp2 mul_by_xi(const Fp2& a) {
    // (c0 + c1 u)(1 + u) = (c0 - c1) + (c0 + c1) u
    return {mod(a.c0 - a.c1), mod(a.c0 + a.c1)};
}

// ---- Fp6 ----

Fp6 add(const Fp6& a, const Fp6& b) {
    return {add(a.c0, b.c0), add(a.c1, b.c1), add(a.c2, b.c2)};
}

Fp6 sub(const Fp6& a, const Fp6& b) {
    return {sub(a.c0, b.c0), sub(a.c1, b.c1), sub(a.c2, b.c2)};
}

Fp6 mul(const Fp6& a, const Fp6& b) {
    Fp2 t00 = mul(a.c0, b.c0);
    Fp2 t01 = mul(a.c0, b.c1);
    Fp2 t02 = mul(a.c0, b.c2);
    Fp2 t10 = mul(a.c1, b.c0);
    Fp2 t11 = mul(a.c1, b.c1);
    Fp2 t12 = mul(a.c1, b.c2);
    Fp2 t20 = mul(a.c2, b.c0);
    Fp2 t21 = mul(a.c2, b.c1);
    Fp2 t22 = mul(a.c2, b.c2);
    return {add(t00, mul_by_xi(add(t12, t21))),
            add(add(t01, t10), mul_by_xi(t22)),
            add(add(t02, t11), t20)};
}

Fp6 mul_by_v(const Fp6& a) {
    // (c0 + c1 v + c2 v^2) * v = xi c2 + c0 v + c1 v^2
    return {mul_by_xi(a.c2), a.c0, a.c1};
}

Fp6 inverse(const Fp6& a) {
    Fp2 A = sub(square(a.c0), mul_by_xi(mul(a.c1, a.c2)));
    Fp2 B = sub(mul_by_xi(square(a.c2)), mul(a.c0, a.c1));
    Fp2 C = sub(square(a.c1), mul(a.c0, a.c2));
    Fp2 t = add(mul(a.c0, A), mul_by_xi(add(mul(a.c2, B), mul(a.c1, C))));
    Fp2 t_inv = inverse(t);
    return {mul(A, t_inv), mul(B, t_inv), mul(C, t_inv)};
}

// ---- Fp12 ----

Fp12 mul(const Fp12& a, const Fp12& b) {
    Fp6 aa = mul(a.c0, b.c0);
    Fp6 bb = mul(a.c1, b.c1);
    return {add(aa, mul_by_v(bb)), add(mul(a.c0, b.c1), mul(a.c1, b.c0))};
}

Fp12 square(const Fp12& a) { return mul(a, a); }

Fp12 inverse(const Fp12& a) {
    Fp6 t = sub(mul(a.c0, a.c0), mul_by_v(mul(a.c1, a.c1)));
    Fp6 t_inv = inverse(t);
    Fp6 neg_c1 = sub(Fp6::zero(), a.c1);
    return {mul(a.c0, t_inv), mul(neg_c1, t_inv)};
}

Fp12 pow(const Fp12& a, const mpz_class& e) {
    if (e < 0) return pow(inverse(a), -e);
    Fp12 result = Fp12::one();
    size_t nbits = mpz_sizeinbase(e.get_mpz_t(), 2);
    if (e == 0) return result;
    for (size_t i = nbits; i-- > 0;) {
        result = square(result);
        if (mpz_tstbit(e.get_mpz_t(), i)) result = mul(result, a);
    }
    return result;
}

// ---- G1 ----

const G1& G1::generator() {
    static const G1 g{
        mpz_class("17f1d3a73197d7942695638c4fa9ac0fc3688c4f9774b905a14e3a3f171bac58"
                  "6c55e83ff97a1aeffb3af00adb22c6bb",
                  16),
        mpz_class("08b3f481e3aaa0f1a09e30ed741d8ae4fcf5e095d5d00af600db18cb2c04b3ed"
                  "d03cc744a2888ae40caa232946c5e7e1",
                  16),
        false};
    return g;
}

G1 neg(const G1& a) {
    if (a.infinity) return a;
    return {a.x, mod(-a.y), false};
}

G1 add(const G1& a, const G1& b) {
    if (a.infinity) return b;
    if (b.infinity) return a;
    if (a.x == b.x) {
        if (mod(a.y + b.y) == 0) return G1::identity();
        // doubling
        mpz_class lambda = mod(3 * a.x * a.x * fp_inv(mod(2 * a.y)));
        mpz_class x3 = mod(lambda * lambda - 2 * a.x);
        mpz_class y3 = mod(lambda * (a.x - x3) - a.y);
        return {x3, y3, false};
    }
    mpz_class lambda = mod((b.y - a.y) * fp_inv(mod(b.x - a.x)));
    mpz_class x3 = mod(lambda * lambda - a.x - b.x);
    mpz_class y3 = mod(lambda * (a.x - x3) - a.y);
    return {x3, y3, false};
}

G1 scalar_mul(const G1& p, const mpz_class& k) {
    mpz_class e = k % kR;
    if (e < 0) e += kR;
    G1 result = G1::identity();
    size_t nbits = mpz_sizeinbase(e.get_mpz_t(), 2);
    if (e == 0) return result;
    for (size_t i = nbits; i-- > 0;) {
        result = add(result, result);
        if (mpz_tstbit(e.get_mpz_t(), i)) result = add(result, p);
    }
    return result;
}

bool on_curve(const G1& p) {
    if (p.infinity) return true;
    return mod(p.y * p.y - p.x * p.x * p.x - 4) == 0;
}

bool in_subgroup(const G1& p) { return scalar_mul(p, kR).infinity; }

// ---- G2 (on the M-twist y^2 = x^3 + 4(1+u)) ----

const G2& G2::generator() {
    static const G2 g{
        Fp2{mpz_class("024aa2b2f08f0a91260805272dc51051c6e47ad4fa403b02b4510b647a"
                      "e3d1770bac0326a805bbefd48056c8c121bdb8",
                      16),
            mpz_class("13e02b6052719f607dacd3a088274f65596bd0d09920b61ab5da61bbdc"
                      "7f5049334cf11213945d57e5ac7d055d042b7e",
                      16)},
        Fp2{mpz_class("0ce5d527727d6e118cc9cdc6da2e351aadfd9baa8cbdd3a76d429a6951"
                      "60d12c923ac9cc3baca289e193548608b82801",
                      16),
            mpz_class("0606c4a02ea734cc32acd2b02bc28b99cb3e287e85a763af267492ab57"
                      "2e99ab3f370d275cec1da1aaa9075ff05f79be",
                      16)},
        false};
    return g;
}

G2 neg(const G2& a) {
    if (a.infinity) return a;
    return {a.x, neg(a.y), false};
}

G2 add(const G2& a, const G2& b) {
    if (a.infinity) return b;
    if (b.infinity) return a;
    if (a.x == b.x) {
        if (add(a.y, b.y).is_zero()) return G2::identity();
        Fp2 three_x2 = mul(Fp2{3, 0}, square(a.x));
        Fp2 lambda = mul(three_x2, inverse(mul(Fp2{2, 0}, a.y)));
        Fp2 x3 = sub(square(lambda), mul(Fp2{2, 0}, a.x));
        Fp2 y3 = sub(mul(lambda, sub(a.x, x3)), a.y);
        return {x3, y3, false};
    }
    Fp2 lambda = mul(sub(b.y, a.y), inverse(sub(b.x, a.x)));
    Fp2 x3 = sub(sub(square(lambda), a.x), b.x);
    Fp2 y3 = sub(mul(lambda, sub(a.x, x3)), a.y);
    return {x3, y3, false};
}

G2 scalar_mul(const G2& p, const mpz_class& k) {
    mpz_class e = k % kR;
    if (e < 0) e += kR;
    G2 result = G2::identity();
    size_t nbits = mpz_sizeinbase(e.get_mpz_t(), 2);
    if (e == 0) return result;
    for (size_t i = nbits; i-- > 0;) {
        result = add(result, result);
        if (mpz_tstbit(e.get_mpz_t(), i)) result = add(result, p);
    }
    return result;
}

bool on_curve(const G2& p) {
    if (p.infinity) return true;
    Fp2 rhs = add(mul(square(p.x), p.x), mul_by_xi(Fp2{4, 0}));
    return square(p.y) == rhs;
}

bool in_subgroup(const G2& p) { return scalar_mul(p, kR).infinity; }

// ---- Pairing ----

namespace {

Fp12 embed_fp(const mpz_class& s) {
    return {Fp6{Fp2{s, 0}, Fp2::zero(), Fp2::zero()}, Fp6::zero()};
}

Fp12 sub(const Fp12& a, const Fp12& b) {
    return {bls381::sub(a.c0, b.c0), bls381::sub(a.c1, b.c1)};
}

Fp12 fp12_scale(const Fp12& a, const mpz_class& s) {
    auto sc2 = [&](const Fp2& c) { return Fp2{mod(c.c0 * s), mod(c.c1 * s)}; };
    auto sc6 = [&](const Fp6& c) { return Fp6{sc2(c.c0), sc2(c.c1), sc2(c.c2)}; };
    return {sc6(a.c0), sc6(a.c1)};
}

// Untwist (x', y') on E' into E(Fp12): X = x' v^2 / xi, Y = (y'/xi) v w.
// Then Y^2 = X^3 + 4 holds because w^2 = v and v^3 = xi.
void untwist(const G2& q, Fp12& x_out, Fp12& y_out) {
    Fp2 inv_xi = inverse(mul_by_xi(Fp2::one()));
    Fp2 xs = mul(q.x, inv_xi);
    Fp2 ys = mul(q.y, inv_xi);
    x_out = {Fp6{Fp2::zero(), Fp2::zero(), xs}, Fp6::zero()};
    y_out = {Fp6::zero(), Fp6{Fp2::zero(), ys, Fp2::zero()}};
}

const mpz_class& final_exponent() {
    // (p^12 - 1) / r
    static const mpz_class e = [] {
        mpz_class p12;
        mpz_pow_ui(p12.get_mpz_t(), kP.get_mpz_t(), 12);
        return mpz_class((p12 - 1) / kR);
    }();
    return e;
}

}  // namespace

Fp12 pairing(const G1& p, const G2& q) {
    if (p.infinity || q.infinity) return Fp12::one();
    Fp12 xq, yq;
    untwist(q, xq, yq);

    Fp12 f = Fp12::one();
    G1 t = p;
    size_t nbits = mpz_sizeinbase(kR.get_mpz_t(), 2);
    for (size_t i = nbits - 1; i-- > 0;) {
        f = square(f);
        if (!t.infinity) {
            // tangent line at T, evaluated at Q
            mpz_class lambda = mod(3 * t.x * t.x * fp_inv(mod(2 * t.y)));
            Fp12 line = sub(fp12_scale(sub(xq, embed_fp(t.x)), lambda),
                            sub(yq, embed_fp(t.y)));
            f = mul(f, line);
            t = add(t, t);
        }
        if (mpz_tstbit(kR.get_mpz_t(), i)) {
            if (t.infinity) {
                t = p;
            } else if (t.x == p.x && mod(t.y + p.y) == 0) {
                t = G1::identity();  // vertical line, eliminated
            } else {
                mpz_class lambda = mod((t.y - p.y) * fp_inv(mod(t.x - p.x)));
                Fp12 line = sub(fp12_scale(sub(xq, embed_fp(p.x)), lambda),
                                sub(yq, embed_fp(p.y)));
                f = mul(f, line);
                t = add(t, p);
            }
        }
    }
    return pow(f, final_exponent());
}

// ---- Encodings ----

namespace {

void write_fp(uint8_t* out, const mpz_class& v) {
    Bytes buf(48, 0);
    size_t count = 0;
    mpz_export(buf.data(), &count, 1, 1, 1, 0, v.get_mpz_t());
    // right-align big-endian digits in 48 bytes
    std::fill(out, out + 48, 0);
    std::copy(buf.begin(), buf.begin() + count, out + (48 - count));
}

mpz_class read_fp(std::span<const uint8_t> in) {
    mpz_class v;
    mpz_import(v.get_mpz_t(), 48, 1, 1, 1, 0, in.data());
    if (v >= kP) throw MalformedEncoding("field element out of range");
    return v;
}

}  // namespace

std::array<uint8_t, 96> encode_g1(const G1& p) {
    if (p.infinity) throw std::invalid_argument("cannot encode the identity point");
    std::array<uint8_t, 96> out;
    write_fp(out.data(), p.x);
    write_fp(out.data() + 48, p.y);
    return out;
}

G1 decode_g1(std::span<const uint8_t> bytes) {
    if (bytes.size() != 96) throw MalformedEncoding("G1 encoding must be 96 bytes");
    G1 p{read_fp(bytes.subspan(0, 48)), read_fp(bytes.subspan(48, 48)), false};
    if (!on_curve(p)) throw MalformedEncoding("point not on curve");
    if (!in_subgroup(p)) throw MalformedEncoding("point not in prime-order subgroup");
    return p;
}

std::array<uint8_t, 192> encode_g2(const G2& p) {
    if (p.infinity) throw std::invalid_argument("cannot encode the identity point");
    std::array<uint8_t, 192> out;
    write_fp(out.data(), p.x.c1);
    write_fp(out.data() + 48, p.x.c0);
    write_fp(out.data() + 96, p.y.c1);
    write_fp(out.data() + 144, p.y.c0);
    return out;
}

G2 decode_g2(std::span<const uint8_t> bytes) {
    if (bytes.size() != 192) throw MalformedEncoding("G2 encoding must be 192 bytes");
    G2 p{Fp2{read_fp(bytes.subspan(48, 48)), read_fp(bytes.subspan(0, 48))},
         Fp2{read_fp(bytes.subspan(144, 48)), read_fp(bytes.subspan(96, 48))},
         false};
    if (!on_curve(p)) throw MalformedEncoding("point not on twist curve");
    if (!in_subgroup(p)) throw MalformedEncoding("point not in prime-order subgroup");
    return p;
}

}  // namespace fedsov::bls381
