#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

// BLS12-381 with an affine Tate pairing. Arithmetic is GMP-backed and
// variable-time; this backend targets correctness, not side-channel safety.
namespace fedsov::bls381 {

const mpz_class& field_modulus();  // p, 381 bits
const mpz_class& group_order();    // r, 255 bits

struct Fp2 {
    mpz_class c0, c1;  // c0 + c1*u, u^2 = -1

    static Fp2 zero() { return {0, 0}; }
    static Fp2 one() { return {1, 0}; }
    bool is_zero() const { return c0 == 0 && c1 == 0; }
    bool operator==(const Fp2&) const = default;
};

Fp2 add(const Fp2& a, const Fp2& b);
Fp2 sub(const Fp2& a, const Fp2& b);
Fp2 neg(const Fp2& a);
Fp2 mul(const Fp2& a, const Fp2& b);
Fp2 square(const Fp2& a);
Fp2 inverse(const Fp2& a);
Fp2 mul_by_xi(const Fp2& a);  // multiply by xi = 1 + u

struct Fp6 {
    Fp2 c0, c1, c2;  // c0 + c1*v + c2*v^2, v^3 = xi

    static Fp6 zero() { return {Fp2::zero(), Fp2::zero(), Fp2::zero()}; }
    static Fp6 one() { return {Fp2::one(), Fp2::zero(), Fp2::zero()}; }
    bool is_zero() const { return c0.is_zero() && c1.is_zero() && c2.is_zero(); }
    bool operator==(const Fp6&) const = default;
};

Fp6 add(const Fp6& a, const Fp6& b);
Fp6 sub(const Fp6& a, const Fp6& b);
Fp6 mul(const Fp6& a, const Fp6& b);
Fp6 mul_by_v(const Fp6& a);
Fp6 inverse(const Fp6& a);

struct Fp12 {
    Fp6 c0, c1;  // c0 + c1*w, w^2 = v

    static Fp12 one() { return {Fp6::one(), Fp6::zero()}; }
    bool is_one() const { return c0 == Fp6::one() && c1.is_zero(); }
    bool operator==(const Fp12&) const = default;
};

Fp12 mul(const Fp12& a, const Fp12& b);
Fp12 square(const Fp12& a);
Fp12 inverse(const Fp12& a);
Fp12 pow(const Fp12& a, const mpz_class& e);

struct G1 {
    mpz_class x, y;
    bool infinity = false;

    static G1 identity() { return G1{0, 0, true}; }
    static const G1& generator();
    bool operator==(const G1&) const = default;
};

G1 add(const G1& a, const G1& b);
G1 neg(const G1& a);
G1 scalar_mul(const G1& p, const mpz_class& k);
bool on_curve(const G1& p);          // y^2 = x^3 + 4
bool in_subgroup(const G1& p);       // r*p = O

struct G2 {
    Fp2 x, y;
    bool infinity = false;

    static G2 identity() { return G2{Fp2::zero(), Fp2::zero(), true}; }
    static const G2& generator();
    bool operator==(const G2&) const = default;
};

G2 add(const G2& a, const G2& b);
G2 neg(const G2& a);
G2 scalar_mul(const G2& p, const mpz_class& k);
bool on_curve(const G2& p);          // y^2 = x^3 + 4*(1+u) on the twist
bool in_subgroup(const G2& p);

// Reduced Tate pairing e: G1 x G2 -> GT (subgroup of Fp12*).
// Bilinear and non-degenerate on the r-torsion.
Fp12 pairing(const G1& p, const G2& q);

// Canonical big-endian encodings: 48 bytes per Fp element.
// G1: x||y (96 bytes), G2: x.c1||x.c0||y.c1||y.c0 (192 bytes).
std::array<uint8_t, 96> encode_g1(const G1& p);
G1 decode_g1(std::span<const uint8_t> bytes);  // throws MalformedEncoding
std::array<uint8_t, 192> encode_g2(const G2& p);
G2 decode_g2(std::span<const uint8_t> bytes);

}  // namespace fedsov::bls381
