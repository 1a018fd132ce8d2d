#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <variant>

#include "fedsov/bls381.hpp"
#include "fedsov/bytes.hpp"

namespace fedsov {

enum class CurveId { desk_toy, production_curve };

const char* curve_name(CurveId id);
CurveId curve_from_name(const std::string& name);

// Insecure small-group backend: the order-1009 subgroup of Z_12109^*.
// The pairing is realized by brute-force discrete logs, so every group
// law is exhaustively checkable.
namespace desk {
struct Params {
    uint32_t modulus;    // prime, order * k + 1
    uint32_t order;      // prime subgroup order (1009)
    uint32_t g;          // generator of the order-`order` subgroup
};
uint32_t pow_mod(uint32_t base, uint64_t exp, uint32_t modulus);
uint32_t dlog(const Params& params, uint32_t element);  // brute force
}  // namespace desk

struct DeskPk {
    uint32_t u, v;
    bool operator==(const DeskPk&) const = default;
};
struct BlsPk {
    bls381::G2 u, v;
    bool operator==(const BlsPk&) const = default;
};

struct PublicKey {
    std::variant<DeskPk, BlsPk> value;
    bool operator==(const PublicKey&) const = default;
};

struct SecretKey {
    mpz_class x, y;
};

struct KeyPair {
    SecretKey sk;
    PublicKey pk;
};

struct Signature {
    std::variant<uint32_t, bls381::G1> s;  // group element
    mpz_class r;                           // signature randomness in Z_p^*
};

// Short signature scheme: sk=(x,y), pk=(u,v)=(g^x,g^y),
// sign(m) = (g^{1/(x+m+y r)}, r), verify: e(s, u g^m v^r) == e(g, g).
class SignatureScheme {
public:
    static SignatureScheme setup(CurveId id, std::optional<uint64_t> seed = {});

    CurveId curve() const { return curve_; }
    const mpz_class& order() const { return order_; }
    const desk::Params& desk_params() const;

    KeyPair keygen(std::mt19937_64& rng) const;
    // Deterministic key derivation from explicit scalars (x, y in [1, p-1]).
    KeyPair keypair_from_scalars(const mpz_class& x, const mpz_class& y) const;

    Signature sign(const mpz_class& m, const SecretKey& sk,
                   std::mt19937_64& rng) const;
    // Forced-randomness variant; resamples from rng if the denominator
    // x + m + y*r vanishes mod p.
    Signature sign_with_r(const mpz_class& m, const SecretKey& sk, mpz_class r,
                          std::mt19937_64& rng) const;
    bool verify(const mpz_class& m, const Signature& sig, const PublicKey& pk) const;

    size_t pk_length_bytes() const;
    size_t sig_length_bytes() const;
    Bytes encode_pk(const PublicKey& pk) const;
    PublicKey decode_pk(std::span<const uint8_t> bytes) const;
    Bytes encode_sig(const Signature& sig) const;
    Signature decode_sig(std::span<const uint8_t> bytes) const;

    // Domain-separated map of an arbitrary byte message into Z_p.
    mpz_class hash_to_scalar(std::span<const uint8_t> message) const;

    // Uniform scalar in [1, p-1].
    mpz_class random_unit_scalar(std::mt19937_64& rng) const;

private:
    CurveId curve_;
    mpz_class order_;
    desk::Params desk_;
};

}  // namespace fedsov
