#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "fedsov/bytes.hpp"

namespace fedsov {

struct LengthMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Fixed-length bit vector backed by packed bytes. Bit i lives at bit
// (i mod 8) of byte floor(i/8), little-endian within a byte.
class Watermark {
public:
    Watermark() = default;
    explicit Watermark(size_t n) : n_(n), bytes_((n + 7) / 8, 0) {}
    Watermark(size_t n, Bytes packed);

    size_t size() const { return n_; }
    int bit(size_t i) const { return (bytes_[i / 8] >> (i % 8)) & 1; }
    void set_bit(size_t i, int value);
    void flip_bit(size_t i);

    const Bytes& packed() const { return bytes_; }
    std::string bits_hex() const { return to_hex(bytes_); }

    Watermark complement() const;

    bool operator==(const Watermark& other) const = default;

private:
    size_t n_ = 0;
    Bytes bytes_;
};

// First n bits of SHAKE-256("FEDSOV-WM-v1" || input).
Watermark generate_watermark(std::span<const uint8_t> pk_con, size_t n);

// Uniformly random n-bit string.
Watermark random_watermark(size_t n, std::mt19937_64& rng);

size_t hamming_distance(const Watermark& a, const Watermark& b);
size_t detection_errors(const Watermark& h, const Watermark& h_prime);
double detection_rate(const Watermark& h, const Watermark& h_prime);
bool is_near_collision(const Watermark& a, const Watermark& b, size_t n_prime);

// Fraction of trials in which a fresh uniform n-bit string lands within
// Hamming distance n_prime of a fixed random target.
double near_collision_frequency(size_t n, size_t n_prime, size_t trials,
                                std::mt19937_64& rng);

// Ordered concatenation of canonical public-key encodings.
struct ConcatenatedKey {
    std::vector<Bytes> client_pks;
    Bytes bytes;

    static ConcatenatedKey from_pks(std::vector<Bytes> pks);
};

}  // namespace fedsov
