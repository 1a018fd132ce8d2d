#include "fedsov/watermark.hpp"

#include <bit>

namespace fedsov {

Watermark::Watermark(size_t n, Bytes packed) : n_(n), bytes_(std::move(packed)) {
    if (bytes_.size() != (n + 7) / 8)
        throw MalformedEncoding("packed watermark has wrong byte length");
    // Trailing pad bits must be zero so equality on bytes is equality on bits.
    if (n % 8 != 0) {
        uint8_t pad_mask = static_cast<uint8_t>(0xff << (n % 8));
        if (bytes_.back() & pad_mask)
            throw MalformedEncoding("nonzero padding bits in watermark");
    }
}

void Watermark::set_bit(size_t i, int value) {
    uint8_t mask = static_cast<uint8_t>(1u << (i % 8));
    if (value)
        bytes_[i / 8] |= mask;
    else
        bytes_[i / 8] &= static_cast<uint8_t>(~mask);
}

void Watermark::flip_bit(size_t i) {
    bytes_[i / 8] ^= static_cast<uint8_t>(1u << (i % 8));
}

Watermark Watermark::complement() const {
    Watermark out(n_);
    for (size_t i = 0; i < bytes_.size(); ++i)
        out.bytes_[i] = static_cast<uint8_t>(~bytes_[i]);
    if (n_ % 8 != 0)
        out.bytes_.back() &= static_cast<uint8_t>(0xff >> (8 - n_ % 8));
    return out;
}

Watermark generate_watermark(std::span<const uint8_t> pk_con, size_t n) {
    if (n < 8) throw std::invalid_argument("watermark length must be >= 8");
    if (n > (1u << 20)) throw std::invalid_argument("watermark length too large");
    Bytes digest = shake256("FEDSOV-WM-v1", pk_con, (n + 7) / 8);
    if (n % 8 != 0)
        digest.back() &= static_cast<uint8_t>(0xff >> (8 - n % 8));
    return Watermark(n, std::move(digest));
}

Watermark random_watermark(size_t n, std::mt19937_64& rng) {
    Watermark out(n);
    for (size_t i = 0; i < n; ++i)
        out.set_bit(i, static_cast<int>(rng() & 1));
    return out;
}

size_t hamming_distance(const Watermark& a, const Watermark& b) {
    if (a.size() != b.size())
        throw LengthMismatch("hamming_distance: watermark lengths differ");
    size_t dist = 0;
    const Bytes& pa = a.packed();
    const Bytes& pb = b.packed();
    for (size_t i = 0; i < pa.size(); ++i)
        dist += static_cast<size_t>(std::popcount(static_cast<uint8_t>(pa[i] ^ pb[i])));
    return dist;
}

size_t detection_errors(const Watermark& h, const Watermark& h_prime) {
    return hamming_distance(h, h_prime);
}

double detection_rate(const Watermark& h, const Watermark& h_prime) {
    size_t err = detection_errors(h, h_prime);
    return 1.0 - static_cast<double>(err) / static_cast<double>(h.size());
}

bool is_near_collision(const Watermark& a, const Watermark& b, size_t n_prime) {
    if (n_prime > a.size())
        throw std::invalid_argument("near-collision radius exceeds bit length");
    return hamming_distance(a, b) <= n_prime;
}

double near_collision_frequency(size_t n, size_t n_prime, size_t trials,
                                std::mt19937_64& rng) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    Watermark target = random_watermark(n, rng);
    size_t hits = 0;
    for (size_t t = 0; t < trials; ++t) {
        Watermark candidate = random_watermark(n, rng);
        if (hamming_distance(candidate, target) <= n_prime) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

ConcatenatedKey ConcatenatedKey::from_pks(std::vector<Bytes> pks) {
    if (pks.empty())
        throw std::invalid_argument("pk_con requires at least one public key");
    ConcatenatedKey out;
    out.client_pks = std::move(pks);
    for (const Bytes& pk : out.client_pks)
        out.bytes.insert(out.bytes.end(), pk.begin(), pk.end());
    return out;
}

}  // namespace fedsov
