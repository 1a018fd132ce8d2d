#include "doctest.h"

#include <random>

#include "fedsov/watermark.hpp"

using namespace fedsov;

namespace {

// Oracle: per-bit loop, no popcount tricks.
size_t naive_hamming(const Watermark& a, const Watermark& b) {
    size_t d = 0;
    for (size_t i = 0; i < a.size(); ++i)
        if (a.bit(i) != b.bit(i)) ++d;
    return d;
}

}  // namespace

TEST_CASE("bit layout is little-endian within a byte") {
    Watermark wm(16);
    wm.set_bit(0, 1);
    wm.set_bit(3, 1);
    wm.set_bit(9, 1);
    CHECK(wm.packed()[0] == 0x09);  // bits 0 and 3
    CHECK(wm.packed()[1] == 0x02);  // bit 9 -> bit 1 of byte 1
    wm.flip_bit(3);
    CHECK(wm.packed()[0] == 0x01);
}

TEST_CASE("construction validates padding bits") {
    CHECK_NOTHROW(Watermark(4, Bytes{0x0f}));
    CHECK_THROWS_AS(Watermark(4, Bytes{0x1f}), MalformedEncoding);  // pad bit set
    CHECK_THROWS_AS(Watermark(9, Bytes{0xff}), MalformedEncoding);  // too few bytes
    CHECK_THROWS_AS(Watermark(8, Bytes{0xff, 0x00}), MalformedEncoding);
}

TEST_CASE("hamming distance matches the bit-loop oracle") {
    std::mt19937_64 rng(7);
    for (size_t n : {1u, 7u, 8u, 9u, 64u, 255u, 256u, 1000u}) {
        Watermark a = random_watermark(n, rng);
        Watermark b = random_watermark(n, rng);
        CHECK(hamming_distance(a, b) == naive_hamming(a, b));
    }
}

TEST_CASE("hamming distance satisfies the metric axioms") {
    std::mt19937_64 rng(11);
    const size_t n = 200;
    for (int trial = 0; trial < 50; ++trial) {
        Watermark a = random_watermark(n, rng);
        Watermark b = random_watermark(n, rng);
        Watermark c = random_watermark(n, rng);
        size_t ab = hamming_distance(a, b);
        CHECK(hamming_distance(a, a) == 0);
        CHECK(ab == hamming_distance(b, a));                       // symmetry
        CHECK(ab <= hamming_distance(a, c) + hamming_distance(c, b));  // triangle
        if (ab == 0) CHECK(a == b);                                // identity
    }
}

TEST_CASE("single bit flip moves distance by exactly one") {
    std::mt19937_64 rng(13);
    Watermark a = random_watermark(97, rng);
    for (size_t i = 0; i < a.size(); ++i) {
        Watermark b = a;
        b.flip_bit(i);
        CHECK(hamming_distance(a, b) == 1);
    }
}

TEST_CASE("length mismatch is rejected") {
    std::mt19937_64 rng(17);
    Watermark a = random_watermark(64, rng);
    Watermark b = random_watermark(65, rng);
    CHECK_THROWS_AS(hamming_distance(a, b), LengthMismatch);
    CHECK_THROWS_AS(detection_rate(a, b), LengthMismatch);
}

TEST_CASE("detection rate and complement") {
    std::mt19937_64 rng(19);
    Watermark a = random_watermark(128, rng);
    CHECK(detection_rate(a, a) == 1.0);
    CHECK(detection_rate(a, a.complement()) == 0.0);
    Watermark b = a;
    b.flip_bit(5);
    b.flip_bit(77);
    CHECK(detection_errors(a, b) == 2);
    CHECK(detection_rate(a, b) == doctest::Approx(1.0 - 2.0 / 128.0));
}

TEST_CASE("near collision boundary is inclusive") {
    Watermark a(8), b(8);
    b.flip_bit(0);
    b.flip_bit(1);
    CHECK(is_near_collision(a, b, 3));
    CHECK(is_near_collision(a, b, 2));  // distance == n' counts
    CHECK(!is_near_collision(a, b, 1));
}

TEST_CASE("generate_watermark is deterministic and length-prefix consistent") {
    Bytes input{1, 2, 3, 4};
    Watermark w256 = generate_watermark(input, 256);
    CHECK(generate_watermark(input, 256) == w256);
    Watermark w64 = generate_watermark(input, 64);
    for (size_t i = 0; i < 64; ++i) CHECK(w64.bit(i) == w256.bit(i));
    // Different input, different digest.
    Bytes other{1, 2, 3, 5};
    CHECK(generate_watermark(other, 256) != w256);
}

TEST_CASE("generate_watermark matches the domain-tagged shake oracle") {
    std::string input = "fixed test input";
    Watermark wm = generate_watermark(as_span(input), 64);
    // Frozen oracle digest; packed bytes are the raw digest bytes.
    CHECK(wm.bits_hex() == "c8266462bb30dc9c");
}

TEST_CASE("concatenated key preserves order and length") {
    Bytes a{0xaa, 0xbb}, b{0xcc, 0xdd};
    ConcatenatedKey con = ConcatenatedKey::from_pks({a, b});
    CHECK(con.bytes == Bytes{0xaa, 0xbb, 0xcc, 0xdd});
    ConcatenatedKey swapped = ConcatenatedKey::from_pks({b, a});
    CHECK(con.bytes != swapped.bytes);
    // Order changes the hash watermark.
    CHECK(generate_watermark(con.bytes, 128) !=
          generate_watermark(swapped.bytes, 128));
}
