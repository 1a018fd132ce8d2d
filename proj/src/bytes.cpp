#include "fedsov/bytes.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

namespace fedsov {

std::string to_hex(std::span<const uint8_t> data) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

static int nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw MalformedEncoding("invalid hex character");
}

Bytes from_hex(const std::string& hex) {
    if (hex.size() % 2 != 0) throw MalformedEncoding("odd-length hex string");
    Bytes out(hex.size() / 2);
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
    return out;
}

Bytes shake256(std::span<const uint8_t> input, size_t out_len) {
    Bytes out(out_len);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
    EVP_DigestInit_ex(ctx, EVP_shake256(), nullptr);
    EVP_DigestUpdate(ctx, input.data(), input.size());
    EVP_DigestFinalXOF(ctx, out.data(), out.size());
    EVP_MD_CTX_free(ctx);
    return out;
}

Bytes shake256(const std::string& domain_tag, std::span<const uint8_t> input,
               size_t out_len) {
    Bytes out(out_len);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
    EVP_DigestInit_ex(ctx, EVP_shake256(), nullptr);
    EVP_DigestUpdate(ctx, domain_tag.data(), domain_tag.size());
    EVP_DigestUpdate(ctx, input.data(), input.size());
    EVP_DigestFinalXOF(ctx, out.data(), out.size());
    EVP_MD_CTX_free(ctx);
    return out;
}

Bytes sha256(std::span<const uint8_t> input) {
    Bytes out(SHA256_DIGEST_LENGTH);
    SHA256(input.data(), input.size(), out.data());
    return out;
}

}  // namespace fedsov
