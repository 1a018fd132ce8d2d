#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedsov {

using Bytes = std::vector<uint8_t>;

std::string to_hex(std::span<const uint8_t> data);
Bytes from_hex(const std::string& hex);

// SHAKE-256 extendable-output digest, out_len bytes.
Bytes shake256(std::span<const uint8_t> input, size_t out_len);
Bytes shake256(const std::string& domain_tag, std::span<const uint8_t> input,
               size_t out_len);

Bytes sha256(std::span<const uint8_t> input);

inline std::span<const uint8_t> as_span(const std::string& s) {
    return {reinterpret_cast<const uint8_t*>(s.data()), s.size()};
}

struct MalformedEncoding : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fedsov
