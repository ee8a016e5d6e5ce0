#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace synimp {

// FNV-1a, 64-bit. Feature hashing and seed tags depend on this exact
// function; changing it changes every trained model and derived seed.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Lowercase hex SHA-256 of the bytes of `s`.
std::string sha256_hex(std::string_view s);

}  // namespace synimp
