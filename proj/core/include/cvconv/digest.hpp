#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace cvconv {

// FNV-1a 64-bit, used for weight digests and report fingerprints.
inline uint64_t fnv1a64(std::span<const uint8_t> bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string to_hex64(uint64_t v);

}  // namespace cvconv
