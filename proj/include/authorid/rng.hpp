#pragma once

#include <cstdint>
#include <string_view>

namespace authorid {

// SplitMix64: tiny, portable, fully specified generator. Every random draw in
// the project flows through this so datasets and training runs reproduce
// bit-for-bit across platforms (std:: distributions are not portable).
class SplitMix64 {
public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n). Modulo bias is below 2^-32 for any n that fits desk
  // scale; accepted for the sake of a branch-free portable definition.
  uint64_t next_below(uint64_t n) { return next_u64() % n; }

private:
  uint64_t state_;
};

// SplitMix64 finalizer as a standalone mixing function.
inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a 64-bit over a byte sequence.
inline uint64_t fnv1a64(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Combines two seeds into one stream seed.
inline uint64_t seed_combine(uint64_t a, uint64_t b) { return mix64(a ^ mix64(b)); }

}  // namespace authorid
