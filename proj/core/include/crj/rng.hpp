#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace crj {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive well-separated stream seeds.
constexpr auto mix64(std::uint64_t x) -> std::uint64_t {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr auto derive_seed(std::uint64_t base, std::uint64_t stream) -> std::uint64_t {
  return mix64(mix64(base) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

// FNV-1a, so that per-trace seeds depend on the trace id rather than on the
// order in which traces are scheduled.
constexpr auto hash_id(std::string_view id) -> std::uint64_t {
  auto h = 0xcbf29ce484222325ULL;
  for (auto c : id) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline auto uniform01(Rng& rng) -> double {
  return std::uniform_real_distribution<double>{0.0, 1.0}(rng);
}

}  // namespace crj
