#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace afdm {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a, used to turn scenario names into stream tags.
inline uint64_t name_tag(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Seed for one trial of one scenario; independent of evaluation order.
inline uint64_t trial_seed(uint64_t master, uint64_t scenario, uint64_t trial, uint64_t stream = 0) {
  uint64_t h = splitmix64(master);
  h = splitmix64(h ^ scenario);
  h = splitmix64(h ^ trial);
  return splitmix64(h ^ stream);
}

inline std::mt19937_64 trial_rng(uint64_t master, uint64_t scenario, uint64_t trial, uint64_t stream = 0) {
  return std::mt19937_64(trial_seed(master, scenario, trial, stream));
}

}  // namespace afdm
