// Copyright 2026 The prunegnn Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PRUNEGNN_RNG_HPP
#define PRUNEGNN_RNG_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace prunegnn::rng {

// 64-bit finalizer from SplitMix64. Bijective, good avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from (seed, stream index). Every
// parallelizable unit of work (Monte-Carlo trial, dataset instance, ...)
// gets its own stream so serial and fan-out execution agree bit for bit.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed) ^ mix64(stream * 0xd1342543de82ef95ULL + 1));
}

// Counter-free splittable generator (SplitMix64). All distributions are
// hand-rolled so results do not depend on the standard library vendor.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1); safe as a log() argument.
  double next_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Standard normal, Box-Muller. The cosine/sine pair is consumed in
  // order, so a stream's draw sequence is reproducible.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u = next_open();
    const double v = next_double();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double a = 6.283185307179586476925286766559 * v;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Poisson by counting unit-exponential arrivals. Exact; O(mean) cost,
  // which is fine for the network sizes this project simulates.
  int next_poisson(double mean) {
    if (mean < 0.0) throw std::invalid_argument("poisson mean must be >= 0");
    int count = 0;
    double acc = 0.0;
    while (true) {
      acc += -std::log(next_open());
      if (acc > mean) break;
      ++count;
    }
    return count;
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace prunegnn::rng

#endif  // PRUNEGNN_RNG_HPP
