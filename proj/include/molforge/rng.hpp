//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_RNG_HPP_
#define MOLFORGE_RNG_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace molforge {

// Seeded random stream. All stochastic operations take one by reference so a
// run is a pure function of its seed.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, n). n must be > 0.
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  // Uniform in [lo, hi].
  int between(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }

  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  // True with probability pct / 100.
  bool chance(double pct) {
    if (pct <= 0.0)
      return false;
    if (pct >= 100.0)
      return true;
    return unit() * 100.0 < pct;
  }

  template <typename T> const T &pick(std::span<const T> items) {
    return items[index(items.size())];
  }

  template <typename T> void shuffle(std::vector<T> &items) {
    std::shuffle(items.begin(), items.end(), engine_);
  }

  // k distinct indices from [0, n), in draw order.
  std::vector<std::size_t> sample(std::size_t n, std::size_t k);

  // Independent child stream; deterministic in the parent's state.
  Rng split() { return Rng(engine_() ^ 0x9e3779b97f4a7c15ULL); }

  std::mt19937_64 &engine() { return engine_; }

private:
  std::mt19937_64 engine_;
};

inline std::vector<std::size_t> Rng::sample(std::size_t n, std::size_t k) {
  k = std::min(k, n);
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i)
    pool[i] = i;
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + index(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

} // namespace molforge

#endif // MOLFORGE_RNG_HPP_
