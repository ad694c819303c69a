// Benchmark datasets: draws from the two reference mixtures.  Generation
// is sequential, one (uniform, normal) pair per observation, so for a
// fixed seed the size-100 dataset is bit-exactly the prefix of the
// size-1000 one.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "retrodp/rng.hpp"

namespace retrodp {

// Stream ids for dataset generation, disjoint from chain streams.
constexpr std::uint64_t kLeptoStream = 0x6c6570746fULL;  // "lepto"
constexpr std::uint64_t kBimodStream = 0x62696d6f64ULL;  // "bimod"

// lepto: 0.67 N(0,1) + 0.33 N(0.3, 0.25^2); bimod: 0.5 N(-1, 0.5^2) +
// 0.5 N(1, 0.5^2).
inline std::vector<double> generate_data(const std::string& name, int n,
                                         std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_data: n >= 1");
  double w1, m1, s1, m2, s2;
  std::uint64_t stream;
  if (name == "lepto") {
    w1 = 0.67, m1 = 0.0, s1 = 1.0, m2 = 0.3, s2 = 0.25;
    stream = kLeptoStream;
  } else if (name == "bimod") {
    w1 = 0.5, m1 = -1.0, s1 = 0.5, m2 = 1.0, s2 = 0.5;
    stream = kBimodStream;
  } else {
    throw std::invalid_argument("generate_data: unknown dataset '" + name + "'");
  }
  Philox4x64 rng(seed, stream);
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) {
    const bool first = runif(rng) < w1;
    y[i] = first ? rnorm(rng, m1, s1) : rnorm(rng, m2, s2);
  }
  return y;
}

}  // namespace retrodp
