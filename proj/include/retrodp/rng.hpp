// Counter-based random number generation (Philox-4x64-10) plus the
// distribution samplers used throughout the library.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace retrodp {

// Philox-4x64 with 10 rounds.  Keyed counter generator: the 128-bit key
// holds (seed, stream), the 256-bit counter advances per block.  Matches
// the widely used reference formulation (same constants and round
// structure as numpy's Philox bit generator), so output can be checked
// against an external implementation.
class Philox4x64 {
 public:
  using result_type = std::uint64_t;

  static constexpr std::string_view name = "philox4x64-10";

  explicit Philox4x64(std::uint64_t seed, std::uint64_t stream = 0)
      : key_{seed, stream} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<std::uint64_t>::max();
  }

  result_type operator()() {
    if (buffer_pos_ == 4) {
      generate_block();
      buffer_pos_ = 0;
    }
    return buffer_[buffer_pos_++];
  }

  // Independent generator for a parallel chain or task; streams with
  // distinct ids never overlap.
  Philox4x64 split(std::uint64_t stream) const {
    return Philox4x64(key_[0], stream);
  }

  std::uint64_t seed() const { return key_[0]; }
  std::uint64_t stream() const { return key_[1]; }

 private:
  static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

  static void mul_hi_lo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                        std::uint64_t& lo) {
    const unsigned __int128 p =
        static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(b);
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
  }

  void generate_block() {
    for (int w = 0; w < 4; ++w) {
      if (++counter_[w] != 0) break;  // carry
    }
    std::uint64_t x0 = counter_[0], x1 = counter_[1];
    std::uint64_t x2 = counter_[2], x3 = counter_[3];
    std::uint64_t k0 = key_[0], k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k0 += kWeyl0;
        k1 += kWeyl1;
      }
      std::uint64_t hi0, lo0, hi1, lo1;
      mul_hi_lo(kMul0, x0, hi0, lo0);
      mul_hi_lo(kMul1, x2, hi1, lo1);
      x0 = hi1 ^ x1 ^ k0;
      x1 = lo1;
      x2 = hi0 ^ x3 ^ k1;
      x3 = lo0;
    }
    buffer_[0] = x0;
    buffer_[1] = x1;
    buffer_[2] = x2;
    buffer_[3] = x3;
  }

  std::uint64_t key_[2];
  std::uint64_t counter_[4] = {0, 0, 0, 0};
  std::uint64_t buffer_[4] = {0, 0, 0, 0};
  int buffer_pos_ = 4;
};

// --- distribution samplers -------------------------------------------------
//
// Free functions over the raw generator; every draw consumes a fixed or
// rejection-bounded number of generator words, so streams replay exactly.

// Uniform on the open interval (0,1).
inline double runif(Philox4x64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline std::uint64_t rand_below(Philox4x64& rng, std::uint64_t n) {
  // modulo bias is < 2^-53 for our n; not worth a rejection loop
  return rng() % n;
}

inline double rnorm(Philox4x64& rng, double mean = 0.0, double sd = 1.0) {
  const double u1 = runif(rng);
  const double u2 = runif(rng);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mean + sd * r * std::cos(6.283185307179586476925286766559 * u2);
}

// Marsaglia-Tsang squeeze; shape < 1 via the boost G(a) = G(a+1) U^{1/a}.
inline double rgamma(Philox4x64& rng, double shape, double rate = 1.0) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("rgamma: shape and rate must be positive");
  double boost = 1.0;
  if (shape < 1.0) {
    boost = std::pow(runif(rng), 1.0 / shape);
    shape += 1.0;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = rnorm(rng);
    double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = runif(rng);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 ||
        std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return boost * d * v / rate;
    }
  }
}

inline double rbeta(Philox4x64& rng, double a, double b) {
  const double x = rgamma(rng, a, 1.0);
  const double y = rgamma(rng, b, 1.0);
  return x / (x + y);
}

// X ~ IG(shape, scale):  1/X ~ Gamma(shape, rate = scale).
inline double rinvgamma(Philox4x64& rng, double shape, double scale) {
  return scale / rgamma(rng, shape, 1.0);
}

// Beta(1, alpha) via inverse CDF; used for prior stick draws.
inline double rbeta1(Philox4x64& rng, double alpha) {
  return -std::expm1(std::log(runif(rng)) / alpha);
}

template <typename T>
inline void shuffle(Philox4x64& rng, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rand_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace retrodp
