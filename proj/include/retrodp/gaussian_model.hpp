// Univariate Gaussian observation model with a normal x inverse-gamma base
// measure, the one non-conjugate mixture model driven by the samplers here.
//
// Two variants share the code path:
//   - free variance: z = (mean, variance), both drawn from the base measure;
//   - fixed variance: z = mean only, the variance pinned to a common value
//     carried in ModelSpec::fixed_variance.  The fixed-variance variant has
//     a bounded likelihood in z, which the exact allocation sampler needs.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "retrodp/rng.hpp"

namespace retrodp {

constexpr double kLogTwoPi = 1.8378770664093453;

// Mixture component parameters z = (mu, sigma^2).
struct ComponentParams {
  double mean = 0.0;
  double variance = 1.0;
};

// Base measure H = N(mean0, var_z) x IG(gamma_shape, beta_rate).
struct BaseMeasureParams {
  double mean0 = 0.0;
  double var_z = 1.0;
  double gamma_shape = 2.0;
  double beta_rate = 1.0;
};

inline void validate(const BaseMeasureParams& b) {
  if (!(b.var_z > 0.0) || !(b.gamma_shape > 0.0) || !(b.beta_rate > 0.0))
    throw std::invalid_argument("base measure: var_z, gamma_shape, beta_rate must be positive");
}

// Full model specification: base measure, DP concentration, and the
// optional fixed component variance (the only extra likelihood parameter
// this model admits).
struct ModelSpec {
  BaseMeasureParams base;
  double alpha = 1.0;
  std::optional<double> fixed_variance;  // set => bounded-likelihood variant

  bool bounded() const { return fixed_variance.has_value(); }
};

inline void validate(const ModelSpec& spec) {
  validate(spec.base);
  if (!(spec.alpha > 0.0))
    throw std::invalid_argument("model: alpha must be positive");
  if (spec.fixed_variance && !(*spec.fixed_variance > 0.0))
    throw std::invalid_argument("model: fixed_variance must be positive");
}

inline double obs_logdensity(double y, const ComponentParams& z) {
  if (!(z.variance > 0.0))
    throw std::invalid_argument("obs_logdensity: variance must be positive");
  const double d = y - z.mean;
  return -0.5 * (kLogTwoPi + std::log(z.variance) + d * d / z.variance);
}

inline double obs_density(double y, const ComponentParams& z) {
  return std::exp(obs_logdensity(y, z));
}

inline ComponentParams sample_base(const ModelSpec& spec, Philox4x64& rng) {
  validate(spec);
  ComponentParams z;
  z.mean = rnorm(rng, spec.base.mean0, std::sqrt(spec.base.var_z));
  z.variance = spec.bounded()
                   ? *spec.fixed_variance
                   : rinvgamma(rng, spec.base.gamma_shape, spec.base.beta_rate);
  return z;
}

// Variance given the mean: IG(gamma + m/2, beta + sum (y_i - mean)^2 / 2).
inline double sample_variance_conditional(double mean,
                                          const std::vector<double>& data,
                                          const BaseMeasureParams& base,
                                          Philox4x64& rng) {
  double ss = 0.0;
  for (double y : data) ss += (y - mean) * (y - mean);
  return rinvgamma(rng, base.gamma_shape + 0.5 * static_cast<double>(data.size()),
                   base.beta_rate + 0.5 * ss);
}

// Mean given the variance: normal with precision 1/var_z + m/variance and
// location the precision-weighted average of mean0 and the data mean.
inline double sample_mean_conditional(double variance,
                                      const std::vector<double>& data,
                                      const BaseMeasureParams& base,
                                      Philox4x64& rng) {
  double sum = 0.0;
  for (double y : data) sum += y;
  const double prec = 1.0 / base.var_z + static_cast<double>(data.size()) / variance;
  const double loc = (base.mean0 / base.var_z + sum / variance) / prec;
  return rnorm(rng, loc, std::sqrt(1.0 / prec));
}

// Two-block Gibbs sweep on a component's parameters given its allocated
// data: variance given the current mean, then mean given the new variance.
// In the fixed-variance variant only the mean moves.
inline ComponentParams update_component_params(const ComponentParams& z,
                                               const std::vector<double>& data,
                                               const ModelSpec& spec,
                                               Philox4x64& rng) {
  if (data.empty())
    throw std::invalid_argument("update_component_params: empty data (dead component; draw from the base measure instead)");
  ComponentParams out = z;
  if (!spec.bounded())
    out.variance = sample_variance_conditional(z.mean, data, spec.base, rng);
  out.mean = sample_mean_conditional(out.variance, data, spec.base, rng);
  return out;
}

enum class HyperMeanRule {
  kMidrange,      // mean0 = (min + max) / 2
  kPaperLiteral,  // mean0 = R / 2
};

// Data-driven hyperparameters: with R the data range, var_z = R^2,
// gamma = 2, beta = 0.02 R^2.  The prior mean of the component means is
// the midrange by default; the literal R/2 convention is kept as an
// option for replication.
inline BaseMeasureParams data_driven_hyperparams(
    const std::vector<double>& y,
    HyperMeanRule rule = HyperMeanRule::kMidrange) {
  if (y.size() < 2)
    throw std::invalid_argument("data_driven_hyperparams: need at least two observations");
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  const double range = *hi - *lo;
  if (!(range > 0.0))
    throw std::invalid_argument("data_driven_hyperparams: data range is degenerate (constant data)");
  BaseMeasureParams base;
  base.mean0 = rule == HyperMeanRule::kMidrange ? 0.5 * (*lo + *hi) : 0.5 * range;
  base.var_z = range * range;
  base.gamma_shape = 2.0;
  base.beta_rate = 0.02 * range * range;
  return base;
}

// sup over means of the Gaussian density at fixed variance.
inline double likelihood_bound(const ModelSpec& spec) {
  if (!spec.bounded())
    throw std::domain_error("likelihood_bound: free-variance model has an unbounded likelihood");
  return 1.0 / std::sqrt(2.0 * 3.14159265358979323846 * *spec.fixed_variance);
}

}  // namespace retrodp
