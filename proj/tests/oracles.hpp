// Test-only oracles: independent computation paths (quadrature, direct
// series truncation, joint-density evaluation) used to validate the
// library implementations.  Nothing here calls the code paths it checks.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "retrodp/chain_state.hpp"

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int intervals = 4096) {
  if (intervals % 2) ++intervals;
  const double h = (b - a) / intervals;
  double acc = f(a) + f(b);
  for (int i = 1; i < intervals; ++i)
    acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

inline double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * M_PI * var) + d * d / var);
}

inline double log_invgamma_pdf(double x, double shape, double scale) {
  return shape * std::log(scale) - std::lgamma(shape) -
         (shape + 1.0) * std::log(x) - scale / x;
}

inline double log_beta_pdf(double x, double a, double b) {
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) +
         std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
}

inline double log_gamma_pdf(double x, double shape, double rate) {
  return shape * std::log(rate) - std::lgamma(shape) +
         (shape - 1.0) * std::log(x) - rate * x;
}

// Unnormalised log joint posterior of (K, V, Z) over the realized prefix:
// stick priors + atom priors + allocation weights + likelihood.
inline double joint_log_posterior(const retrodp::ChainState& s) {
  double acc = 0.0;
  const double alpha = s.spec.alpha;
  for (int j = 1; j <= s.sticks.frontier(); ++j) {
    acc += log_beta_pdf(s.sticks.stick(j), 1.0, alpha);
    const retrodp::ComponentParams& z = s.sticks.atom(j);
    acc += log_normal_pdf(z.mean, s.spec.base.mean0, s.spec.base.var_z);
    if (!s.spec.bounded())
      acc += log_invgamma_pdf(z.variance, s.spec.base.gamma_shape,
                              s.spec.base.beta_rate);
  }
  for (int i = 0; i < s.n(); ++i) {
    const int k = s.alloc.label(i);
    double logp = std::log(s.sticks.stick(k));
    for (int l = 1; l < k; ++l) logp += std::log1p(-s.sticks.stick(l));
    acc += logp + log_normal_pdf(s.data[i], s.sticks.atom(k).mean,
                                 s.sticks.atom(k).variance);
  }
  return acc;
}

// Proposal mass q_i(k, j) of the retrospective MH kernel, evaluated from
// scratch with plain loops over the realized prefix.
struct ProposalOracle {
  double bound = 0.0;   // M_i(k)
  double norm = 0.0;    // c~_i(k)
  int max_k = 0;
};

inline ProposalOracle proposal_oracle(const retrodp::ChainState& s, int i,
                                      int max_k) {
  ProposalOracle o;
  o.max_k = max_k;
  double prefix_p = 0.0, prefix_pf = 0.0;
  for (int j = 1; j <= max_k; ++j) {
    double p = s.sticks.stick(j);
    for (int l = 1; l < j; ++l) p *= 1.0 - s.sticks.stick(l);
    const double f = std::exp(log_normal_pdf(s.data[i], s.sticks.atom(j).mean,
                                             s.sticks.atom(j).variance));
    o.bound = std::max(o.bound, f);
    prefix_p += p;
    prefix_pf += p * f;
  }
  o.norm = prefix_pf + o.bound * (1.0 - prefix_p);
  return o;
}

inline double proposal_mass(const retrodp::ChainState& s, int i, int j,
                            int max_k) {
  const ProposalOracle o = proposal_oracle(s, i, max_k);
  double p = s.sticks.stick(j);
  for (int l = 1; l < j; ++l) p *= 1.0 - s.sticks.stick(l);
  if (j <= max_k) {
    const double f = std::exp(log_normal_pdf(s.data[i], s.sticks.atom(j).mean,
                                             s.sticks.atom(j).variance));
    return p * f / o.norm;
  }
  return o.bound * p / o.norm;
}

// MH ratio for moving datum i to component j, from the joint density and
// the forward/reverse proposal masses.
inline double mh_ratio_oracle(const retrodp::ChainState& s, int i, int j) {
  const int old_label = s.alloc.label(i);
  retrodp::ChainState moved = s;
  moved.alloc.assign(i, j);
  const double log_target_ratio = joint_log_posterior(moved) - joint_log_posterior(s);
  const double q_fwd = proposal_mass(s, i, j, s.alloc.max_k());
  const double q_rev = proposal_mass(moved, i, old_label, moved.alloc.max_k());
  return std::exp(log_target_ratio) * q_rev / q_fwd;
}

// Truncated normalisation of r_j = p_j f_j / c: realize the series until
// the leftover stick mass drops below the residual, then normalise.
inline std::vector<double> truncated_law(const std::vector<double>& sticks,
                                         const std::vector<double>& factors) {
  std::vector<double> r(sticks.size());
  double surplus = 1.0, c = 0.0;
  for (std::size_t j = 0; j < sticks.size(); ++j) {
    const double p = surplus * sticks[j];
    surplus *= 1.0 - sticks[j];
    r[j] = p * factors[j];
    c += r[j];
  }
  for (double& v : r) v /= c;
  return r;
}

inline double total_variation(const std::map<std::vector<int>, double>& a,
                              const std::map<std::vector<int>, double>& b) {
  double tv = 0.0;
  for (const auto& [key, pa] : a) {
    const auto it = b.find(key);
    tv += std::abs(pa - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [key, pb] : b)
    if (!a.count(key)) tv += pb;
  return 0.5 * tv;
}

// Sorted multiset of cluster sizes induced by an allocation vector.
inline std::vector<int> size_multiset(const std::vector<int>& labels) {
  std::map<int, int> counts;
  for (int l : labels) ++counts[l];
  std::vector<int> sizes;
  for (const auto& [l, c] : counts) sizes.push_back(c);
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

inline double mean_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  return m / static_cast<double>(v.size());
}

inline double sd_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace oracle
