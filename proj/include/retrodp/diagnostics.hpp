// Monitored functionals, the windowed integrated-autocorrelation-time
// estimator with standard errors, and the Kolmogorov-Smirnov machinery
// used by the correctness harness.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "retrodp/chain_state.hpp"
#include "retrodp/neal8.hpp"

namespace retrodp {

struct Series {
  std::vector<double> values;
  std::string name;
};

// D = -2 sum_i log( sum_{j alive} (m_j/n) f(Y_i | Z_j) ), label invariant.
// A datum with zero mixture density makes the deviance infinite; that is
// reported as such rather than treated as fatal.
inline double deviance(const std::map<int, int>& counts,
                       const std::map<int, ComponentParams>& params,
                       const std::vector<double>& y) {
  long total = 0;
  for (const auto& [j, m] : counts) {
    if (m < 0) throw std::invalid_argument("deviance: negative count");
    if (m > 0 && !params.count(j))
      throw std::invalid_argument("deviance: missing params for alive component");
    total += m;
  }
  if (total != static_cast<long>(y.size()))
    throw std::invalid_argument("deviance: counts do not sum to n");
  const double logn = std::log(static_cast<double>(y.size()));
  double dev = 0.0;
  for (double yi : y) {
    double lse = -std::numeric_limits<double>::infinity();
    for (const auto& [j, m] : counts) {
      if (m == 0) continue;
      const double lw =
          std::log(static_cast<double>(m)) - logn + obs_logdensity(yi, params.at(j));
      const double hi = std::max(lse, lw), lo = std::min(lse, lw);
      lse = std::isinf(hi) ? hi : hi + std::log1p(std::exp(lo - hi));
    }
    dev += -2.0 * lse;
  }
  return dev;
}

inline int num_clusters(const std::map<int, int>& counts) {
  int m = 0;
  for (const auto& [j, c] : counts) m += c > 0;
  return m;
}

inline std::map<int, int> counts_of(const ChainState& state) {
  std::map<int, int> counts;
  for (int j = 1; j <= state.alloc.max_k(); ++j)
    counts[j] = state.alloc.count(j);
  return counts;
}

inline double deviance(const ChainState& state) {
  std::map<int, ComponentParams> params;
  for (int j = 1; j <= state.alloc.max_k(); ++j)
    if (state.alloc.count(j) > 0) params[j] = state.sticks.atom(j);
  return deviance(counts_of(state), params, state.data);
}

// Same monitored quantities from the marginal sampler's output: cluster
// count, the deviance with cluster sizes as the mixture weights, and the
// mean parameter of the cluster holding each selected datum.
struct MonitoredStats {
  int num_clusters = 0;
  double deviance = 0.0;
  std::vector<double> selected_means;
};

inline MonitoredStats monitored_stats(const ClusterState& cs,
                                      const std::vector<double>& y,
                                      const std::vector<int>& data_indices) {
  MonitoredStats out;
  out.num_clusters = cs.num_clusters();
  out.deviance = deviance(cs.sizes, cs.params, y);
  for (int i : data_indices)
    out.selected_means.push_back(cs.params.at(cs.labels.at(i)).mean);
  return out;
}

inline MonitoredStats monitored_stats(const ChainState& state,
                                      const std::vector<int>& data_indices) {
  MonitoredStats out;
  out.num_clusters = state.alloc.alive_count();
  out.deviance = deviance(state);
  for (int i : data_indices)
    out.selected_means.push_back(state.sticks.atom(state.alloc.label(i)).mean);
  return out;
}

// Biased-normalisation sample autocorrelation (divide by n and by the
// lag-0 autocovariance).
inline double autocorrelation(const std::vector<double>& x, int lag) {
  const int n = static_cast<int>(x.size());
  if (n < 2) throw std::invalid_argument("autocorrelation: need length >= 2");
  if (lag < 0 || lag >= n) throw std::invalid_argument("autocorrelation: lag out of range");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double c0 = 0.0;
  for (double v : x) c0 += (v - mean) * (v - mean);
  c0 /= n;
  if (!(c0 > 0.0))
    throw std::invalid_argument("autocorrelation: zero-variance series");
  double ck = 0.0;
  for (int t = 0; t + lag < n; ++t) ck += (x[t] - mean) * (x[t + lag] - mean);
  ck /= n;
  return ck / c0;
}

struct IATEstimate {
  double tau_hat = 1.0;
  int window = 0;
  double std_err = 0.0;
  long n_samples = 0;
  bool window_converged = true;  // false: no L <= N/10 with L >= 6 tau(L)
};

// tau_hat(L) = 1 + 2 sum_{j<=L} rho_j with the self-consistent window:
// the smallest L with L >= 6 tau_hat(L) (Sokal's recipe).  The standard
// error follows the windowed-estimator variance approximation
//   var(tau_hat) ≈ tau^2 * 2(2L+1)/N,
// i.e. formula (3.19)-style with the usual constant.
inline IATEstimate iat(const std::vector<double>& x, int window = -1) {
  const long n = static_cast<long>(x.size());
  if (n < 100) throw std::invalid_argument("iat: need length >= 100");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> d(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) d[t] = x[t] - mean;
  double c0 = 0.0;
  for (double v : d) c0 += v * v;
  c0 /= static_cast<double>(n);
  if (!(c0 > 0.0)) throw std::invalid_argument("iat: zero-variance series");

  IATEstimate est;
  est.n_samples = n;
  const int max_lag = window > 0 ? window : static_cast<int>(n / 10);
  double tau = 1.0;
  int lag = 0;
  while (lag < max_lag) {
    ++lag;
    double ck = 0.0;
    for (long t = 0; t + lag < n; ++t) ck += d[t] * d[t + lag];
    ck /= static_cast<double>(n);
    tau += 2.0 * ck / c0;
    if (window <= 0 && static_cast<double>(lag) >= 6.0 * tau) break;
  }
  est.tau_hat = tau;
  est.window = lag;
  est.window_converged = window > 0 || static_cast<double>(lag) >= 6.0 * tau;
  est.std_err = tau * std::sqrt(2.0 * (2.0 * lag + 1.0) / static_cast<double>(n));
  return est;
}

inline IATEstimate iat(const Series& s, int window = -1) {
  return iat(s.values, window);
}

// --- two-sample Kolmogorov-Smirnov -----------------------------------------

inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < a.size() && ib < b.size()) {
    const double v = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= v) ++ia;
    while (ib < b.size() && b[ib] <= v) ++ib;
    d = std::max(d, std::abs(ia / na - ib / nb));
  }
  return d;
}

// Asymptotic Kolmogorov tail probability with the Stephens small-sample
// correction; conservative for discrete statistics.
inline double ks_pvalue(double d, double na, double nb) {
  const double ne = na * nb / (na + nb);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * std::exp(-2.0 * k * k * lambda * lambda);
    p += (k % 2 == 1) ? term : -term;
  }
  return std::min(1.0, std::max(0.0, p));
}

inline double ks_test_pvalue(const std::vector<double>& a,
                             const std::vector<double>& b) {
  return ks_pvalue(ks_statistic(a, b), static_cast<double>(a.size()),
                   static_cast<double>(b.size()));
}

}  // namespace retrodp
