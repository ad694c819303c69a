// Exact (Metropolis-free) retrospective sampling of a discrete variable J
// with mass r_j ∝ p_j f_j, where the p_j come from a stick-breaking stream
// and the f_j are positive factors bounded by a known constant M.  The
// unknown normaliser c = sum p_j f_j is sandwiched by
//     c_l(k) = sum_{j<=k} p_j f_j
//     c_u(k) = c_l(k) + M (1 - sum_{j<=k} p_j)
// and J = j is decided exactly once
//     sum_{m<j} r_m / c_l(k)  <=  U  <=  sum_{m<=j} r_m / c_u(k).
// Built on top of it: the exact Gibbs allocation pass for the
// bounded-likelihood (fixed variance) model variant.

#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "retrodp/chain_state.hpp"

namespace retrodp {

struct BoundsPair {
  double lower = 0.0;
  double upper = 0.0;
  int prefix_len = 0;
};

// Lazy (p_j, f_j) stream over a StickState.  The factor evaluator may
// inspect the stick state (e.g. an observation density at atom j); every
// realized factor must respect the bound.
class BoundedWeightedStream {
 public:
  using Factor = std::function<double(int, const StickState&)>;

  BoundedWeightedStream(StickState& sticks, const ModelSpec& spec,
                        Factor factor, double bound)
      : sticks_(sticks), spec_(spec), factor_(std::move(factor)), bound_(bound) {
    if (!(bound_ > 0.0))
      throw std::invalid_argument("BoundedWeightedStream: bound must be positive");
    pf_prefix_.push_back(0.0);
  }

  int realized() const { return static_cast<int>(pf_prefix_.size()) - 1; }
  double bound() const { return bound_; }
  StickState& sticks() { return sticks_; }
  const StickState& sticks() const { return sticks_; }

  void realize_to(int k, Philox4x64& rng) {
    while (realized() < k) {
      const int j = realized() + 1;
      if (j > sticks_.frontier()) sticks_.extend_one(spec_, rng);
      const double f = factor_(j, sticks_);
      if (!(f >= 0.0) || f > bound_ * (1.0 + 1e-12))
        throw std::domain_error("BoundedWeightedStream: factor violates the stated bound");
      pf_prefix_.push_back(pf_prefix_.back() + sticks_.weight(j) * f);
    }
  }

  // sum_{m<=j} p_m f_m for realized j.
  double pf_prefix(int j) const { return pf_prefix_[j]; }

 private:
  StickState& sticks_;
  const ModelSpec& spec_;
  Factor factor_;
  double bound_;
  std::vector<double> pf_prefix_;
};

// The two bounding sequences after k realized pairs; both converge to the
// normaliser monotonically.
inline BoundsPair bounds(const BoundedWeightedStream& stream, int k) {
  if (k < 0 || k > stream.realized())
    throw std::logic_error("bounds: prefix not realized");
  BoundsPair b;
  b.prefix_len = k;
  b.lower = stream.pf_prefix(k);
  b.upper = b.lower + stream.bound() * std::exp(stream.sticks().log_surplus(k));
  return b;
}

// Exact draw of J.  Pairs are realized one at a time; the sandwich test
// runs after every increment since realization dominates the cost.
// Boundary ties resolve to the smaller index.
inline int sample_exact(BoundedWeightedStream& stream, Philox4x64& rng,
                        int* realized_pairs = nullptr) {
  const double u = runif(rng);
  constexpr int kMaxRealize = 1 << 22;
  for (int k = std::max(1, stream.realized());; ++k) {
    if (k > kMaxRealize)
      throw std::runtime_error("sample_exact: sandwich test failed to resolve");
    stream.realize_to(k, rng);
    const BoundsPair b = bounds(stream, k);
    if (!(b.upper > 0.0)) continue;  // no mass realized yet
    // smallest candidate j with pf_prefix(j)/c_u >= u
    const double target = u * b.upper;
    int lo = 1, hi = k, j = -1;
    while (lo <= hi) {
      const int mid = (lo + hi) / 2;
      if (stream.pf_prefix(mid) >= target) {
        j = mid;
        hi = mid - 1;
      } else {
        lo = mid + 1;
      }
    }
    if (j > 0 && stream.pf_prefix(j - 1) <= u * b.lower) {
      if (realized_pairs) *realized_pairs = k;
      return j;
    }
  }
}

// Exact Gibbs pass over the allocations for the bounded-likelihood model:
// K_i ~ pr(K_i = j | Y, V, Z) ∝ p_j f(Y_i | Z_j) drawn without any
// Metropolis correction, M = likelihood_bound.
inline void gibbs_update_allocations_exact(ChainState& state,
                                           const SweepConfig& cfg,
                                           SweepStats& stats, Philox4x64& rng) {
  if (!state.spec.bounded())
    throw std::domain_error(
        "gibbs_update_allocations_exact: free-variance model has an unbounded "
        "likelihood; use the Metropolis-Hastings kernel");
  const double bound = likelihood_bound(state.spec);
  long realized_total = 0;
  long draws = 0;
  std::vector<int> order(state.n());
  for (int i = 0; i < state.n(); ++i) order[i] = i;
  if (cfg.random_scan) shuffle(rng, order);
  for (int i : order) {
    if (cfg.accelerations) state.sticks.truncate(state.alloc.max_k());
    const double y = state.data[i];
    BoundedWeightedStream stream(
        state.sticks, state.spec,
        [y](int j, const StickState& s) { return obs_density(y, s.atom(j)); },
        bound);
    int realized = 0;
    const int j = sample_exact(stream, rng, &realized);
    state.alloc.assign(i, j);
    realized_total += realized;
    ++draws;
    ++stats.alloc_proposed;
    ++stats.alloc_accepted;
  }
  state.sticks.truncate(state.alloc.max_k());
  stats.mean_realized_pairs =
      draws ? static_cast<double>(realized_total) / draws : 0.0;
}

}  // namespace retrodp
