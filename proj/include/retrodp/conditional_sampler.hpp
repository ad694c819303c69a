// Componentwise posterior sampling of (K, V, Z): Gibbs updates for V and Z,
// retrospective Metropolis-Hastings updates for the allocations, the two
// label-switching moves, and the concentration update.
//
// The allocation proposal for datum i is
//     q_i(k, j)  ∝  p_j f(Y_i | Z_j)          j <= max{k}
//                ∝  M_i(k) p_j                j  > max{k}
// with M_i(k) = max{f(Y_i | Z_j) : j <= max{k}} so the proposal tail is
// heavier than the target tail.  Proposals beyond max{k} are drawn by
// extending the stick state retrospectively from the prior.

#pragma once

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "retrodp/chain_state.hpp"
#include "retrodp/exact_allocation.hpp"

namespace retrodp {

namespace detail {

// f(Y_i | Z_j) for j = 1..limit.
inline std::vector<double> factor_prefix(const ChainState& s, int i, int limit) {
  std::vector<double> f(limit);
  for (int j = 1; j <= limit; ++j)
    f[j - 1] = obs_density(s.data[i], s.sticks.atom(j));
  return f;
}

struct ProposalTerms {
  double bound;       // M_i over the prefix
  double prefix_pf;   // sum_{j<=limit} p_j f_j
  double norm;        // c~_i = prefix_pf + bound * tail mass
};

inline ProposalTerms proposal_terms(const ChainState& s,
                                    const std::vector<double>& f, int limit) {
  ProposalTerms t{0.0, 0.0, 0.0};
  for (int j = 1; j <= limit; ++j) {
    t.bound = std::max(t.bound, f[j - 1]);
    t.prefix_pf += s.sticks.weight(j) * f[j - 1];
  }
  t.norm = t.prefix_pf + t.bound * std::exp(s.sticks.log_surplus(limit));
  return t;
}

}  // namespace detail

// M_i(k): the sup of the realized observation densities, which makes the
// tail-proposal probability at least the prior tail mass.
inline double proposal_bound(const ChainState& state, int i) {
  const int mk = state.alloc.max_k();
  double m = 0.0;
  for (int j = 1; j <= mk; ++j)
    m = std::max(m, obs_density(state.data[i], state.sticks.atom(j)));
  return m;
}

// Draw the proposed component for datum i by inverse-CDF search through
// q_i, realizing prior pairs beyond max{k} on demand.  The stick state may
// grow; it is never shrunk here.
inline int propose_allocation(ChainState& state, int i, Philox4x64& rng) {
  const int mk = state.alloc.max_k();
  const std::vector<double> f = detail::factor_prefix(state, i, mk);
  const auto terms = detail::proposal_terms(state, f, mk);
  const double u = runif(rng);

  double cum = 0.0;
  for (int j = 1; j <= mk; ++j) {
    cum += state.sticks.weight(j) * f[j - 1] / terms.norm;
    if (u <= cum) return j;
  }

  // Tail: conditional on j > max{k} the proposal is the prior stick law
  // restricted to the remaining mass.  Map u onto that segment and search
  // by surplus comparison, which stays exact as the weights underflow.
  const double tail = std::exp(state.sticks.log_surplus(mk));
  double frac = (u - cum) * terms.norm / (terms.bound * tail);
  frac = std::min(std::max(frac, 1e-16), 1.0 - 1e-16);
  const double target = state.sticks.log_surplus(mk) + std::log1p(-frac);
  int j = mk;
  do {
    ++j;
    if (j > state.sticks.frontier()) state.sticks.extend_one(state.spec, rng);
  } while (state.sticks.log_surplus(j) > target);
  return j;
}

// Unclipped Metropolis-Hastings ratio for moving datum i to component j;
// requires sticks realized up to max(j, max{k}).
inline double allocation_mh_ratio(const ChainState& state, int i, int j) {
  const int mk = state.alloc.max_k();
  const int ki = state.alloc.label(i);
  if (j <= mk) {
    // Does the move drop the maximum?
    const bool drops = ki == mk && state.alloc.count(ki) == 1 && j < mk;
    if (!drops) return 1.0;
    int new_max = j;
    for (int l = mk - 1; l > j; --l)
      if (state.alloc.count(l) > 0) {
        new_max = l;
        break;
      }
    const std::vector<double> f = detail::factor_prefix(state, i, mk);
    const auto cur = detail::proposal_terms(state, f, mk);
    const auto post = detail::proposal_terms(state, f, new_max);
    return cur.norm * post.bound / (post.norm * f[ki - 1]);
  }
  // j > max{k}: the proposed component becomes the new maximum.
  const std::vector<double> f = detail::factor_prefix(state, i, j);
  const auto cur = detail::proposal_terms(state, f, mk);
  const auto post = detail::proposal_terms(state, f, j);
  return cur.norm * f[j - 1] / (post.norm * cur.bound);
}

// Acceptance probability, by the three cases of the move:
//   (a) j <= max{k}, maximum unchanged: 1 exactly;
//   (b) j <= max{k}, maximum drops;
//   (c) j  > max{k}.
inline double accept_probability(const ChainState& state, int i, int j) {
  return std::min(1.0, allocation_mh_ratio(state, i, j));
}

namespace detail {

inline void refresh_dead_atoms(ChainState& state, Philox4x64& rng) {
  for (int j = 1; j <= state.alloc.max_k(); ++j)
    if (state.alloc.count(j) == 0)
      state.sticks.atom(j) = sample_base(state.spec, rng);
}

inline std::vector<int> scan_order(int n, bool random, Philox4x64& rng) {
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  if (random) shuffle(rng, order);
  return order;
}

}  // namespace detail

// One Metropolis-Hastings pass over all allocation variables in random
// order.  Afterwards the frontier is reset to max{k} and trailing dead
// pairs are discarded; with accelerations on, the same synchronisation
// (plus a dead-atom refresh) happens before every single update.
inline void update_allocations(ChainState& state, const SweepConfig& cfg,
                               SweepStats& stats, Philox4x64& rng) {
  for (int i : detail::scan_order(state.n(), cfg.random_scan, rng)) {
    if (cfg.accelerations) {
      state.sticks.truncate(state.alloc.max_k());
      detail::refresh_dead_atoms(state, rng);
    }
    const int mk = state.alloc.max_k();
    const int j = propose_allocation(state, i, rng);
    ++stats.alloc_proposed;
    if (j > mk) ++stats.alloc_tail_proposals;
    double ratio = allocation_mh_ratio(state, i, j);
    if (cfg.invert_acceptance && ratio != 1.0) ratio = 1.0 / ratio;
    if (ratio >= 1.0 || runif(rng) <= ratio) {
      state.alloc.assign(i, j);
      ++stats.alloc_accepted;
    }
  }
  state.sticks.truncate(state.alloc.max_k());
}

// Proposition-1 Gibbs update of the component parameters: conjugate
// two-block draw for alive components, fresh base draw for dead ones.
inline void gibbs_update_Z(ChainState& state, Philox4x64& rng) {
  const int mk = state.alloc.max_k();
  std::vector<std::vector<double>> grouped(mk);
  for (int i = 0; i < state.n(); ++i)
    grouped[state.alloc.label(i) - 1].push_back(state.data[i]);
  for (int j = 1; j <= state.sticks.frontier(); ++j) {
    if (j <= mk && !grouped[j - 1].empty())
      state.sticks.atom(j) =
          update_component_params(state.sticks.atom(j), grouped[j - 1], state.spec, rng);
    else
      state.sticks.atom(j) = sample_base(state.spec, rng);
  }
}

// Proposition-1 Gibbs update of the sticks:
//   V_j ~ Be(m_j + 1, n - sum_{l<=j} m_l + alpha),
// which reduces to the prior beyond the last alive component.
inline void gibbs_update_V(ChainState& state, Philox4x64& rng) {
  const double n = state.n();
  int cum = 0;
  for (int j = 1; j <= state.sticks.frontier(); ++j) {
    cum += state.alloc.count(j);
    double v = rbeta(rng, state.alloc.count(j) + 1.0, n - cum + state.spec.alpha);
    v = std::min(std::max(v, kStickClamp), 1.0 - kStickClamp);
    state.sticks.set_stick(j, v);
  }
}

// Unclipped acceptance ratio for exchanging the labels of components j, l
// (weights stay put): (p_j / p_l)^(m_l - m_j).
inline double swap_ratio_random(const ChainState& state, int j, int l) {
  const double diff = state.alloc.count(l) - state.alloc.count(j);
  return std::exp(diff * (state.sticks.log_weight(j) - state.sticks.log_weight(l)));
}

// Unclipped acceptance ratio for exchanging labels j, j+1 together with
// V_j and V_{j+1}: (1 - V_{j+1})^{m_j} / (1 - V_j)^{m_{j+1}}.
inline double swap_ratio_neighbor(const ChainState& state, int j) {
  const double mj = state.alloc.count(j);
  const double mj1 = state.alloc.count(j + 1);
  return std::exp(mj * std::log1p(-state.sticks.stick(j + 1)) -
                  mj1 * std::log1p(-state.sticks.stick(j)));
}

// Exchange the labels of two uniformly chosen alive components.
inline void label_swap_random(ChainState& state, SweepStats& stats,
                              Philox4x64& rng) {
  const std::vector<int> alive = state.alloc.alive_labels();
  if (alive.size() < 2) return;
  const int a = static_cast<int>(rand_below(rng, alive.size()));
  int b = static_cast<int>(rand_below(rng, alive.size() - 1));
  if (b >= a) ++b;
  const int j = alive[a], l = alive[b];
  ++stats.swap_random_attempted;
  const double ratio = swap_ratio_random(state, j, l);
  if (ratio >= 1.0 || runif(rng) <= ratio) {
    std::swap(state.sticks.atom(j), state.sticks.atom(l));
    state.alloc.swap_labels(j, l);
    ++stats.swap_random_accepted;
  }
}

// Exchange a uniformly chosen pair of neighbouring labels together with
// their stick fractions; effective at moving very unequal clusters.  The
// swap can move the top label down (j+1 = max{k} onto a dead slot) or up
// (j = max{k} onto a freshly realized prior stick), so max{k} and with it
// the selection pool {1..max{k}} can change; the acceptance carries the
// pool ratio max{k}/max{k}' to keep the move reversible at the boundary.
// Sticks vacated above the new maximum stay prior-conditioned and are
// trimmed at the end of the sweep.
inline void label_swap_neighbor(ChainState& state, SweepStats& stats,
                                Philox4x64& rng) {
  const int m = state.alloc.max_k();
  if (m < 1) return;
  const int j = 1 + static_cast<int>(rand_below(rng, m));
  ++stats.swap_neighbor_attempted;
  if (j + 1 > state.sticks.frontier()) state.sticks.extend_one(state.spec, rng);
  const double ratio = swap_ratio_neighbor(state, j);
  int new_max = m;
  if (j == m)
    new_max = m + 1;
  else if (j == m - 1 && state.alloc.count(j) == 0)
    new_max = m - 1;
  const double accept = ratio * static_cast<double>(m) / new_max;
  if (accept >= 1.0 || runif(rng) <= accept) {
    state.sticks.swap_adjacent(j);
    state.alloc.swap_labels(j, j + 1);
    ++stats.swap_neighbor_accepted;
  }
}

// Concentration update under a Gamma(shape, rate) prior, conditioning on
// the realized sticks V_1..V_max{k}.  Every realized stick carries
// Be(1, alpha) prior information, so
//   alpha ~ Gamma(shape + max{k}, rate - sum_{j<=max{k}} log(1 - V_j)),
// and unrealized sticks contribute nothing.  (Conditioning on the alive
// subset alone would drop the (1-V_j)^{n - sum m} allocation factors the
// interior dead sticks carry, biasing the draw.)
inline void update_alpha(ChainState& state, double prior_shape,
                         double prior_rate, Philox4x64& rng) {
  if (!(prior_shape > 0.0) || !(prior_rate > 0.0))
    throw std::invalid_argument("update_alpha: gamma prior parameters must be positive");
  const int mk = state.alloc.max_k();
  const double rate = prior_rate - state.sticks.log_surplus(mk);
  state.spec.alpha = rgamma(rng, prior_shape + mk, rate);
}

// One full cycle: Z and V Gibbs updates, the allocation pass, label
// switching (scaled with the number of alive components), and the
// optional concentration step.
inline SweepStats sweep(ChainState& state, const SweepConfig& cfg,
                        Philox4x64& rng) {
  SweepStats stats;
  gibbs_update_Z(state, rng);
  gibbs_update_V(state, rng);
  if (cfg.exact_allocations)
    gibbs_update_allocations_exact(state, cfg, stats, rng);
  else
    update_allocations(state, cfg, stats, rng);
  if (cfg.label_swaps) {
    const int reps = std::max(1, state.alloc.alive_count());
    for (int r = 0; r < reps; ++r) label_swap_random(state, stats, rng);
    for (int r = 0; r < reps; ++r) label_swap_neighbor(state, stats, rng);
  }
  state.sticks.truncate(state.alloc.max_k());
  if (cfg.update_alpha)
    update_alpha(state, cfg.alpha_prior_shape, cfg.alpha_prior_rate, rng);
  return stats;
}

}  // namespace retrodp
