// The observed-partition experiment: a sample from the Dirichlet process
// itself is observed (point-mass observation density), so the partition
// into c clusters of known sizes is data; the unknowns are the sticks and
// the component index each cluster occupies.  Posterior exploration uses
// a variation of the retrospective sampler over (V, L_1..L_c):
//   - V_j | L  ~  Be(m_j + 1, n - sum_{l<=j} m_l + alpha)      (Prop.-1 form)
//   - L_l | V, L_{-l}  ∝  p_j^{n_l} on unoccupied indices j,
// the latter drawn exactly through the bounded-stream sandwich sampler
// with factors f_j = p_j^{n_l - 1} 1{j unoccupied} <= 1.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "retrodp/exact_allocation.hpp"
#include "retrodp/functionals.hpp"

namespace retrodp {

struct ObservedPartitionConfig {
  std::vector<int> cluster_sizes;  // e.g. {5, 4, 1}
  double alpha = 1.0;
  long iterations = 100000;
  long burn_in = 10000;
  std::uint64_t seed = 1;
  bool label_swaps = true;
};

struct ObservedPartitionResult {
  // weight_by_rank[r][t]: weight of the r-th largest cluster at iteration t
  std::vector<std::vector<double>> weight_by_rank;
  std::vector<double> max_weight;  // max_j p_j via the predominant species
  // Mode traversals: iterations where the two largest clusters exchange
  // the order of their component indices.  Stick redraws alone cannot
  // change this; it moves only when the labels migrate.
  long ordering_crossings = 0;
};

namespace op_detail {

struct State {
  std::vector<int> sizes;   // by rank (descending)
  std::vector<int> labels;  // component index per cluster, by rank
  StickState sticks;
  ModelSpec spec;
  int n = 0;
};

inline int max_label(const State& s) {
  return *std::max_element(s.labels.begin(), s.labels.end());
}

inline int count_at(const State& s, int j) {
  for (std::size_t l = 0; l < s.labels.size(); ++l)
    if (s.labels[l] == j) return s.sizes[l];
  return 0;
}

inline void update_sticks(State& s, Philox4x64& rng) {
  const int mx = max_label(s);
  s.sticks.extend_to(mx, s.spec, rng);
  s.sticks.truncate(mx);
  int cum = 0;
  for (int j = 1; j <= mx; ++j) {
    const int mj = count_at(s, j);
    cum += mj;
    double v = rbeta(rng, mj + 1.0, static_cast<double>(s.n - cum) + s.spec.alpha);
    v = std::min(std::max(v, kStickClamp), 1.0 - kStickClamp);
    s.sticks.set_stick(j, v);
  }
}

inline void update_label(State& s, std::size_t l, Philox4x64& rng) {
  const double nl = s.sizes[l];
  std::vector<int> occupied;
  for (std::size_t l2 = 0; l2 < s.labels.size(); ++l2)
    if (l2 != l) occupied.push_back(s.labels[l2]);
  BoundedWeightedStream stream(
      s.sticks, s.spec,
      [&occupied, nl](int j, const StickState& st) {
        for (int o : occupied)
          if (o == j) return 0.0;
        return nl > 1.0 ? std::exp((nl - 1.0) * st.log_weight(j)) : 1.0;
      },
      1.0);
  s.labels[l] = sample_exact(stream, rng);
}

inline void swap_random(State& s, Philox4x64& rng) {
  if (s.labels.size() < 2) return;
  const std::size_t a = rand_below(rng, s.labels.size());
  std::size_t b = rand_below(rng, s.labels.size() - 1);
  if (b >= a) ++b;
  const int j = s.labels[a], lidx = s.labels[b];
  const double diff = s.sizes[b] - s.sizes[a];
  const double ratio =
      std::exp(diff * (s.sticks.log_weight(j) - s.sticks.log_weight(lidx)));
  if (ratio >= 1.0 || runif(rng) <= ratio) std::swap(s.labels[a], s.labels[b]);
}

inline void swap_neighbor(State& s, Philox4x64& rng) {
  const int mx = max_label(s);
  if (mx < 2) return;
  const int j = 1 + static_cast<int>(rand_below(rng, mx - 1));
  const double mj = count_at(s, j);
  const double mj1 = count_at(s, j + 1);
  const double ratio = std::exp(mj * std::log1p(-s.sticks.stick(j + 1)) -
                                mj1 * std::log1p(-s.sticks.stick(j)));
  if (ratio >= 1.0 || runif(rng) <= ratio) {
    s.sticks.swap_adjacent(j);
    for (int& lab : s.labels) {
      if (lab == j)
        lab = j + 1;
      else if (lab == j + 1)
        lab = j;
    }
    s.sticks.truncate(max_label(s));
  }
}

}  // namespace op_detail

inline ObservedPartitionResult run_observed_partition(
    const ObservedPartitionConfig& cfg) {
  if (cfg.cluster_sizes.empty())
    throw std::invalid_argument("observed partition: need at least one cluster");
  for (int sz : cfg.cluster_sizes)
    if (sz < 1) throw std::invalid_argument("observed partition: sizes must be positive");
  if (!(cfg.alpha > 0.0))
    throw std::invalid_argument("observed partition: alpha must be positive");
  if (cfg.burn_in >= cfg.iterations)
    throw std::invalid_argument("observed partition: burn_in < iterations required");

  Philox4x64 rng(cfg.seed, 0x6f62736572766564ULL);  // "observed"

  op_detail::State s;
  s.sizes = cfg.cluster_sizes;
  std::sort(s.sizes.begin(), s.sizes.end(), std::greater<int>());
  s.n = std::accumulate(s.sizes.begin(), s.sizes.end(), 0);
  s.spec.alpha = cfg.alpha;
  s.labels.resize(s.sizes.size());
  for (std::size_t l = 0; l < s.labels.size(); ++l)
    s.labels[l] = static_cast<int>(l) + 1;
  s.sticks.extend_to(static_cast<int>(s.labels.size()), s.spec, rng);

  const std::size_t c = s.sizes.size();
  ObservedPartitionResult out;
  out.weight_by_rank.resize(c);

  bool prev_order = false;
  bool have_prev = false;
  for (long t = 0; t < cfg.iterations; ++t) {
    op_detail::update_sticks(s, rng);
    for (std::size_t l = 0; l < c; ++l) op_detail::update_label(s, l, rng);
    if (cfg.label_swaps) {
      for (std::size_t r = 0; r < c; ++r) op_detail::swap_random(s, rng);
      for (std::size_t r = 0; r < c; ++r) op_detail::swap_neighbor(s, rng);
    }
    s.sticks.truncate(op_detail::max_label(s));
    if (t < cfg.burn_in) continue;

    for (std::size_t l = 0; l < c; ++l)
      out.weight_by_rank[l].push_back(s.sticks.weight(s.labels[l]));
    PredominantSpecies top = predominant_species(s.sticks, s.spec, rng);
    out.max_weight.push_back(top.weight);
    s.sticks.truncate(op_detail::max_label(s));

    if (c >= 2) {
      const bool order = s.labels[0] < s.labels[1];
      if (have_prev && order != prev_order) ++out.ordering_crossings;
      prev_order = order;
      have_prev = true;
    }
  }
  return out;
}

}  // namespace retrodp
