// Allocation bookkeeping and the joint chain state (K, V, Z) operated on
// by the conditional samplers.

#pragma once

#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "retrodp/gaussian_model.hpp"
#include "retrodp/stick_breaking.hpp"

namespace retrodp {

// Allocation vector K with per-component occupancy counts.  Labels are
// 1-based; dead components below max_k stay as explicit gaps (labels are
// meaningful in the conditional method, so no renumbering).  Invariant:
// counts.back() > 0, i.e. max_k is the largest alive label.
class AllocationState {
 public:
  explicit AllocationState(std::vector<int> k) : k_(std::move(k)) {
    if (k_.empty()) throw std::invalid_argument("AllocationState: empty allocation");
    int mx = 0;
    for (int label : k_) {
      if (label < 1) throw std::invalid_argument("AllocationState: labels are 1-based");
      mx = std::max(mx, label);
    }
    counts_.assign(mx, 0);
    for (int label : k_) ++counts_[label - 1];
  }

  static AllocationState single_cluster(int n) {
    return AllocationState(std::vector<int>(n, 1));
  }

  int n() const { return static_cast<int>(k_.size()); }
  int max_k() const { return static_cast<int>(counts_.size()); }
  int label(int i) const { return k_[i]; }
  const std::vector<int>& labels() const { return k_; }

  int count(int j) const {
    return (j >= 1 && j <= max_k()) ? counts_[j - 1] : 0;
  }

  int alive_count() const {
    int c = 0;
    for (int m : counts_) c += m > 0;
    return c;
  }

  std::vector<int> alive_labels() const {
    std::vector<int> out;
    for (int j = 1; j <= max_k(); ++j)
      if (counts_[j - 1] > 0) out.push_back(j);
    return out;
  }

  // sum_{l<=j} m_l
  int prefix_count(int j) const {
    int s = 0;
    for (int l = 1; l <= j && l <= max_k(); ++l) s += counts_[l - 1];
    return s;
  }

  // Reassign datum i to component j, keeping counts and max_k exact.
  void assign(int i, int j) {
    const int old = k_[i];
    if (j == old) return;
    if (j < 1) throw std::invalid_argument("assign: labels are 1-based");
    if (j > max_k()) counts_.resize(j, 0);
    k_[i] = j;
    ++counts_[j - 1];
    --counts_[old - 1];
    while (!counts_.empty() && counts_.back() == 0) counts_.pop_back();
  }

  // Exchange labels j and l: every datum at j moves to l and vice versa.
  // Labels beyond max_k are legal (empty components); max_k follows.
  void swap_labels(int j, int l) {
    if (j == l) return;
    if (j < 1 || l < 1)
      throw std::invalid_argument("swap_labels: labels are 1-based");
    const int need = std::max(j, l);
    if (need > max_k()) counts_.resize(need, 0);
    for (int& label : k_) {
      if (label == j)
        label = l;
      else if (label == l)
        label = j;
    }
    std::swap(counts_[j - 1], counts_[l - 1]);
    while (!counts_.empty() && counts_.back() == 0) counts_.pop_back();
  }

 private:
  std::vector<int> k_;
  std::vector<int> counts_;
};

// Joint sampler state for one chain.
struct ChainState {
  ModelSpec spec;
  std::vector<double> data;
  AllocationState alloc;
  StickState sticks;

  ChainState(ModelSpec s, std::vector<double> y, AllocationState a,
             StickState st)
      : spec(std::move(s)),
        data(std::move(y)),
        alloc(std::move(a)),
        sticks(std::move(st)) {}

  int n() const { return static_cast<int>(data.size()); }

  // Indices of the data allocated to component j.
  std::vector<double> data_of(int j) const {
    std::vector<double> out;
    for (int i = 0; i < n(); ++i)
      if (alloc.label(i) == j) out.push_back(data[i]);
    return out;
  }
};

enum class SamplerKind { kRetroMH, kRetroExact, kNeal8 };

inline std::string sampler_name(SamplerKind k) {
  switch (k) {
    case SamplerKind::kRetroMH: return "retro-mh";
    case SamplerKind::kRetroExact: return "retro-exact";
    case SamplerKind::kNeal8: return "neal8";
  }
  return "?";
}

// Knobs for one sampler cycle.
struct SweepConfig {
  bool random_scan = true;     // fixed scan retained for debugging determinism
  bool accelerations = true;   // sync N* = max{k} and refresh dead Z per datum
  bool label_swaps = true;
  bool update_alpha = false;
  double alpha_prior_shape = 2.0;
  double alpha_prior_rate = 2.0;
  bool exact_allocations = false;  // bounded-likelihood variant only
  // Deliberately inverts the MH acceptance ratio; exists so the
  // joint-distribution correctness harness can demonstrate that it
  // detects a broken kernel.  Never enable for inference.
  bool invert_acceptance = false;
};

struct SweepStats {
  long alloc_proposed = 0;
  long alloc_accepted = 0;
  long alloc_tail_proposals = 0;  // proposals with j > max{k}
  long swap_random_attempted = 0;
  long swap_random_accepted = 0;
  long swap_neighbor_attempted = 0;
  long swap_neighbor_accepted = 0;
  double mean_realized_pairs = 0.0;  // exact kernel: pairs realized per draw

  double alloc_accept_rate() const {
    return alloc_proposed ? static_cast<double>(alloc_accepted) / alloc_proposed : 0.0;
  }
};

// The comparison protocol's initial state: all data in one cluster with
// parameters drawn from the prior.
inline ChainState init_single_cluster(const ModelSpec& spec,
                                      std::vector<double> data,
                                      Philox4x64& rng) {
  validate(spec);
  if (data.empty()) throw std::invalid_argument("init_single_cluster: no data");
  const int n = static_cast<int>(data.size());
  StickState sticks;
  sticks.extend_one(spec, rng);
  return ChainState(spec, std::move(data), AllocationState::single_cluster(n),
                    std::move(sticks));
}

// Prior draw of the full state (used by the correctness harness).
inline ChainState init_from_prior(const ModelSpec& spec, int n,
                                  Philox4x64& rng) {
  StickState sticks;
  PriorSample prior = sample_prior_retrospective(n, spec, sticks, rng);
  std::vector<double> data(n);
  for (int i = 0; i < n; ++i)
    data[i] = rnorm(rng, prior.values[i].mean, std::sqrt(prior.values[i].variance));
  AllocationState alloc(prior.allocations);
  sticks.truncate(alloc.max_k());
  return ChainState(spec, std::move(data), std::move(alloc), std::move(sticks));
}

// Redraw the data from the observation model given the current (K, Z);
// the regeneration step of the joint-distribution correctness test.
inline void regenerate_data(ChainState& state, Philox4x64& rng) {
  for (int i = 0; i < state.n(); ++i) {
    const ComponentParams& z = state.sticks.atom(state.alloc.label(i));
    state.data[i] = rnorm(rng, z.mean, std::sqrt(z.variance));
  }
}

}  // namespace retrodp
