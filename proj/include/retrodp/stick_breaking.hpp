// Lazily realized stick-breaking representation of the Dirichlet random
// measure, retrospective sampling from the prior, and the Polya-urn
// marginal sampler it is equivalent to.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "retrodp/gaussian_model.hpp"
#include "retrodp/rng.hpp"

namespace retrodp {

// Stick draws are clamped this far from {0,1} so logs stay finite.
constexpr double kStickClamp = 1e-15;

// Realized prefix of the infinite sequence (V_j, Z_j).  Weights follow
// p_j = V_j prod_{l<j}(1-V_l); bookkeeping is multiplicative in log space
// via the running surplus log prod_{l<=j}(1-V_l), so the comparison
// "U <= sum_{l<=j} p_l" is evaluated as log(1-U) >= log-surplus without
// the cumulative sum ever saturating at 1.
class StickState {
 public:
  StickState() : log_surplus_{0.0} {}

  static StickState from_sticks(std::vector<double> v,
                                std::vector<ComponentParams> atoms) {
    if (v.size() != atoms.size())
      throw std::invalid_argument("from_sticks: sticks/atoms size mismatch");
    StickState s;
    for (std::size_t i = 0; i < v.size(); ++i) s.push(v[i], atoms[i]);
    return s;
  }

  int frontier() const { return static_cast<int>(v_.size()); }

  double stick(int j) const { return v_[check_index(j) - 1]; }
  const ComponentParams& atom(int j) const { return atoms_[check_index(j) - 1]; }
  ComponentParams& atom(int j) { return atoms_[check_index(j) - 1]; }

  // p_j for a realized index.
  double weight(int j) const {
    check_index(j);
    return v_[j - 1] * std::exp(log_surplus_[j - 1]);
  }

  double log_weight(int j) const {
    check_index(j);
    return std::log(v_[j - 1]) + log_surplus_[j - 1];
  }

  // log prod_{l<=j}(1-V_l); j = 0 gives 0.
  double log_surplus(int j) const {
    if (j < 0 || j > frontier())
      throw std::logic_error("log_surplus: index beyond frontier");
    return log_surplus_[j];
  }

  // sum_{l<=j} p_l, computed as 1 - prod(1-V_l).
  double prefix_mass(int j) const { return -std::expm1(log_surplus(j)); }

  double log_tail_mass() const { return log_surplus_.back(); }
  double tail_mass() const { return std::exp(log_surplus_.back()); }

  void push(double v, const ComponentParams& z) {
    if (!(v >= 0.0) || v > 1.0)
      throw std::invalid_argument("push: stick fraction outside [0,1]");
    v_.push_back(v);
    atoms_.push_back(z);
    log_surplus_.push_back(log_surplus_.back() + std::log1p(-v));
  }

  // Replace V_j in place and rebuild the surplus from j on.
  void set_stick(int j, double v) {
    check_index(j);
    v_[j - 1] = v;
    rebuild_surplus_from(j);
  }

  void swap_adjacent(int j) {
    check_index(j + 1);
    std::swap(v_[j - 1], v_[j]);
    std::swap(atoms_[j - 1], atoms_[j]);
    rebuild_surplus_from(j);
  }

  // Discard realized pairs beyond j; they can always be redrawn from the
  // prior when next needed.
  void truncate(int j) {
    if (j < 0 || j > frontier())
      throw std::logic_error("truncate: index beyond frontier");
    v_.resize(j);
    atoms_.resize(j);
    log_surplus_.resize(j + 1);
  }

  // Realize prior pairs up to index j (no-op when already there).
  void extend_to(int j, const ModelSpec& spec, Philox4x64& rng) {
    while (frontier() < j) extend_one(spec, rng);
  }

  void extend_one(const ModelSpec& spec, Philox4x64& rng) {
    double v = rbeta1(rng, spec.alpha);
    v = std::min(std::max(v, kStickClamp), 1.0 - kStickClamp);
    push(v, sample_base(spec, rng));
  }

 private:
  int check_index(int j) const {
    if (j < 1 || j > frontier())
      throw std::logic_error("stick index beyond frontier; extend first");
    return j;
  }

  void rebuild_surplus_from(int j) {
    for (int l = j; l <= frontier(); ++l)
      log_surplus_[l] = log_surplus_[l - 1] + std::log1p(-v_[l - 1]);
  }

  std::vector<double> v_;
  std::vector<ComponentParams> atoms_;
  std::vector<double> log_surplus_;  // size frontier()+1, [0] = 0
};

struct PriorSample {
  std::vector<ComponentParams> values;  // X_i
  std::vector<int> allocations;         // K_i (1-based component indices)
};

// Inverse-CDF search: smallest realized j with sum_{l<=j} p_l >= u,
// extending from the prior as needed.  This is the retrospective step.
inline int retrospective_index(StickState& sticks, double u,
                               const ModelSpec& spec, Philox4x64& rng) {
  const double target = std::log1p(-u);  // find first log_surplus <= target
  int j = 1;
  for (;; ++j) {
    if (j > sticks.frontier()) sticks.extend_one(spec, rng);
    if (sticks.log_surplus(j) <= target) return j;
  }
}

// Sampling from the DP prior by retrospection: decision variables first,
// stick-breaking pairs only as far as the decisions require.
inline PriorSample sample_prior_retrospective(int n, const ModelSpec& spec,
                                              StickState& sticks,
                                              Philox4x64& rng) {
  if (n < 1) throw std::invalid_argument("sample_prior_retrospective: n >= 1");
  validate(spec);
  sticks.extend_to(1, spec, rng);
  PriorSample out;
  out.values.reserve(n);
  out.allocations.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int k = retrospective_index(sticks, runif(rng), spec, rng);
    out.allocations.push_back(k);
    out.values.push_back(sticks.atom(k));
  }
  return out;
}

inline PriorSample sample_prior_retrospective(int n, const ModelSpec& spec,
                                              Philox4x64& rng) {
  StickState sticks;
  return sample_prior_retrospective(n, spec, sticks, rng);
}

struct UrnSample {
  std::vector<int> labels;              // cluster id per datum, 1-based
  std::vector<ComponentParams> values;  // parameter per cluster id
};

// Marginal sampler: label i joins existing cluster j with probability
// n_{i,j}/(alpha+i-1), else opens a new cluster with a fresh base draw.
inline UrnSample sample_polya_urn(int n, const ModelSpec& spec,
                                  Philox4x64& rng) {
  if (n < 1) throw std::invalid_argument("sample_polya_urn: n >= 1");
  validate(spec);
  UrnSample out;
  std::vector<int> sizes;
  out.labels.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double u = runif(rng) * (spec.alpha + static_cast<double>(i));
    double cum = 0.0;
    int pick = -1;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
      cum += sizes[c];
      if (u <= cum) {
        pick = static_cast<int>(c);
        break;
      }
    }
    if (pick < 0) {
      sizes.push_back(1);
      out.values.push_back(sample_base(spec, rng));
      out.labels.push_back(static_cast<int>(sizes.size()));
    } else {
      ++sizes[pick];
      out.labels.push_back(pick + 1);
    }
  }
  return out;
}

}  // namespace retrodp
