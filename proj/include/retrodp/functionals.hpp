// Simulation of functionals of the Dirichlet random measure: linear
// functionals I = ∫ g dP under the prior and the posterior, and the exact
// predominant species (the atom with the largest weight).

#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "retrodp/chain_state.hpp"

namespace retrodp {

// A bounded integrand with a certified truncation budget for prior draws.
struct FunctionalSpec {
  std::function<double(const ComponentParams&)> g;
  double sup_abs_g = 1.0;
  double tolerance = 1e-8;

  double eval(const ComponentParams& z) const {
    const double v = g(z);
    if (!(std::abs(v) <= sup_abs_g))
      throw std::domain_error("FunctionalSpec: |g| exceeded the stated bound");
    return v;
  }
};

inline void validate(const FunctionalSpec& fs) {
  if (!fs.g) throw std::invalid_argument("FunctionalSpec: g not set");
  if (!std::isfinite(fs.sup_abs_g) || !(fs.sup_abs_g >= 0.0))
    throw std::invalid_argument("FunctionalSpec: sup_abs_g must be finite");
  if (!(fs.tolerance > 0.0))
    throw std::invalid_argument("FunctionalSpec: tolerance must be positive");
}

// One draw from the prior law of ∫ g dP, truncated once the remaining
// mass cannot move the value by more than the tolerance:
// |tail| <= sup|g| * tail mass < tolerance.
inline double prior_linear_functional_draw(const FunctionalSpec& fs,
                                           const ModelSpec& spec,
                                           Philox4x64& rng) {
  validate(fs);
  StickState sticks;
  double acc = 0.0;
  while (fs.sup_abs_g * sticks.tail_mass() >= fs.tolerance) {
    sticks.extend_one(spec, rng);
    const int j = sticks.frontier();
    acc += fs.eval(sticks.atom(j)) * sticks.weight(j);
  }
  return acc;
}

// Posterior draw given a realized prefix: the realized part plus an
// independent prior draw of I scaled by the leftover stick mass,
//   sum_{j<=max{k}} g(Z_j) p_j  +  I * prod_{l<=max{k}} (1 - V_l).
inline double posterior_linear_functional_draw(const StickState& sticks,
                                               int prefix_len,
                                               const ModelSpec& spec,
                                               const FunctionalSpec& fs,
                                               Philox4x64& rng) {
  validate(fs);
  if (sticks.frontier() < prefix_len)
    throw std::logic_error("posterior_linear_functional_draw: prefix not realized");
  double acc = 0.0;
  for (int j = 1; j <= prefix_len; ++j)
    acc += fs.eval(sticks.atom(j)) * sticks.weight(j);
  return acc + prior_linear_functional_draw(fs, spec, rng) *
                   std::exp(sticks.log_surplus(prefix_len));
}

inline double posterior_linear_functional_draw(const ChainState& state,
                                               const FunctionalSpec& fs,
                                               Philox4x64& rng) {
  return posterior_linear_functional_draw(state.sticks, state.alloc.max_k(),
                                          state.spec, fs, rng);
}

struct PredominantSpecies {
  int index = 0;
  ComponentParams atom;
  double weight = 0.0;
};

// The exact argmax component of the infinite weight sequence: extend from
// the prior until the leftover mass drops below the best realized weight,
// at which point no unrealized component can overtake it.
inline PredominantSpecies predominant_species(StickState& sticks,
                                              const ModelSpec& spec,
                                              Philox4x64& rng) {
  sticks.extend_to(1, spec, rng);
  int best = 1;
  double best_w = sticks.weight(1);
  for (int j = 2; j <= sticks.frontier(); ++j)
    if (sticks.weight(j) > best_w) {
      best = j;
      best_w = sticks.weight(j);
    }
  while (sticks.tail_mass() >= best_w) {
    sticks.extend_one(spec, rng);
    const int j = sticks.frontier();
    if (sticks.weight(j) > best_w) {
      best = j;
      best_w = sticks.weight(j);
    }
  }
  return {best, sticks.atom(best), best_w};
}

}  // namespace retrodp
