// Marginal-method baseline: Neal's auxiliary-variable Gibbs sampler
// (Algorithm 8) for non-conjugate mixtures, with the random measure
// integrated out.  Cluster labels carry no meaning; all outputs are
// invariant under relabelling.

#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "retrodp/gaussian_model.hpp"
#include "retrodp/stick_breaking.hpp"

namespace retrodp {

struct ClusterState {
  std::vector<int> labels;              // cluster id per datum (arbitrary ids)
  std::map<int, ComponentParams> params;
  std::map<int, int> sizes;
  int next_id = 1;

  int n() const { return static_cast<int>(labels.size()); }
  int num_clusters() const { return static_cast<int>(sizes.size()); }

  int fresh_id() { return next_id++; }

  void check() const {
    std::map<int, int> tally;
    for (int c : labels) ++tally[c];
    if (tally != sizes) throw std::logic_error("ClusterState: sizes out of sync");
    for (const auto& [id, cnt] : sizes)
      if (!params.count(id)) throw std::logic_error("ClusterState: missing params");
  }
};

inline ClusterState cluster_state_single(int n, const ModelSpec& spec,
                                         Philox4x64& rng) {
  ClusterState cs;
  cs.labels.assign(n, 1);
  cs.sizes[1] = n;
  cs.params[1] = sample_base(spec, rng);
  cs.next_id = 2;
  return cs;
}

// Prior draw of the cluster structure via the Polya urn (the marginal law
// of the allocations), used to seed correctness checks.
inline ClusterState cluster_state_from_prior(int n, const ModelSpec& spec,
                                             Philox4x64& rng) {
  UrnSample urn = sample_polya_urn(n, spec, rng);
  ClusterState cs;
  cs.labels = urn.labels;
  for (std::size_t c = 0; c < urn.values.size(); ++c)
    cs.params[static_cast<int>(c) + 1] = urn.values[c];
  for (int c : cs.labels) ++cs.sizes[c];
  cs.next_id = static_cast<int>(urn.values.size()) + 1;
  return cs;
}

// One Algorithm-8 sweep with m_aux auxiliary states: for each datum,
// remove it (its parameter becomes auxiliary slot 1 if it was a
// singleton), reassign among existing clusters ∝ n_{-i,c} f(Y_i|φ_c) and
// auxiliaries ∝ (α/m) f(Y_i|φ_aux), then refresh all cluster parameters
// with the conjugate two-block move.
inline void neal8_sweep(ClusterState& cs, const std::vector<double>& y,
                        const ModelSpec& spec, int m_aux, Philox4x64& rng) {
  if (m_aux < 1) throw std::invalid_argument("neal8_sweep: m_aux >= 1");
  if (static_cast<int>(y.size()) != cs.n())
    throw std::invalid_argument("neal8_sweep: data/state size mismatch");

  std::vector<ComponentParams> aux(m_aux);
  for (int i = 0; i < cs.n(); ++i) {
    const int old = cs.labels[i];
    const bool singleton = cs.sizes[old] == 1;
    if (singleton) {
      aux[0] = cs.params[old];
      cs.params.erase(old);
      cs.sizes.erase(old);
      for (int a = 1; a < m_aux; ++a) aux[a] = sample_base(spec, rng);
    } else {
      --cs.sizes[old];
      for (int a = 0; a < m_aux; ++a) aux[a] = sample_base(spec, rng);
    }

    // log weights, max-shifted: densities underflow at bad initialisations
    std::vector<int> ids;
    std::vector<double> lw;
    for (const auto& [id, cnt] : cs.sizes) {
      ids.push_back(id);
      lw.push_back(std::log(static_cast<double>(cnt)) +
                   obs_logdensity(y[i], cs.params[id]));
    }
    const double log_aux_prior =
        std::log(spec.alpha / static_cast<double>(m_aux));
    for (int a = 0; a < m_aux; ++a)
      lw.push_back(log_aux_prior + obs_logdensity(y[i], aux[a]));

    double mx = lw[0];
    for (double w : lw) mx = std::max(mx, w);
    double total = 0.0;
    for (double& w : lw) {
      w = std::exp(w - mx);
      total += w;
    }
    double u = runif(rng) * total;
    std::size_t pick = 0;
    for (; pick + 1 < lw.size(); ++pick) {
      u -= lw[pick];
      if (u <= 0.0) break;
    }

    if (pick < ids.size()) {
      cs.labels[i] = ids[pick];
      ++cs.sizes[ids[pick]];
    } else {
      const int id = cs.fresh_id();
      cs.labels[i] = id;
      cs.sizes[id] = 1;
      cs.params[id] = aux[pick - ids.size()];
    }
  }

  std::map<int, std::vector<double>> grouped;
  for (int i = 0; i < cs.n(); ++i) grouped[cs.labels[i]].push_back(y[i]);
  for (auto& [id, ys] : grouped)
    cs.params[id] = update_component_params(cs.params[id], ys, spec, rng);
}

// Redraw the data given the cluster parameters (regeneration step of the
// joint-distribution correctness test).
inline void regenerate_data(const ClusterState& cs, std::vector<double>& y,
                            Philox4x64& rng) {
  for (int i = 0; i < cs.n(); ++i) {
    const ComponentParams& z = cs.params.at(cs.labels[i]);
    y[i] = rnorm(rng, z.mean, std::sqrt(z.variance));
  }
}

}  // namespace retrodp
