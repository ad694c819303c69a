// Joint-distribution correctness test: compare statistics of (parameters,
// data) under (a) repeated independent prior-then-likelihood draws and
// (b) a chain alternating one sampler sweep with data regeneration.  A
// correct kernel leaves the two laws identical; the statistics are
// compared with two-sample Kolmogorov-Smirnov tests.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "retrodp/conditional_sampler.hpp"
#include "retrodp/diagnostics.hpp"
#include "retrodp/neal8.hpp"

namespace retrodp {

struct GewekeConfig {
  SamplerKind sampler = SamplerKind::kRetroMH;
  int n_data = 5;
  long transitions = 100000;
  long marginal_draws = 20000;
  int thin = 10;  // keep every thin-th successive-conditional sample
  ModelSpec spec;
  SweepConfig sweep;
  int m_aux = 3;
};

namespace detail {

inline double draw_prior_alpha(const GewekeConfig& cfg, Philox4x64& rng) {
  return rgamma(rng, cfg.sweep.alpha_prior_shape, cfg.sweep.alpha_prior_rate);
}

inline void record_conditional(const ChainState& s, bool with_alpha,
                               std::map<std::string, std::vector<double>>& out) {
  out["M"].push_back(s.alloc.alive_count());
  out["V1"].push_back(s.sticks.stick(1));
  out["p1"].push_back(s.sticks.weight(1));
  if (with_alpha) out["alpha"].push_back(s.spec.alpha);
}

inline void record_marginal(const ClusterState& cs, const std::vector<double>& y,
                            std::map<std::string, std::vector<double>>& out) {
  out["M"].push_back(cs.num_clusters());
  out["D"].push_back(deviance(cs.sizes, cs.params, y));
  out["Z1"].push_back(cs.params.at(cs.labels[0]).mean);
}

}  // namespace detail

// Returns a p-value per monitored statistic.
inline std::map<std::string, double> geweke_test(const GewekeConfig& cfg,
                                                 Philox4x64& rng) {
  validate(cfg.spec);
  const bool conditional = cfg.sampler != SamplerKind::kNeal8;
  const bool with_alpha = conditional && cfg.sweep.update_alpha;

  std::map<std::string, std::vector<double>> mc, sc;

  // (a) marginal-conditional: independent prior draws of (state, data)
  for (long r = 0; r < cfg.marginal_draws; ++r) {
    ModelSpec spec = cfg.spec;
    if (with_alpha) spec.alpha = detail::draw_prior_alpha(cfg, rng);
    if (conditional) {
      ChainState s = init_from_prior(spec, cfg.n_data, rng);
      detail::record_conditional(s, with_alpha, mc);
    } else {
      ClusterState cs = cluster_state_from_prior(cfg.n_data, spec, rng);
      std::vector<double> y(cfg.n_data);
      regenerate_data(cs, y, rng);
      detail::record_marginal(cs, y, mc);
    }
  }

  // (b) successive-conditional: sweep, then regenerate the data
  if (conditional) {
    ModelSpec spec = cfg.spec;
    SweepConfig sweep_cfg = cfg.sweep;
    sweep_cfg.exact_allocations = cfg.sampler == SamplerKind::kRetroExact;
    if (with_alpha) spec.alpha = detail::draw_prior_alpha(cfg, rng);
    ChainState s = init_from_prior(spec, cfg.n_data, rng);
    for (long t = 0; t < cfg.transitions; ++t) {
      sweep(s, sweep_cfg, rng);
      regenerate_data(s, rng);
      if (t % cfg.thin == 0) detail::record_conditional(s, with_alpha, sc);
    }
  } else {
    ClusterState cs = cluster_state_from_prior(cfg.n_data, cfg.spec, rng);
    std::vector<double> y(cfg.n_data);
    regenerate_data(cs, y, rng);
    for (long t = 0; t < cfg.transitions; ++t) {
      neal8_sweep(cs, y, cfg.spec, cfg.m_aux, rng);
      regenerate_data(cs, y, rng);
      if (t % cfg.thin == 0) detail::record_marginal(cs, y, sc);
    }
  }

  std::map<std::string, double> pvalues;
  for (const auto& [stat, a] : mc) pvalues[stat] = ks_test_pvalue(a, sc.at(stat));
  return pvalues;
}

}  // namespace retrodp
