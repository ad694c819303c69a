// The benchmark driver: run configuration, chain execution for the three
// samplers, IAT summaries, trace/summary persistence, and the
// side-by-side sampler comparison.

#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "retrodp/conditional_sampler.hpp"
#include "retrodp/datasets.hpp"
#include "retrodp/diagnostics.hpp"
#include "retrodp/neal8.hpp"
#include "retrodp/trace.hpp"

namespace retrodp {

constexpr std::uint64_t kChainStream = 0x636861696eULL;  // "chain"

struct RunConfig {
  SamplerKind sampler = SamplerKind::kRetroMH;
  std::string dataset = "bimod";     // "lepto", "bimod", or empty with data_file
  std::string data_file;             // one value per line when set
  int n = 100;
  std::uint64_t data_seed = 20061123;
  double alpha = 1.0;
  bool update_alpha = false;
  double alpha_prior_shape = 2.0;
  double alpha_prior_rate = 2.0;
  long iterations = 100000;
  long burn_in = 10000;
  std::uint64_t seed = 1;
  std::vector<int> monitored;  // 1-based data indices; empty = dataset default
  bool include_m = true;
  bool include_d = true;
  bool label_swaps = true;
  bool accelerations = true;
  bool random_scan = true;
  HyperMeanRule hyper_mu = HyperMeanRule::kMidrange;
  std::optional<double> fixed_variance;
  int m_aux = 3;
};

// Dataset-specific defaults: the components the data identify well and
// badly (lepto: data 1,2; bimod: data 2,3).
inline std::vector<int> default_monitored(const std::string& dataset) {
  if (dataset == "lepto") return {1, 2};
  if (dataset == "bimod") return {2, 3};
  return {1};
}

inline void validate(const RunConfig& cfg) {
  if (cfg.burn_in < 0 || cfg.burn_in >= cfg.iterations)
    throw std::invalid_argument("config: require 0 <= burn_in < iterations");
  if (cfg.data_file.empty()) {
    if (cfg.dataset != "lepto" && cfg.dataset != "bimod")
      throw std::invalid_argument("config: dataset must be lepto, bimod, or a file");
    if (cfg.n != 100 && cfg.n != 1000)
      throw std::invalid_argument("config: named datasets come in n = 100 or 1000");
  }
  if (cfg.sampler == SamplerKind::kRetroExact && !cfg.fixed_variance)
    throw std::invalid_argument(
        "config: the exact sampler needs the bounded model (set a fixed variance)");
  if (cfg.sampler == SamplerKind::kNeal8 && cfg.update_alpha)
    throw std::invalid_argument("config: the alpha update is implemented for the conditional samplers");
  if (cfg.m_aux < 1) throw std::invalid_argument("config: m_aux >= 1");
  for (int i : cfg.monitored)
    if (i < 1 || i > cfg.n)
      throw std::invalid_argument("config: monitored index out of range");
}

inline std::vector<double> load_data(const RunConfig& cfg) {
  if (cfg.data_file.empty()) return generate_data(cfg.dataset, cfg.n, cfg.data_seed);
  std::ifstream in(cfg.data_file);
  if (!in) throw std::runtime_error("cannot open data file: " + cfg.data_file);
  std::vector<double> y;
  double v;
  while (in >> v) y.push_back(v);
  if (y.size() < 2) throw std::runtime_error("data file has fewer than two values");
  return y;
}

struct FunctionalSummary {
  std::string name;
  double mean = 0.0;
  IATEstimate iat;
};

struct RunResult {
  RunConfig config;
  Trace trace;
  std::vector<FunctionalSummary> summaries;
  double final_alpha = 0.0;
};

namespace detail {

inline std::vector<FunctionalSummary> summarize(const Trace& trace,
                                                bool include_m, bool include_d) {
  std::vector<FunctionalSummary> out;
  for (const Series& s : trace_series(trace)) {
    if (s.name == "M" && !include_m) continue;
    if (s.name == "D" && !include_d) continue;
    FunctionalSummary fs;
    fs.name = s.name;
    double mean = 0.0;
    for (double v : s.values) mean += v;
    fs.mean = mean / static_cast<double>(s.values.size());
    fs.iat = iat(s.values);
    out.push_back(std::move(fs));
  }
  return out;
}

}  // namespace detail

// Run the configured sampler on explicit data (no dataset-size rule); the
// initial state allocates all data to one cluster with parameters drawn
// from the prior.
inline RunResult run_chain_on_data(const RunConfig& cfg,
                                   const std::vector<double>& data) {
  BaseMeasureParams base = data_driven_hyperparams(data, cfg.hyper_mu);
  ModelSpec spec{base, cfg.alpha, cfg.fixed_variance};
  validate(spec);

  Philox4x64 rng(cfg.seed, kChainStream);
  RunResult result;
  result.config = cfg;
  result.trace.monitored_indices =
      cfg.monitored.empty() ? default_monitored(cfg.dataset) : cfg.monitored;
  for (int i : result.trace.monitored_indices)
    if (i < 1 || i > static_cast<int>(data.size()))
      throw std::invalid_argument("monitored index out of range for the data");
  // 0-based for the stats helpers
  std::vector<int> mon0;
  for (int i : result.trace.monitored_indices) mon0.push_back(i - 1);

  if (cfg.sampler == SamplerKind::kNeal8) {
    ClusterState cs = cluster_state_single(static_cast<int>(data.size()), spec, rng);
    for (long t = 1; t <= cfg.iterations; ++t) {
      neal8_sweep(cs, data, spec, cfg.m_aux, rng);
      if (t <= cfg.burn_in) continue;
      MonitoredStats ms = monitored_stats(cs, data, mon0);
      TraceRecord r;
      r.iter = t;
      r.num_clusters = ms.num_clusters;
      r.deviance = ms.deviance;
      r.monitored = ms.selected_means;
      r.n_star = ms.num_clusters;
      r.accept_alloc = 1.0;  // direct Gibbs draw
      result.trace.records.push_back(std::move(r));
    }
    result.final_alpha = spec.alpha;
  } else {
    SweepConfig sweep_cfg;
    sweep_cfg.random_scan = cfg.random_scan;
    sweep_cfg.accelerations = cfg.accelerations;
    sweep_cfg.label_swaps = cfg.label_swaps;
    sweep_cfg.update_alpha = cfg.update_alpha;
    sweep_cfg.alpha_prior_shape = cfg.alpha_prior_shape;
    sweep_cfg.alpha_prior_rate = cfg.alpha_prior_rate;
    sweep_cfg.exact_allocations = cfg.sampler == SamplerKind::kRetroExact;
    ChainState state = init_single_cluster(spec, data, rng);
    for (long t = 1; t <= cfg.iterations; ++t) {
      SweepStats stats = sweep(state, sweep_cfg, rng);
      if (t <= cfg.burn_in) continue;
      MonitoredStats ms = monitored_stats(state, mon0);
      TraceRecord r;
      r.iter = t;
      r.num_clusters = ms.num_clusters;
      r.deviance = ms.deviance;
      r.monitored = ms.selected_means;
      r.n_star = state.sticks.frontier();
      r.accept_alloc = stats.alloc_accept_rate();
      r.swap_random_accepts = static_cast<int>(stats.swap_random_accepted);
      r.swap_neighbor_accepts = static_cast<int>(stats.swap_neighbor_accepted);
      result.trace.records.push_back(std::move(r));
    }
    result.final_alpha = state.spec.alpha;
  }
  result.summaries = detail::summarize(result.trace, cfg.include_m, cfg.include_d);
  return result;
}

inline RunResult run_chain(const RunConfig& cfg) {
  validate(cfg);
  return run_chain_on_data(cfg, load_data(cfg));
}

// --- output files -----------------------------------------------------------

inline std::string summary_table(const RunResult& result) {
  std::ostringstream os;
  os << "sampler " << sampler_name(result.config.sampler) << ", dataset "
     << (result.config.data_file.empty() ? result.config.dataset + " " + std::to_string(result.config.n)
                                         : result.config.data_file)
     << ", alpha "
     << (result.config.update_alpha ? std::string("Gamma prior") : fmt_double(result.config.alpha))
     << ", seed " << result.config.seed << "\n";
  os << "kept " << result.trace.records.size() << " of " << result.config.iterations
     << " iterations (burn-in " << result.config.burn_in << ")\n\n";
  os << "functional        mean          tau_hat (s.e.)        window\n";
  for (const FunctionalSummary& fs : result.summaries) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-12s %12.5g    %10.4g (%.4g)   %6d%s\n",
                  fs.name.c_str(), fs.mean, fs.iat.tau_hat, fs.iat.std_err,
                  fs.iat.window,
                  fs.iat.window_converged ? "" : "  [window not converged]");
    os << line;
  }
  return os.str();
}

inline void write_summary_kv(const std::string& path, const RunResult& result) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open summary file: " + path);
  out << "rng=" << Philox4x64::name << "\n";
  out << "sampler=" << sampler_name(result.config.sampler) << "\n";
  out << "dataset=" << (result.config.data_file.empty() ? result.config.dataset : result.config.data_file) << "\n";
  out << "n=" << result.config.n << "\n";
  out << "alpha=" << fmt_double(result.config.alpha) << "\n";
  out << "update_alpha=" << (result.config.update_alpha ? 1 : 0) << "\n";
  out << "iterations=" << result.config.iterations << "\n";
  out << "burn_in=" << result.config.burn_in << "\n";
  out << "seed=" << result.config.seed << "\n";
  out << "data_seed=" << result.config.data_seed << "\n";
  out << "kept=" << result.trace.records.size() << "\n";
  for (const FunctionalSummary& fs : result.summaries) {
    out << "mean_" << fs.name << "=" << fmt_double(fs.mean) << "\n";
    out << "tau_" << fs.name << "=" << fmt_double(fs.iat.tau_hat) << "\n";
    out << "se_" << fs.name << "=" << fmt_double(fs.iat.std_err) << "\n";
    out << "window_" << fs.name << "=" << fs.iat.window << "\n";
    out << "window_converged_" << fs.name << "=" << (fs.iat.window_converged ? 1 : 0) << "\n";
  }
}

inline void write_outputs(const RunResult& result, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_trace_csv(out_dir + "/trace.csv", result.trace, result.config.seed);
  std::ofstream txt(out_dir + "/summary.txt");
  if (!txt) throw std::runtime_error("cannot open summary.txt");
  txt << summary_table(result);
  write_summary_kv(out_dir + "/summary.kv", result);
}

// --- comparison -------------------------------------------------------------

// Runs each configuration (in parallel, one thread per chain) and tables
// tau_hat (s.e.) per sampler x functional, matching the report layout.
// All configurations must target the same dataset; the monitored
// functionals compared are the intersection across configurations.
inline std::vector<RunResult> run_all(const std::vector<RunConfig>& configs) {
  std::vector<RunResult> results(configs.size());
  std::vector<std::string> errors(configs.size());
  std::vector<std::thread> workers;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    workers.emplace_back([c, &configs, &results, &errors] {
      try {
        results[c] = run_chain(configs[c]);
      } catch (const std::exception& e) {
        errors[c] = e.what();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const std::string& e : errors)
    if (!e.empty()) throw std::runtime_error("compare: chain failed: " + e);
  return results;
}

inline std::string comparison_table(const std::vector<RunResult>& results) {
  if (results.size() < 2)
    throw std::invalid_argument("compare: need at least two configurations");
  std::vector<std::string> common;
  for (const FunctionalSummary& fs : results[0].summaries) {
    bool everywhere = true;
    for (const RunResult& r : results) {
      bool found = false;
      for (const FunctionalSummary& g : r.summaries) found |= g.name == fs.name;
      everywhere &= found;
    }
    if (everywhere) common.push_back(fs.name);
  }
  if (common.empty())
    throw std::invalid_argument("compare: no monitored functional common to all configurations");

  std::ostringstream os;
  os << "integrated autocorrelation times, tau_hat (s.e.)\n\n";
  {
    char head[160];
    std::snprintf(head, sizeof(head), "%-24s", "method");
    os << head;
    for (const std::string& name : common) {
      char cell[64];
      std::snprintf(cell, sizeof(cell), " %20s", name.c_str());
      os << cell;
    }
    os << "\n";
  }
  for (const RunResult& r : results) {
    const std::string label =
        sampler_name(r.config.sampler) + " (seed " + std::to_string(r.config.seed) + ")";
    char lead[160];
    std::snprintf(lead, sizeof(lead), "%-24s", label.c_str());
    os << lead;
    for (const std::string& name : common) {
      for (const FunctionalSummary& fs : r.summaries) {
        if (fs.name != name) continue;
        char cell[64];
        std::snprintf(cell, sizeof(cell), " %12.4g (%.3g)", fs.iat.tau_hat,
                      fs.iat.std_err);
        os << cell;
      }
    }
    os << "\n";
  }
  return os.str();
}

inline void validate_comparable(const std::vector<RunConfig>& configs) {
  if (configs.size() < 2)
    throw std::invalid_argument("compare: need at least two configurations");
  for (const RunConfig& cfg : configs) validate(cfg);
  for (std::size_t c = 1; c < configs.size(); ++c) {
    const bool same_source =
        configs[c].dataset == configs[0].dataset &&
        configs[c].data_file == configs[0].data_file &&
        configs[c].n == configs[0].n &&
        configs[c].data_seed == configs[0].data_seed;
    if (!same_source)
      throw std::invalid_argument("compare: configurations must share the dataset");
  }
}

inline std::string compare(const std::vector<RunConfig>& configs) {
  validate_comparable(configs);
  return comparison_table(run_all(configs));
}

}  // namespace retrodp
