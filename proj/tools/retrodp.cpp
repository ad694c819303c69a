// Command-line harness: dataset generation, sampler runs with IAT
// summaries, the observed-partition experiment, sampler comparison, and
// the joint-distribution correctness test.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "retrodp/retrodp.hpp"

namespace {

retrodp::SamplerKind parse_sampler(const std::string& s) {
  if (s == "retro-mh") return retrodp::SamplerKind::kRetroMH;
  if (s == "retro-exact") return retrodp::SamplerKind::kRetroExact;
  if (s == "neal8") return retrodp::SamplerKind::kNeal8;
  throw CLI::ValidationError("--sampler", "expected retro-mh, retro-exact, or neal8");
}

struct CommonOpts {
  std::string sampler = "retro-mh";
  std::string dataset = "bimod";
  std::string data_file;
  int n = 100;
  double alpha = 1.0;
  bool update_alpha = false;
  double alpha_shape = 2.0;
  double alpha_rate = 2.0;
  long iters = 100000;
  long burnin = 10000;
  std::uint64_t seed = 1;
  std::uint64_t data_seed = 20061123;
  std::vector<int> monitor;
  bool no_label_swap = false;
  bool no_accel = false;
  bool fixed_scan = false;
  std::string hyper_mu = "midrange";
  double fixed_variance = 0.0;  // 0 = free-variance model
  bool full_scale = false;
  int m_aux = 3;
  std::string out = "out";
};

void add_common_flags(CLI::App* cmd, CommonOpts& o, bool with_sampler = true) {
  if (with_sampler)
    cmd->add_option("--sampler", o.sampler, "retro-mh | retro-exact | neal8");
  cmd->add_option("--dataset", o.dataset, "lepto | bimod");
  cmd->add_option("--data-file", o.data_file, "file with one observation per line");
  cmd->add_option("--n", o.n, "dataset size (named datasets: 100 or 1000)");
  cmd->add_option("--alpha", o.alpha, "DP concentration");
  cmd->add_flag("--update-alpha", o.update_alpha, "sample alpha under a gamma prior");
  cmd->add_option("--alpha-shape", o.alpha_shape, "gamma prior shape for alpha");
  cmd->add_option("--alpha-rate", o.alpha_rate, "gamma prior rate for alpha");
  cmd->add_option("--iters", o.iters, "MCMC iterations");
  cmd->add_option("--burnin", o.burnin, "burn-in iterations");
  cmd->add_option("--seed", o.seed, "chain seed");
  cmd->add_option("--data-seed", o.data_seed, "dataset generation seed");
  cmd->add_option("--monitor", o.monitor, "data indices whose component mean is monitored")
      ->delimiter(',');
  cmd->add_flag("--no-label-swap", o.no_label_swap, "disable label-switching moves");
  cmd->add_flag("--no-accel", o.no_accel, "disable the per-update frontier sync");
  cmd->add_flag("--fixed-scan", o.fixed_scan, "sequential instead of random scan");
  cmd->add_option("--hyper-mu", o.hyper_mu, "midrange | paper-literal");
  cmd->add_option("--fixed-variance", o.fixed_variance,
                  "pin the component variance (bounded model; required for retro-exact)");
  cmd->add_flag("--full-scale", o.full_scale, "2e6 iterations, 1e5 burn-in");
  cmd->add_option("--m-aux", o.m_aux, "auxiliary states for neal8");
  cmd->add_option("--out", o.out, "output directory");
}

retrodp::RunConfig to_config(const CommonOpts& o) {
  retrodp::RunConfig cfg;
  cfg.sampler = parse_sampler(o.sampler);
  cfg.dataset = o.dataset;
  cfg.data_file = o.data_file;
  cfg.n = o.n;
  cfg.data_seed = o.data_seed;
  cfg.alpha = o.alpha;
  cfg.update_alpha = o.update_alpha;
  cfg.alpha_prior_shape = o.alpha_shape;
  cfg.alpha_prior_rate = o.alpha_rate;
  cfg.iterations = o.full_scale ? 2000000 : o.iters;
  cfg.burn_in = o.full_scale ? 100000 : o.burnin;
  cfg.seed = o.seed;
  cfg.monitored = o.monitor;
  cfg.label_swaps = !o.no_label_swap;
  cfg.accelerations = !o.no_accel;
  cfg.random_scan = !o.fixed_scan;
  if (o.hyper_mu == "midrange")
    cfg.hyper_mu = retrodp::HyperMeanRule::kMidrange;
  else if (o.hyper_mu == "paper-literal")
    cfg.hyper_mu = retrodp::HyperMeanRule::kPaperLiteral;
  else
    throw CLI::ValidationError("--hyper-mu", "expected midrange or paper-literal");
  if (o.fixed_variance > 0.0) cfg.fixed_variance = o.fixed_variance;
  cfg.m_aux = o.m_aux;
  return cfg;
}

int cmd_generate(const std::string& dataset, int n, std::uint64_t seed,
                 const std::string& out) {
  const std::vector<double> y = retrodp::generate_data(dataset, n, seed);
  if (out.empty()) {
    for (double v : y) std::printf("%.17g\n", v);
  } else {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open " + out);
    for (double v : y) f << retrodp::fmt_double(v) << "\n";
    std::printf("wrote %zu observations to %s\n", y.size(), out.c_str());
  }
  return 0;
}

int cmd_run(const CommonOpts& o) {
  retrodp::RunResult result = retrodp::run_chain(to_config(o));
  retrodp::write_outputs(result, o.out);
  std::printf("%s", retrodp::summary_table(result).c_str());
  std::printf("\nwrote %s/trace.csv, summary.txt, summary.kv\n", o.out.c_str());
  return 0;
}

int cmd_observed_partition(const std::vector<int>& sizes, double alpha,
                           long iters, long burnin, std::uint64_t seed,
                           bool no_label_swap, const std::string& out) {
  retrodp::ObservedPartitionConfig cfg;
  cfg.cluster_sizes = sizes;
  cfg.alpha = alpha;
  cfg.iterations = iters;
  cfg.burn_in = burnin;
  cfg.seed = seed;
  cfg.label_swaps = !no_label_swap;
  retrodp::ObservedPartitionResult res = retrodp::run_observed_partition(cfg);

  std::filesystem::create_directories(out);
  std::vector<std::string> names;
  std::vector<std::vector<double>> sets;
  for (std::size_t r = 0; r < res.weight_by_rank.size(); ++r) {
    names.push_back("p_rank" + std::to_string(r + 1));
    sets.push_back(res.weight_by_rank[r]);
  }
  names.push_back("max_p");
  sets.push_back(res.max_weight);
  retrodp::write_density_plot(out + "/fig_weights", names, sets);

  std::ofstream kv(out + "/summary.kv");
  if (!kv) throw std::runtime_error("cannot open summary.kv");
  kv << "rng=" << retrodp::Philox4x64::name << "\n";
  kv << "samples=" << res.max_weight.size() << "\n";
  kv << "ordering_crossings=" << res.ordering_crossings << "\n";
  if (res.weight_by_rank.size() >= 2) {
    long exceed = 0;
    for (std::size_t t = 0; t < res.weight_by_rank[0].size(); ++t)
      exceed += res.weight_by_rank[1][t] > res.weight_by_rank[0][t];
    const double pr = static_cast<double>(exceed) /
                      static_cast<double>(res.weight_by_rank[0].size());
    kv << "pr_p2_gt_p1=" << retrodp::fmt_double(pr) << "\n";
    std::printf("pr(p_2 > p_1) = %.4f, ordering crossings = %ld\n", pr,
                res.ordering_crossings);
  }
  std::printf("wrote %s/fig_weights.{dat,gp}, summary.kv\n", out.c_str());
  return 0;
}

int cmd_compare(const CommonOpts& o, const std::vector<std::string>& samplers,
                const std::vector<std::uint64_t>& seeds) {
  std::vector<retrodp::RunConfig> configs;
  for (const std::string& s : samplers) {
    for (std::uint64_t seed : seeds.empty() ? std::vector<std::uint64_t>{o.seed} : seeds) {
      CommonOpts oo = o;
      oo.sampler = s;
      oo.seed = seed;
      configs.push_back(to_config(oo));
    }
  }
  const std::string table = retrodp::compare(configs);
  std::printf("%s", table.c_str());
  std::filesystem::create_directories(o.out);
  std::ofstream f(o.out + "/comparison.txt");
  f << table;
  std::printf("\nwrote %s/comparison.txt\n", o.out.c_str());
  return 0;
}

int cmd_geweke(const CommonOpts& o, long transitions, bool mutate) {
  retrodp::GewekeConfig cfg;
  cfg.sampler = parse_sampler(o.sampler);
  cfg.n_data = o.n;
  cfg.transitions = transitions;
  cfg.spec.alpha = o.alpha;
  cfg.spec.base = retrodp::BaseMeasureParams{0.0, 4.0, 2.0, 0.5};
  if (o.fixed_variance > 0.0) cfg.spec.fixed_variance = o.fixed_variance;
  if (cfg.sampler == retrodp::SamplerKind::kRetroExact && !cfg.spec.fixed_variance)
    cfg.spec.fixed_variance = 1.0;
  cfg.sweep.update_alpha = o.update_alpha;
  cfg.sweep.alpha_prior_shape = o.alpha_shape;
  cfg.sweep.alpha_prior_rate = o.alpha_rate;
  cfg.sweep.label_swaps = !o.no_label_swap;
  cfg.sweep.invert_acceptance = mutate;
  retrodp::Philox4x64 rng(o.seed, 0x6765u);
  const auto pvalues = retrodp::geweke_test(cfg, rng);
  std::printf("joint-distribution test, %s, n=%d, %ld transitions%s\n",
              o.sampler.c_str(), o.n, transitions,
              mutate ? " [deliberately broken kernel]" : "");
  for (const auto& [stat, p] : pvalues)
    std::printf("  %-6s p = %.5f\n", stat.c_str(), p);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"truncation-free MCMC for Dirichlet process mixtures"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value configuration file; flags override");

  CommonOpts o;

  auto* gen = app.add_subcommand("generate-data", "write a benchmark dataset");
  std::string gen_out;
  gen->add_option("--dataset", o.dataset, "lepto | bimod");
  gen->add_option("--n", o.n, "number of observations");
  gen->add_option("--seed", o.data_seed, "generation seed");
  gen->add_option("--out", gen_out, "output file (default: stdout)");

  auto* run = app.add_subcommand("run", "run one sampler, write trace and summaries");
  add_common_flags(run, o);

  auto* op = app.add_subcommand("observed-partition",
                                "posterior of the stick weights given an observed partition");
  std::vector<int> op_sizes{5, 4, 1};
  op->add_option("--sizes", op_sizes, "observed cluster sizes")->delimiter(',');
  op->add_option("--alpha", o.alpha, "DP concentration");
  op->add_option("--iters", o.iters, "MCMC iterations");
  op->add_option("--burnin", o.burnin, "burn-in iterations");
  op->add_option("--seed", o.seed, "chain seed");
  op->add_flag("--no-label-swap", o.no_label_swap, "disable label-switching moves");
  op->add_option("--out", o.out, "output directory");

  auto* cmp = app.add_subcommand("compare", "run several samplers, table their IATs");
  std::vector<std::string> cmp_samplers{"retro-mh", "neal8"};
  std::vector<std::uint64_t> cmp_seeds;
  cmp->add_option("--samplers", cmp_samplers, "samplers to compare")->delimiter(',');
  cmp->add_option("--seeds", cmp_seeds, "chain seeds (one run per sampler x seed)")
      ->delimiter(',');
  add_common_flags(cmp, o, /*with_sampler=*/false);

  auto* gwk = app.add_subcommand("geweke", "joint-distribution correctness test");
  long gwk_transitions = 100000;
  bool gwk_mutate = false;
  gwk->add_option("--sampler", o.sampler, "retro-mh | retro-exact | neal8");
  gwk->add_option("--n", o.n, "synthetic dataset size")->default_val(5);
  gwk->add_option("--iters", gwk_transitions, "successive-conditional transitions");
  gwk->add_option("--seed", o.seed, "seed");
  gwk->add_option("--alpha", o.alpha, "DP concentration");
  gwk->add_flag("--update-alpha", o.update_alpha, "include the alpha step");
  gwk->add_option("--alpha-shape", o.alpha_shape, "gamma prior shape");
  gwk->add_option("--alpha-rate", o.alpha_rate, "gamma prior rate");
  gwk->add_option("--fixed-variance", o.fixed_variance, "bounded model variance");
  gwk->add_flag("--no-label-swap", o.no_label_swap, "disable label-switching moves");
  gwk->add_flag("--mutate", gwk_mutate,
                "invert the acceptance ratio to demonstrate detection of a broken kernel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) return cmd_generate(o.dataset, o.n, o.data_seed, gen_out);
    if (run->parsed()) return cmd_run(o);
    if (op->parsed())
      return cmd_observed_partition(op_sizes, o.alpha, o.iters, o.burnin, o.seed,
                                    o.no_label_swap, o.out);
    if (cmp->parsed()) return cmd_compare(o, cmp_samplers, cmp_seeds);
    if (gwk->parsed()) return cmd_geweke(o, gwk_transitions, gwk_mutate);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
