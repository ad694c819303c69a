// Gnuplot-compatible output for the density plots: a kernel density over
// posterior samples (Gaussian kernel, Silverman's bandwidth) written as
// .dat columns plus a ready-to-run .gp script.

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace retrodp {

inline std::vector<double> kde_on_grid(const std::vector<double>& samples,
                                       const std::vector<double>& grid) {
  if (samples.size() < 2) throw std::invalid_argument("kde: need >= 2 samples");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : samples) var += (v - mean) * (v - mean);
  var /= (n - 1.0);
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const double q1 = sorted[static_cast<std::size_t>(0.25 * (n - 1))];
  const double q3 = sorted[static_cast<std::size_t>(0.75 * (n - 1))];
  const double sigma = std::sqrt(var);
  double spread = std::min(sigma, (q3 - q1) / 1.34);
  if (!(spread > 0.0)) spread = sigma > 0.0 ? sigma : 1e-3;
  const double bw = 0.9 * spread * std::pow(n, -0.2);

  std::vector<double> dens(grid.size(), 0.0);
  const double norm = 1.0 / (n * bw * std::sqrt(2.0 * 3.14159265358979323846));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double acc = 0.0;
    for (double v : samples) {
      const double t = (grid[g] - v) / bw;
      acc += std::exp(-0.5 * t * t);
    }
    dens[g] = acc * norm;
  }
  return dens;
}

// Writes <stem>.dat (x then one density column per named series) and
// <stem>.gp.
inline void write_density_plot(const std::string& stem,
                               const std::vector<std::string>& names,
                               const std::vector<std::vector<double>>& sample_sets,
                               double lo = 0.0, double hi = 1.0,
                               int grid_points = 256) {
  if (names.size() != sample_sets.size())
    throw std::invalid_argument("write_density_plot: names/series mismatch");
  std::vector<double> grid(grid_points);
  for (int g = 0; g < grid_points; ++g)
    grid[g] = lo + (hi - lo) * g / (grid_points - 1.0);

  std::ofstream dat(stem + ".dat");
  if (!dat) throw std::runtime_error("cannot open " + stem + ".dat");
  std::vector<std::vector<double>> dens;
  for (const auto& s : sample_sets) dens.push_back(kde_on_grid(s, grid));
  dat << "# x";
  for (const auto& nm : names) dat << ' ' << nm;
  dat << "\n";
  for (int g = 0; g < grid_points; ++g) {
    dat << grid[g];
    for (const auto& d : dens) dat << ' ' << d[g];
    dat << "\n";
  }

  std::ofstream gp(stem + ".gp");
  if (!gp) throw std::runtime_error("cannot open " + stem + ".gp");
  gp << "set style data lines\nset xlabel 'weight'\nset ylabel 'density'\n";
  gp << "plot";
  for (std::size_t s = 0; s < names.size(); ++s) {
    gp << (s ? ", " : " ") << "'" << stem << ".dat' using 1:" << s + 2
       << " title '" << names[s] << "'";
  }
  gp << "\n";
}

}  // namespace retrodp
