// Trace persistence: one CSV record per retained iteration, plus the
// human-readable and key=value summaries.  Values are printed with 17
// significant digits so doubles round-trip exactly and summaries
// recomputed from the file reproduce the printed tables.

#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "retrodp/diagnostics.hpp"
#include "retrodp/rng.hpp"

namespace retrodp {

constexpr int kTraceVersion = 1;

struct TraceRecord {
  long iter = 0;
  int num_clusters = 0;
  double deviance = 0.0;
  std::vector<double> monitored;
  int n_star = 0;           // frontier (conditional) / cluster count (marginal)
  double accept_alloc = 0.0;
  int swap_random_accepts = 0;
  int swap_neighbor_accepts = 0;
};

struct Trace {
  std::vector<int> monitored_indices;  // 1-based data indices
  std::vector<TraceRecord> records;
};

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string trace_header(const std::vector<int>& monitored) {
  std::string h = "iter,M,D";
  for (int i : monitored) h += ",z1_" + std::to_string(i);
  h += ",n_star,accept_alloc,swap_rand_acc,swap_nbr_acc";
  return h;
}

inline void write_trace_csv(const std::string& path, const Trace& trace,
                            std::uint64_t seed) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace file: " + path);
  out << "# retrodp trace v" << kTraceVersion << " rng=" << Philox4x64::name
      << " seed=" << seed << "\n";
  out << trace_header(trace.monitored_indices) << "\n";
  for (const TraceRecord& r : trace.records) {
    out << r.iter << ',' << r.num_clusters << ',' << fmt_double(r.deviance);
    for (double v : r.monitored) out << ',' << fmt_double(v);
    out << ',' << r.n_star << ',' << fmt_double(r.accept_alloc) << ','
        << r.swap_random_accepts << ',' << r.swap_neighbor_accepts << "\n";
  }
  if (!out) throw std::runtime_error("failed writing trace file: " + path);
}

inline Trace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# retrodp trace", 0) != 0)
    throw std::runtime_error("trace file missing version line: " + path);
  if (!std::getline(in, line))
    throw std::runtime_error("trace file missing header: " + path);
  Trace trace;
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ','))
      if (col.rfind("z1_", 0) == 0)
        trace.monitored_indices.push_back(std::stoi(col.substr(3)));
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    const std::size_t expect = 7 + trace.monitored_indices.size();
    if (fields.size() != expect)
      throw std::runtime_error("trace file: malformed record in " + path);
    TraceRecord r;
    std::size_t f = 0;
    r.iter = std::stol(fields[f++]);
    r.num_clusters = std::stoi(fields[f++]);
    r.deviance = std::stod(fields[f++]);
    for (std::size_t m = 0; m < trace.monitored_indices.size(); ++m)
      r.monitored.push_back(std::stod(fields[f++]));
    r.n_star = std::stoi(fields[f++]);
    r.accept_alloc = std::stod(fields[f++]);
    r.swap_random_accepts = std::stoi(fields[f++]);
    r.swap_neighbor_accepts = std::stoi(fields[f++]);
    trace.records.push_back(std::move(r));
  }
  return trace;
}

// Per-functional chain series extracted from a trace.
inline std::vector<Series> trace_series(const Trace& trace) {
  std::vector<Series> out;
  Series m{.values = {}, .name = "M"};
  Series d{.values = {}, .name = "D"};
  for (const TraceRecord& r : trace.records) {
    m.values.push_back(r.num_clusters);
    d.values.push_back(r.deviance);
  }
  out.push_back(std::move(m));
  out.push_back(std::move(d));
  for (std::size_t c = 0; c < trace.monitored_indices.size(); ++c) {
    Series s;
    s.name = "z1_" + std::to_string(trace.monitored_indices[c]);
    for (const TraceRecord& r : trace.records) s.values.push_back(r.monitored[c]);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace retrodp
