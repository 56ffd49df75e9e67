#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "ubo/benchlab.hpp"
#include "ubo/config.hpp"
#include "ubo/engine.hpp"

namespace ubo {

/// Shortest round-trip decimal form; NaN (a null field) prints as empty.
inline std::string format_number(double v) {
  if (std::isnan(v)) return {};
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string trace_csv_header(int dim) {
  std::string h = "t,t_local,k,beta";
  for (int j = 0; j < dim; ++j) h += ",x" + std::to_string(j);
  h += ",y,best_y,r_b,expanded,d_eps";
  for (int j = 0; j < dim; ++j) h += ",lo" + std::to_string(j);
  for (int j = 0; j < dim; ++j) h += ",hi" + std::to_string(j);
  h += ",lambda_max,M,flags";
  return h;
}

/// One row per evaluation, initial design first (t = 0).
inline void write_trace_csv(std::ostream& out, const RunTrace& trace, int dim) {
  out << trace_csv_header(dim) << '\n';
  for (const auto& r : trace.records) {
    out << r.t << ',' << r.t_local << ',' << r.k << ',' << format_number(r.beta);
    for (int j = 0; j < dim; ++j) out << ',' << format_number(r.x[j]);
    out << ',' << format_number(r.y) << ',' << format_number(r.best_y) << ',' << format_number(r.regret_bound) << ','
        << (r.expanded ? 1 : 0) << ',' << format_number(r.radius);
    for (int j = 0; j < dim; ++j) out << ',' << format_number(r.box.lo[j]);
    for (int j = 0; j < dim; ++j) out << ',' << format_number(r.box.hi[j]);
    out << ',' << format_number(r.lambda_max) << ',' << format_number(r.weight_bound) << ',';
    for (std::size_t i = 0; i < r.flags.size(); ++i) out << (i ? "|" : "") << r.flags[i];
    out << '\n';
  }
}

inline std::string trace_csv(const RunTrace& trace, int dim) {
  std::ostringstream os;
  write_trace_csv(os, trace, dim);
  return os.str();
}

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Complete: return "complete";
    case RunStatus::ObjectiveFailure: return "objective_failure";
    case RunStatus::NumericFailure: return "numeric_failure";
  }
  return "?";
}

inline nlohmann::json to_json_array(const Eigen::VectorXd& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

/// Everything needed to reproduce and assess one run.
inline nlohmann::json run_summary(const RunSettings& settings, Strategy strategy, std::uint64_t seed,
                                  const Benchmark& bench, const RunConfig& cfg, const RunTrace& trace) {
  RunSettings effective = settings;
  effective.strategy = std::string(to_string(strategy));
  effective.strategies.clear();
  effective.seed = seed;
  effective.reps = 1;
  nlohmann::json j;
  j["config"] = to_json(effective);
  j["status"] = to_string(trace.status);
  if (!trace.failure.empty()) j["failure"] = trace.failure;
  j["dim"] = bench.dim;
  j["budget"] = cfg.budget;
  j["init_count"] = cfg.init_count;
  j["initial_box"] = {{"lo", to_json_array(cfg.initial_box.lo)}, {"hi", to_json_array(cfg.initial_box.hi)}};
  j["final_box"] = {{"lo", to_json_array(trace.final_box.lo)}, {"hi", to_json_array(trace.final_box.hi)}};
  j["expansions"] = trace.expansions;
  j["iterations"] = static_cast<int>(trace.records.size()) - trace.init_count;
  if (trace.recommendation.size() > 0) {
    j["recommendation"] = to_json_array(trace.recommendation);
    j["best_y"] = trace.recommendation_value;
  }
  j["known_max"] = bench.max_value;
  return j;
}

/// Long-format aggregate table: benchmark,strategy,iteration,mean_best,stderr.
inline std::string aggregate_csv_header() { return "benchmark,strategy,iteration,mean_best,stderr"; }

inline void write_aggregate_rows(std::ostream& out, const std::string& benchmark, std::string_view strategy,
                                 const AggregateCurve& curve) {
  for (std::size_t i = 0; i < curve.mean.size(); ++i)
    out << benchmark << ',' << strategy << ',' << i + 1 << ',' << format_number(curve.mean[i]) << ','
        << format_number(curve.stderr_[i]) << '\n';
}

/// Write via a sibling temporary file and rename, so readers never see a
/// partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace ubo
