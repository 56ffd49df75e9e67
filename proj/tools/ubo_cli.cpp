// Command-line front end: single runs and strategy comparisons on the
// synthetic benchmarks.
//
//   ubo run     --config cfg.json [--seed N] [--strategy S] [--benchmark B] --out DIR
//   ubo compare --config cfg.json [--reps N] [--jobs N] --out DIR
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure or an
// incomplete run.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ubo/benchlab.hpp"
#include "ubo/config.hpp"
#include "ubo/engine.hpp"
#include "ubo/report.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonOptions {
  std::string config_path;
  std::string out_dir = "ubo_out";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> strategy;
  std::optional<std::string> benchmark;
  std::optional<int> reps;
  int jobs = 1;
};

ubo::RunSettings load_settings(const CommonOptions& opt) {
  nlohmann::json j = nlohmann::json::object();
  if (!opt.config_path.empty()) {
    std::ifstream f(opt.config_path);
    if (!f) throw ubo::ConfigError("config", "cannot open '" + opt.config_path + "'");
    try {
      j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
      throw ubo::ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
  }
  ubo::RunSettings s = ubo::parse_settings(j);
  if (opt.seed) s.seed = *opt.seed;
  if (opt.benchmark) s.benchmark = *opt.benchmark;
  if (opt.reps) s.reps = *opt.reps;
  if (opt.strategy) {
    std::vector<std::string> names;
    std::stringstream ss(*opt.strategy);
    for (std::string item; std::getline(ss, item, ',');)
      if (!item.empty()) names.push_back(item);
    if (names.empty()) throw ubo::ConfigError("strategy", "empty strategy list");
    s.strategy = names.front();
    s.strategies = names.size() > 1 ? names : std::vector<std::string>{};
  }
  s.validate();
  return s;
}

fs::path output_dir(const CommonOptions& opt) {
  if (const char* env = std::getenv("UBO_OUT_DIR"); env && *env) return env;
  return opt.out_dir;
}

std::string run_stem(const std::string& benchmark, ubo::Strategy strategy, std::uint64_t seed) {
  return benchmark + "_" + std::string(ubo::to_string(strategy)) + "_seed" + std::to_string(seed);
}

struct RunOutput {
  ubo::RunTrace trace;
  std::string csv;
  std::string summary;
};

RunOutput execute(const ubo::RunSettings& s, const ubo::Benchmark& bench, ubo::Strategy strategy, std::uint64_t seed) {
  const ubo::RunConfig cfg = ubo::make_run_config(s, bench, strategy, seed);
  RunOutput out;
  out.trace = ubo::run(cfg);
  out.csv = ubo::trace_csv(out.trace, bench.dim);
  out.summary = ubo::run_summary(s, strategy, seed, bench, cfg, out.trace).dump(2) + "\n";
  return out;
}

int cmd_run(const CommonOptions& opt) {
  const ubo::RunSettings s = load_settings(opt);
  const ubo::Benchmark bench = ubo::make_benchmark(s.benchmark);
  const ubo::Strategy strategy = *ubo::strategy_from_string(s.strategy);
  const fs::path dir = output_dir(opt);

  RunOutput r = execute(s, bench, strategy, s.seed);
  const std::string stem = run_stem(s.benchmark, strategy, s.seed);
  ubo::write_file_atomic(dir / (stem + ".csv"), r.csv);
  ubo::write_file_atomic(dir / (stem + ".json"), r.summary);

  std::cout << stem << ": best_y=" << ubo::format_number(r.trace.recommendation_value)
            << " expansions=" << r.trace.expansions << " status=" << ubo::to_string(r.trace.status) << "\n";
  if (!r.trace.complete()) {
    std::cerr << "run incomplete: " << r.trace.failure << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

int cmd_compare(const CommonOptions& opt) {
  const ubo::RunSettings s = load_settings(opt);
  const ubo::Benchmark bench = ubo::make_benchmark(s.benchmark);
  const fs::path dir = output_dir(opt);

  std::vector<ubo::Strategy> strategies;
  for (const auto& name : s.strategy_list()) strategies.push_back(*ubo::strategy_from_string(name));

  struct Job {
    ubo::Strategy strategy;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (auto st : strategies)
    for (int r = 0; r < s.reps; ++r) jobs.push_back({st, s.seed + static_cast<std::uint64_t>(r)});

  std::vector<RunOutput> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::string first_error;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i] = execute(s, bench, jobs[i].strategy, jobs[i].seed);
        const std::string stem = run_stem(s.benchmark, jobs[i].strategy, jobs[i].seed);
        ubo::write_file_atomic(dir / "runs" / (stem + ".csv"), results[i].csv);
        ubo::write_file_atomic(dir / "runs" / (stem + ".json"), results[i].summary);
      } catch (const std::exception& e) {
        std::lock_guard lock(err_mu);
        if (first_error.empty()) first_error = e.what();
      }
    }
  };
  const int n_threads = std::clamp(opt.jobs, 1, static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (!first_error.empty()) throw std::runtime_error(first_error);

  bool all_complete = true;
  std::ostringstream table;
  table << ubo::aggregate_csv_header() << '\n';
  for (auto st : strategies) {
    std::vector<std::vector<double>> series;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (jobs[i].strategy != st) continue;
      if (!results[i].trace.complete()) {
        all_complete = false;
        std::cerr << run_stem(s.benchmark, st, jobs[i].seed) << " incomplete: " << results[i].trace.failure << "\n";
        continue;
      }
      series.push_back(results[i].trace.best_series());
    }
    if (series.empty()) continue;
    const ubo::AggregateCurve curve = ubo::aggregate(series);
    ubo::write_aggregate_rows(table, s.benchmark, ubo::to_string(st), curve);
    std::cout << s.benchmark << " " << ubo::to_string(st) << ": final mean_best=" << ubo::format_number(curve.mean.back())
              << " stderr=" << ubo::format_number(curve.stderr_.back()) << " reps=" << series.size() << "\n";
  }
  ubo::write_file_atomic(dir / ("compare_" + s.benchmark + ".csv"), table.str());
  return all_complete ? kExitOk : kExitNumeric;
}

void add_common(CLI::App* sub, CommonOptions& opt, bool compare) {
  sub->add_option("--config", opt.config_path, "JSON configuration file");
  sub->add_option("--out", opt.out_dir, "Output directory (UBO_OUT_DIR overrides)");
  sub->add_option("--seed", opt.seed, "Seed (first seed for compare)");
  sub->add_option("--strategy", opt.strategy, compare ? "Comma-separated strategies" : "Strategy name");
  sub->add_option("--benchmark", opt.benchmark, "Benchmark name");
  sub->add_option("--reps", opt.reps, "Repetitions per strategy")->check(CLI::PositiveNumber);
  sub->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian optimization with automatic search-space expansion"};
  app.require_subcommand(1);
  CommonOptions run_opt, compare_opt;
  CLI::App* run = app.add_subcommand("run", "Execute one (strategy, benchmark, seed) run");
  CLI::App* compare = app.add_subcommand("compare", "Run strategies x seeds and aggregate best-found curves");
  add_common(run, run_opt, false);
  add_common(compare, compare_opt, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(run_opt);
    return cmd_compare(compare_opt);
  } catch (const ubo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ubo::NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
