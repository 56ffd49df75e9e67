#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ubo/benchlab.hpp"
#include "ubo/engine.hpp"

namespace ubo {

/// Invalid or unknown configuration entry. `field()` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class Placement { Random, ArgmaxOutside };

/// Flat experiment configuration as read from JSON. Defaults follow the
/// synthetic-function protocol: eps 0.05, delta 0.1, beta scaled by 1/5,
/// budget 10d after 3d Latin-hypercube points.
struct RunSettings {
  std::string strategy = "ubo";
  std::vector<std::string> strategies;  // compare only; falls back to {strategy}
  std::string benchmark = "beale";
  std::uint64_t seed = 1;
  int reps = 1;
  double epsilon = 0.05;
  double delta = 0.1;
  double beta_scale = 0.2;
  int budget_multiplier = 10;
  int init_multiplier = 3;
  std::string kernel = "se";
  int refit_every = 1;
  std::string placement = "random";
  double a_k = 1.0;
  double b_k = 1.0;
  bool ard = true;

  std::vector<std::string> strategy_list() const { return strategies.empty() ? std::vector{strategy} : strategies; }

  /// Throws ConfigError naming the first invalid field.
  void validate() const {
    for (const auto& s : strategy_list())
      if (!strategy_from_string(s)) throw ConfigError("strategy", "unknown strategy '" + s + "'");
    try {
      (void)make_benchmark(benchmark);
    } catch (const std::invalid_argument&) {
      throw ConfigError("benchmark", "unknown benchmark '" + benchmark + "'");
    }
    if (!(epsilon > 0.0)) throw ConfigError("epsilon", "must be > 0");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta", "must lie in (0, 1)");
    if (!(beta_scale > 0.0)) throw ConfigError("beta_scale", "must be > 0");
    if (budget_multiplier < 0) throw ConfigError("budget_multiplier", "must be >= 0");
    if (init_multiplier < 1) throw ConfigError("init_multiplier", "must be >= 1");
    if (refit_every < 1) throw ConfigError("refit_every", "must be >= 1");
    if (reps < 1) throw ConfigError("reps", "must be >= 1");
    if (!(a_k > 0.0)) throw ConfigError("a_k", "must be > 0");
    if (!(b_k > 0.0)) throw ConfigError("b_k", "must be > 0");
    if (placement != "random" && placement != "argmax_outside")
      throw ConfigError("placement", "must be 'random' or 'argmax_outside'");
    try {
      (void)kernel_family_from_string(kernel);
    } catch (const std::invalid_argument&) {
      throw ConfigError("kernel", "unknown kernel '" + kernel + "'");
    }
  }
};

namespace detail {

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(key, "has the wrong type");
  }
}

}  // namespace detail

inline RunSettings parse_settings(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config", "top level must be a JSON object");
  static const std::set<std::string> known{"strategy", "strategies", "benchmark", "seed",      "reps",
                                           "epsilon",  "delta",      "beta_scale", "budget_multiplier",
                                           "init_multiplier", "kernel", "refit_every", "placement", "a_k", "b_k", "ard"};
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw ConfigError(key, "unknown field");

  RunSettings s;
  detail::read_field(j, "strategy", s.strategy);
  detail::read_field(j, "strategies", s.strategies);
  detail::read_field(j, "benchmark", s.benchmark);
  detail::read_field(j, "seed", s.seed);
  detail::read_field(j, "reps", s.reps);
  detail::read_field(j, "epsilon", s.epsilon);
  detail::read_field(j, "delta", s.delta);
  detail::read_field(j, "beta_scale", s.beta_scale);
  detail::read_field(j, "budget_multiplier", s.budget_multiplier);
  detail::read_field(j, "init_multiplier", s.init_multiplier);
  detail::read_field(j, "kernel", s.kernel);
  detail::read_field(j, "refit_every", s.refit_every);
  detail::read_field(j, "placement", s.placement);
  detail::read_field(j, "a_k", s.a_k);
  detail::read_field(j, "b_k", s.b_k);
  detail::read_field(j, "ard", s.ard);
  return s;
}

inline nlohmann::json to_json(const RunSettings& s) {
  nlohmann::json j{{"strategy", s.strategy},
                   {"benchmark", s.benchmark},
                   {"seed", s.seed},
                   {"reps", s.reps},
                   {"epsilon", s.epsilon},
                   {"delta", s.delta},
                   {"beta_scale", s.beta_scale},
                   {"budget_multiplier", s.budget_multiplier},
                   {"init_multiplier", s.init_multiplier},
                   {"kernel", s.kernel},
                   {"refit_every", s.refit_every},
                   {"placement", s.placement},
                   {"a_k", s.a_k},
                   {"b_k", s.b_k},
                   {"ard", s.ard}};
  if (!s.strategies.empty()) j["strategies"] = s.strategies;
  return j;
}

/// Engine configuration for one (strategy, seed) pair of these settings.
inline RunConfig make_run_config(const RunSettings& s, const Benchmark& bench, Strategy strategy, std::uint64_t seed) {
  RunConfig c;
  c.strategy = strategy;
  c.epsilon = s.epsilon;
  c.delta = s.delta;
  c.beta_scale = s.beta_scale;
  c.a_k = s.a_k;
  c.b_k = s.b_k;
  c.budget = s.budget_multiplier * bench.dim;
  c.init_count = std::max(2, s.init_multiplier * bench.dim);
  c.seed = seed;
  c.kernel = kernel_family_from_string(s.kernel);
  c.refit_every = s.refit_every;
  c.fit.ard = s.ard;
  c.objective = bench.evaluate;
  c.initial_box = s.placement == "argmax_outside" ? place_initial_box_excluding_argmax(bench, seed)
                                                  : place_initial_box(bench, seed);
  return c;
}

}  // namespace ubo
