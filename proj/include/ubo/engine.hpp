#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ubo/acq_opt.hpp"
#include "ubo/acquisition.hpp"
#include "ubo/benchlab.hpp"
#include "ubo/box.hpp"
#include "ubo/expansion.hpp"
#include "ubo/fit.hpp"
#include "ubo/gp.hpp"
#include "ubo/seeding.hpp"

namespace ubo {

enum class Strategy { Ubo, Vanilla, VolumeDoubling };

inline std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Ubo: return "ubo";
    case Strategy::Vanilla: return "vanilla";
    case Strategy::VolumeDoubling: return "volx2";
  }
  return "?";
}

inline std::optional<Strategy> strategy_from_string(std::string_view name) {
  if (name == "ubo" || name == "gpucb-ubo") return Strategy::Ubo;
  if (name == "vanilla" || name == "vanilla-fixed-box" || name == "gpucb-vanilla") return Strategy::Vanilla;
  if (name == "volx2" || name == "volume-doubling" || name == "gpucb-volx2") return Strategy::VolumeDoubling;
  return std::nullopt;
}

using Objective = std::function<double(const Point&)>;

struct RunConfig {
  Strategy strategy = Strategy::Ubo;
  double epsilon = 0.05;  // in standardized output units
  double delta = 0.1;
  double beta_scale = 0.2;
  double a_k = 1.0;
  double b_k = 1.0;
  int budget = 10;
  int init_count = 3;
  std::uint64_t seed = 1;
  KernelFamily kernel = KernelFamily::SquaredExponential;
  int refit_every = 1;
  /// Compute the trigger but never rebuild the region (ubo only).
  bool freeze_region = false;
  Objective objective;
  Box initial_box;
  FitOptions fit;
  BoxSearchOptions search;

  int dim() const { return initial_box.dim(); }

  void validate() const {
    if (initial_box.dim() < 1) throw std::invalid_argument("initial_box: must have dimension >= 1");
    if (!((initial_box.hi.array() > initial_box.lo.array()).all()))
      throw std::invalid_argument("initial_box: must be non-degenerate");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon: must be > 0");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta: must lie in (0, 1)");
    if (!(beta_scale > 0.0)) throw std::invalid_argument("beta_scale: must be > 0");
    if (!(a_k > 0.0 && b_k > 0.0)) throw std::invalid_argument("a_k/b_k: must be > 0");
    if (budget < 0) throw std::invalid_argument("budget: must be >= 0");
    if (init_count < 2) throw std::invalid_argument("init_count: must be >= 2");
    if (refit_every < 1) throw std::invalid_argument("refit_every: must be >= 1");
    if (!objective) throw std::invalid_argument("objective: missing");
  }
};

inline constexpr double kNull = std::numeric_limits<double>::quiet_NaN();

/// One evaluation. Initial-design rows have t = 0. `box` is the search box
/// at suggestion time; `radius`, `lambda_max` and `weight_bound` are set on
/// rows where an expansion was computed.
struct IterationRecord {
  int t = 0;
  int t_local = 0;
  int k = 0;
  double beta = kNull;
  Point x;
  double y = kNull;
  double best_y = kNull;
  double regret_bound = kNull;
  bool expanded = false;
  double radius = kNull;
  Box box;
  double lambda_max = kNull;
  double weight_bound = kNull;
  std::vector<std::string> flags;
};

enum class RunStatus { Complete, ObjectiveFailure, NumericFailure };

struct RunTrace {
  std::vector<IterationRecord> records;
  int init_count = 0;
  Point recommendation;
  double recommendation_value = -std::numeric_limits<double>::infinity();
  RunStatus status = RunStatus::Complete;
  std::string failure;
  int expansions = 0;
  Box final_box;

  bool complete() const { return status == RunStatus::Complete; }

  std::vector<double> best_series() const {
    std::vector<double> s;
    s.reserve(records.size());
    for (const auto& r : records) s.push_back(r.best_y);
    return s;
  }
};

namespace detail {

/// GP on standardized outputs, refit on demand.
class SurrogateModel {
 public:
  SurrogateModel(const RunConfig& cfg) : cfg_(cfg) {}

  void update(const Dataset& raw, int t, bool refit, std::vector<std::string>& flags) {
    const Eigen::VectorXd y = raw.value_vector();
    const double n = static_cast<double>(y.size());
    mean_ = y.mean();
    const double var = (y.array() - mean_).square().sum() / n;
    scale_ = var > 0.0 ? std::sqrt(var) : 1.0;

    Dataset std_data;
    std_data.points = raw.points;
    std_data.values.reserve(raw.values.size());
    for (double v : raw.values) std_data.values.push_back((v - mean_) / scale_);

    if (refit || !hyper_) {
      std::optional<std::pair<KernelSpec, double>> warm;
      if (hyper_) warm = std::make_pair(hyper_->kernel, hyper_->noise_variance);
      // Lengthscale bounds follow the user box, not the current region, so
      // a wide region cannot widen the bounds that produced it.
      FitResult fit = fit_hyperparameters(std_data, cfg_.kernel, cfg_.dim(), cfg_.initial_box.diameter(),
                                          derive_seed(cfg_.seed, Stream::Fit, static_cast<std::uint64_t>(t)), cfg_.fit,
                                          warm);
      if (fit.used_default) flags.emplace_back("default_kernel");
      hyper_ = std::move(fit);
    }
    std_data.noise_variance = hyper_->noise_variance;
    gp_.emplace(std::move(std_data), hyper_->kernel);
    if (gp_->jitter() > 0.0) flags.emplace_back("jitter");
  }

  const GpPosterior& posterior() const { return *gp_; }

 private:
  const RunConfig& cfg_;
  std::optional<FitResult> hyper_;
  std::optional<GpPosterior> gp_;
  double mean_ = 0.0;
  double scale_ = 1.0;
};

inline double evaluate_checked(const Objective& f, const Point& x) {
  const double y = f(x);
  if (!std::isfinite(y)) throw std::runtime_error("objective returned a non-finite value");
  return y;
}

}  // namespace detail

/// Runs one optimization. GPUCB-UBO follows the expansion loop; the
/// baselines keep the user box (vanilla) or scale its volume by 2 about the
/// centre every 3d iterations (volx2).
inline RunTrace run(const RunConfig& cfg) {
  cfg.validate();
  const int d = cfg.dim();
  RunTrace trace;
  trace.init_count = cfg.init_count;

  Dataset raw;
  double best_y = -std::numeric_limits<double>::infinity();
  auto note_best = [&](const Point& x, double y) {
    if (y > best_y) {
      best_y = y;
      trace.recommendation = x;
      trace.recommendation_value = y;
    }
  };

  SearchRegion region = SearchRegion::from_user_box(cfg.initial_box);
  trace.final_box = region.hypercube;

  try {
    for (const auto& x : latin_hypercube(cfg.initial_box, cfg.init_count,
                                         derive_seed(cfg.seed, Stream::InitialDesign))) {
      IterationRecord rec;
      rec.x = x;
      rec.box = region.hypercube;
      rec.y = detail::evaluate_checked(cfg.objective, x);
      raw.add(x, rec.y);
      note_best(x, rec.y);
      rec.best_y = best_y;
      trace.records.push_back(std::move(rec));
    }
  } catch (const std::exception& e) {
    trace.status = RunStatus::ObjectiveFailure;
    trace.failure = e.what();
    return trace;
  }

  detail::SurrogateModel model(cfg);
  TriggerState trigger{cfg.epsilon};
  const int doubling_period = 3 * d;

  try {
    std::vector<std::string> pending_flags;
    model.update(raw, 0, true, pending_flags);

    for (int t = 1; t <= cfg.budget; ++t) {
      IterationRecord rec;
      rec.flags = std::move(pending_flags);
      pending_flags.clear();
      rec.t = t;
      rec.k = region.expansion_index;
      rec.box = region.hypercube;
      const int t_local = cfg.strategy == Strategy::Ubo ? trigger.local_iteration(t) : t;
      rec.t_local = t_local;

      BetaSchedule schedule{cfg.delta,           d,        region.hypercube.longest_side(), cfg.a_k, cfg.b_k,
                            cfg.beta_scale, cfg.strategy == Strategy::Ubo ? trigger.epoch_start : 0};
      const double beta_t = beta(schedule, t_local);
      rec.beta = beta_t;

      const GpPosterior& gp = model.posterior();
      const Point incumbent = trace.recommendation;
      const Suggestion s = refined_maximize(gp, beta_t, cfg.epsilon, region,
                                            derive_seed(cfg.seed, Stream::Acquisition, static_cast<std::uint64_t>(t)),
                                            std::span(&incumbent, 1), cfg.search);
      if (s.branch != RefinementBranch::UserBox && s.branch != RefinementBranch::BigBox)
        rec.flags.emplace_back(to_string(s.branch));
      rec.x = s.x;

      try {
        rec.y = detail::evaluate_checked(cfg.objective, s.x);
      } catch (const std::exception& e) {
        trace.status = RunStatus::ObjectiveFailure;
        trace.failure = std::string("iteration ") + std::to_string(t) + ": " + e.what();
        break;
      }
      raw.add(s.x, rec.y);
      note_best(s.x, rec.y);
      rec.best_y = best_y;

      bool fire = false;
      if (cfg.strategy == Strategy::Ubo) {
        // Both terms use the posterior that produced x_t.
        rec.regret_bound = regret_upper_bound(gp, beta_t, t_local, s.value, raw.points);
        fire = trigger.observe(t, rec.regret_bound);
        if (cfg.freeze_region) {
          if (rec.regret_bound <= cfg.epsilon) rec.flags.emplace_back("trigger");
          fire = false;
        }
      }

      const bool refit = (t % cfg.refit_every) == 0;
      model.update(raw, t, refit, pending_flags);

      if (fire) {
        const GpPosterior& next = model.posterior();
        const double limit = asymptotic_value(beta_t, next.kernel().theta);
        double eps = cfg.epsilon;
        if (!(eps < 4.0 * limit)) {
          eps = 3.99 * limit;
          rec.flags.emplace_back("eps_clamped");
        }
        const ExpansionQuantities q = next.expansion_quantities();
        const double radius = expansion_radius(q, next.kernel(), beta_t, eps);
        region = build_region(next.data().points, radius, region.expansion_index + 1);
        trigger.close_epoch(t);
        rec.expanded = true;
        rec.radius = radius;
        rec.lambda_max = q.lambda_max;
        rec.weight_bound = q.weight_bound;
        ++trace.expansions;
      } else if (cfg.strategy == Strategy::VolumeDoubling && t % doubling_period == 0) {
        region.hypercube = region.hypercube.scaled(std::pow(2.0, 1.0 / d));
        ++region.expansion_index;
        rec.expanded = true;
        ++trace.expansions;
      }
      trace.final_box = region.hypercube;
      trace.records.push_back(std::move(rec));
    }
  } catch (const NumericFailure& e) {
    trace.status = RunStatus::NumericFailure;
    trace.failure = e.what();
  }
  return trace;
}

inline RunTrace run_ubo(RunConfig cfg) {
  cfg.strategy = Strategy::Ubo;
  return run(cfg);
}

inline RunTrace run_baseline(const RunConfig& cfg) {
  if (cfg.strategy == Strategy::Ubo) throw std::invalid_argument("run_baseline: strategy must be a baseline");
  return run(cfg);
}

}  // namespace ubo
