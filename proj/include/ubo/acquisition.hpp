#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ubo/gp.hpp"

namespace ubo {

/// Exploration weight schedule for one expansion epoch.
///
/// beta(t_local) = s * [2 log(t^2 * 2 pi^2 / (3 delta))
///                      + 2 d log(t^2 * d * b * r * sqrt(log(4 d a / delta)))]
/// with t = t_local, the iteration count since the epoch began. r is the
/// side length of the epoch's search space; a, b are the sample-path
/// derivative constants; s = 1 (theory) or 1/5 (experiments).
struct BetaSchedule {
  double delta = 0.1;
  int dim = 1;
  double side_length = 1.0;
  double a = 1.0;
  double b = 1.0;
  double scale = 1.0;
  int epoch_offset = 0;

  void validate() const {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("beta schedule: delta must lie in (0, 1)");
    if (!(side_length > 0.0)) throw std::invalid_argument("beta schedule: side length r_k must be > 0");
    if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("beta schedule: constants a, b must be > 0");
    if (!(scale > 0.0)) throw std::invalid_argument("beta schedule: scale must be > 0");
    if (dim < 1) throw std::invalid_argument("beta schedule: dimension must be >= 1");
  }
};

inline double beta(const BetaSchedule& schedule, int t_local) {
  schedule.validate();
  if (t_local < 1) throw std::invalid_argument("beta: t_local must be >= 1");
  const double t2 = static_cast<double>(t_local) * static_cast<double>(t_local);
  const double d = schedule.dim;
  const double confidence = 2.0 * std::log(t2 * 2.0 * std::numbers::pi * std::numbers::pi / (3.0 * schedule.delta));
  const double lipschitz =
      2.0 * d * std::log(t2 * d * schedule.b * schedule.side_length * std::sqrt(std::log(4.0 * d * schedule.a / schedule.delta)));
  return schedule.scale * (confidence + lipschitz);
}

/// Same as beta() but indexed by the global iteration t.
inline double beta_at(const BetaSchedule& schedule, int t) { return beta(schedule, t - schedule.epoch_offset); }

inline double ucb(const PosteriorValue& p, double beta_t) { return p.mean + std::sqrt(beta_t) * std::sqrt(p.variance); }
inline double lcb(const PosteriorValue& p, double beta_t) { return p.mean - std::sqrt(beta_t) * std::sqrt(p.variance); }

template <typename Derived>
double ucb(const GpPosterior& gp, const Eigen::MatrixBase<Derived>& x, double beta_t) {
  if (!(beta_t >= 0.0)) throw std::invalid_argument("ucb: beta must be >= 0");
  return ucb(gp.predict(x), beta_t);
}

template <typename Derived>
double lcb(const GpPosterior& gp, const Eigen::MatrixBase<Derived>& x, double beta_t) {
  if (!(beta_t >= 0.0)) throw std::invalid_argument("lcb: beta must be >= 0");
  return lcb(gp.predict(x), beta_t);
}

/// Limit of the UCB acquisition as x moves away from every observation.
inline double asymptotic_value(double beta_t, double theta) { return std::sqrt(beta_t) * theta; }

}  // namespace ubo
