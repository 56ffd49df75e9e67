#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "ubo/acquisition.hpp"
#include "ubo/box.hpp"
#include "ubo/gp.hpp"
#include "ubo/kernel.hpp"

namespace ubo {

/// Covariance threshold behind the expansion radius.
///
/// gamma_1 bounds the variance-deflation term k(x)^T A^{-1} k(x) and
/// gamma_2 the posterior-mean term k(x)^T z, each so that its contribution
/// to |ucb(x) - sqrt(beta) theta| stays within eps/4 once every k(x_i, x)
/// is at most gamma. Requires 0 < eps < 4 sqrt(beta) theta.
///
/// gamma_1 is divided by sqrt(beta), not multiplied by theta: with that
/// factor sqrt(beta) * sigma(x) >= sqrt(beta) theta - eps/4 holds exactly
/// at n * lambda_max * gamma_1^2.
struct ExpansionThresholds {
  double gamma1 = 0.0;  // variance-deflation bound
  double gamma2 = 0.0;  // mean bound; +inf when M = 0
  double gamma = 0.0;   // min of both, capped just below theta^2
};

inline ExpansionThresholds expansion_thresholds(const ExpansionQuantities& q, double theta, double beta_t, double eps) {
  if (q.n == 0) throw std::invalid_argument("expansion_radius: needs at least one observation");
  if (!(q.lambda_max > 0.0)) throw std::invalid_argument("expansion_radius: lambda_max must be > 0");
  if (!(beta_t > 0.0)) throw std::invalid_argument("expansion_radius: beta must be > 0");
  const double limit = std::sqrt(beta_t) * theta;
  if (!(eps > 0.0) || !(eps < 4.0 * limit))
    throw std::invalid_argument("expansion_radius: epsilon must lie in (0, 4 sqrt(beta) theta)");

  ExpansionThresholds th;
  const double radicand = (limit * eps / 2.0 - eps * eps / 16.0) / (static_cast<double>(q.n) * q.lambda_max);
  th.gamma1 = std::sqrt(std::max(radicand, 0.0)) / std::sqrt(beta_t);
  // M = 0: the mean term vanishes identically far from the data.
  th.gamma2 = q.weight_bound > 0.0 ? 0.25 * eps / q.weight_bound : std::numeric_limits<double>::infinity();
  th.gamma = std::min({th.gamma1, th.gamma2, theta * theta * (1.0 - 1e-9)});
  if (!(th.gamma > 0.0)) throw std::invalid_argument("expansion_radius: covariance threshold underflowed to zero");
  return th;
}

inline double expansion_gamma(const ExpansionQuantities& q, double theta, double beta_t, double eps) {
  return expansion_thresholds(q, theta, beta_t, eps).gamma;
}

inline double expansion_radius(const ExpansionQuantities& q, const KernelSpec& kernel, double beta_t, double eps) {
  return kernel_inverse_radius(kernel, expansion_gamma(q, kernel.theta, beta_t, eps));
}

inline double expansion_radius(const GpPosterior& gp, double beta_t, double eps) {
  return expansion_radius(gp.expansion_quantities(), gp.kernel(), beta_t, eps);
}

/// Current search space. For k = 0 it is the user box and carries no balls;
/// for k >= 1 it is the union of radius-d_eps balls around the observations
/// together with its encompassing hypercube.
struct SearchRegion {
  int expansion_index = 0;
  std::vector<Point> centers;
  double radius = 0.0;
  Box hypercube;

  bool user_box() const { return expansion_index == 0; }

  static SearchRegion from_user_box(Box box) {
    SearchRegion r;
    r.hypercube = std::move(box);
    return r;
  }

  bool in_hypercube(const Point& x, double tol = 0.0) const { return hypercube.contains(x, tol); }

  bool in_union_of_balls(const Point& x) const {
    return std::any_of(centers.begin(), centers.end(),
                       [&](const Point& c) { return (x - c).norm() <= radius; });
  }

  Box ball_box(std::size_t i) const {
    const Eigen::VectorXd r = Eigen::VectorXd::Constant(centers[i].size(), radius);
    return {centers[i] - r, centers[i] + r};
  }
};

/// Balls around every observation and the per-dimension hypercube
/// [min_i x_i^j - d_eps, max_i x_i^j + d_eps].
inline SearchRegion build_region(std::span<const Point> observations, double radius, int expansion_index = 1) {
  if (observations.empty()) throw std::invalid_argument("build_region: needs at least one observation");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("build_region: radius must be finite and > 0");
  SearchRegion r;
  r.expansion_index = expansion_index;
  r.radius = radius;
  r.centers.assign(observations.begin(), observations.end());
  Eigen::VectorXd lo = observations.front();
  Eigen::VectorXd hi = observations.front();
  for (const auto& p : observations) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  r.hypercube = Box(lo.array() - radius, hi.array() + radius);
  return r;
}

/// Trigger bound r_b = ucb(x_t) - max_{x in D_t} lcb(x) + 1 / t_local^2,
/// all acquisitions taken under the posterior that produced x_t.
inline double regret_upper_bound(const GpPosterior& gp, double beta_t, int t_local, double ucb_at_suggestion,
                                 std::span<const Point> evaluated) {
  if (t_local < 1) throw std::invalid_argument("regret_upper_bound: t_local must be >= 1");
  double best_lcb = -std::numeric_limits<double>::infinity();
  for (const auto& x : evaluated) best_lcb = std::max(best_lcb, lcb(gp, x, beta_t));
  const double tl = static_cast<double>(t_local);
  return ucb_at_suggestion - best_lcb + 1.0 / (tl * tl);
}

/// Bookkeeping for when the next expansion fires.
struct TriggerState {
  double epsilon = 0.05;
  int epoch_start = 0;  // t_k: iterations consumed by completed epochs
  double last_bound = std::numeric_limits<double>::quiet_NaN();

  int local_iteration(int t) const { return t - epoch_start; }

  /// Records r_b for iteration t; true when the region must be rebuilt.
  bool observe(int t, double bound) {
    last_bound = bound;
    return bound <= epsilon || t == 1;
  }

  /// Close the epoch that ended at iteration t.
  void close_epoch(int t) { epoch_start = t; }
};

}  // namespace ubo
