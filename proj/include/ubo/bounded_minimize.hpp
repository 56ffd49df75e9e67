#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Core>

namespace ubo {

struct QuasiNewtonOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-9;
  double step_tolerance = 1e-12;
  double value_tolerance = 1e-14;
  int max_backtracks = 40;
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

/// Projected BFGS on a box. `f(x, grad)` returns the objective at x and
/// writes its gradient into `grad`.
///
/// Coordinates pinned at a bound with the gradient pushing outward are
/// frozen for the step; the inverse-Hessian estimate is reset whenever
/// the search direction stops being a descent direction.
template <typename F>
MinimizeResult minimize_bounded(F&& f, Eigen::VectorXd x0, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                const QuasiNewtonOptions& opt = {}) {
  const Eigen::Index d = x0.size();
  auto project = [&](Eigen::VectorXd& v) { v = v.cwiseMax(lo).cwiseMin(hi); };

  MinimizeResult res;
  Eigen::VectorXd x = std::move(x0);
  project(x);
  Eigen::VectorXd g(d);
  double fx = f(x, g);
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(d, d);

  auto free_mask = [&](const Eigen::VectorXd& point, const Eigen::VectorXd& grad) {
    Eigen::VectorXd m = Eigen::VectorXd::Ones(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      const bool at_lo = point[j] <= lo[j] && grad[j] > 0.0;
      const bool at_hi = point[j] >= hi[j] && grad[j] < 0.0;
      if (at_lo || at_hi || lo[j] >= hi[j]) m[j] = 0.0;
    }
    return m;
  };

  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    if (!std::isfinite(fx)) break;
    const Eigen::VectorXd mask = free_mask(x, g);
    const Eigen::VectorXd gf = g.cwiseProduct(mask);
    if (gf.lpNorm<Eigen::Infinity>() <= opt.gradient_tolerance) break;

    Eigen::VectorXd p = -(H * gf).cwiseProduct(mask);
    if (p.dot(gf) >= 0.0) {
      H.setIdentity();
      p = -gf;
    }

    double alpha = 1.0;
    Eigen::VectorXd x_new(d), g_new(d);
    double f_new = fx;
    bool accepted = false;
    for (int b = 0; b < opt.max_backtracks; ++b) {
      x_new = x + alpha * p;
      project(x_new);
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (H.isIdentity()) break;
      H.setIdentity();
      continue;
    }

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double f_old = fx;
    x = x_new;
    g = g_new;
    fx = f_new;

    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) + rho * s * s.transpose();
    }

    if (s.lpNorm<Eigen::Infinity>() <= opt.step_tolerance) break;
    if (std::abs(f_old - fx) <= opt.value_tolerance * (1.0 + std::abs(fx))) break;
  }

  res.x = std::move(x);
  res.value = fx;
  res.iterations = it;
  return res;
}

}  // namespace ubo
