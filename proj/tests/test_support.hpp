#pragma once

// Shared generators and independent reference implementations for tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ubo/gp.hpp"
#include "ubo/kernel.hpp"

namespace ubo::testing {

inline std::vector<Point> random_points(std::mt19937_64& rng, int n, int d, double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) {
    Point p(d);
    for (int j = 0; j < d; ++j) p[j] = u(rng);
    pts.push_back(p);
  }
  return pts;
}

struct RandomInstance {
  Dataset data;
  KernelSpec kernel;
};

/// Random GP instance with centred outputs.
inline RandomInstance random_instance(std::mt19937_64& rng, int max_n, int max_d, bool allow_matern = true) {
  std::uniform_int_distribution<int> nd(1, max_n), dd(1, max_d);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = nd(rng), d = dd(rng);
  RandomInstance inst;
  const auto family = allow_matern && u(rng) < 0.5 ? KernelFamily::Matern52 : KernelFamily::SquaredExponential;
  inst.kernel = KernelSpec::isotropic(family, d, 0.5 + u(rng), 0.3 + 1.2 * u(rng));
  inst.data.points = random_points(rng, n, d);
  std::normal_distribution<double> g(0.0, 1.0);
  double mean = 0.0;
  for (int i = 0; i < n; ++i) {
    inst.data.values.push_back(g(rng));
    mean += inst.data.values.back();
  }
  mean /= n;
  for (double& v : inst.data.values) v -= mean;
  inst.data.noise_variance = std::pow(10.0, -4.0 + 3.0 * u(rng));
  return inst;
}

/// Textbook posterior with an explicit inverse of (K + sigma^2 I),
/// written directly from the radial formulas.
struct DensePosterior {
  Eigen::MatrixXd inverse;
  Eigen::VectorXd y;
  std::vector<Point> X;
  KernelSpec k;

  static double cov(const KernelSpec& k, const Point& a, const Point& b) {
    double r2 = 0.0;
    for (int j = 0; j < a.size(); ++j) {
      const double l = k.lengthscale.size() == 1 ? k.lengthscale[0] : k.lengthscale[j];
      r2 += (a[j] - b[j]) * (a[j] - b[j]) / (l * l);
    }
    const double t2 = k.theta * k.theta;
    if (k.family == KernelFamily::SquaredExponential) return t2 * std::exp(-r2 / 2.0);
    const double r = std::sqrt(r2);
    return t2 * (1.0 + std::sqrt(5.0) * r + 5.0 * r2 / 3.0) * std::exp(-std::sqrt(5.0) * r);
  }

  DensePosterior(const Dataset& data, const KernelSpec& kernel) : X(data.points), k(kernel) {
    const int n = static_cast<int>(X.size());
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = cov(k, X[i], X[j]) + (i == j ? data.noise_variance : 0.0);
    inverse = A.inverse();
    y = Eigen::Map<const Eigen::VectorXd>(data.values.data(), n);
  }

  std::pair<double, double> at(const Point& x) const {
    Eigen::VectorXd kx(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) kx[static_cast<Eigen::Index>(i)] = cov(k, x, X[i]);
    return {kx.dot(inverse * y), k.theta * k.theta - kx.dot(inverse * kx)};
  }
};

/// Point at exactly distance r from `center` in a uniformly random direction.
inline Point point_on_sphere(std::mt19937_64& rng, const Point& center, double r) {
  std::normal_distribution<double> g(0.0, 1.0);
  Point dir(center.size());
  for (int j = 0; j < center.size(); ++j) dir[j] = g(rng);
  return center + r * dir / dir.norm();
}

inline double min_distance(const Point& x, const std::vector<Point>& pts) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) m = std::min(m, (x - p).norm());
  return m;
}

}  // namespace ubo::testing
