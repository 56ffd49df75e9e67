#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace ubo {

using Point = Eigen::VectorXd;

enum class KernelFamily { SquaredExponential, Matern52 };

inline std::string_view to_string(KernelFamily family) {
  return family == KernelFamily::SquaredExponential ? "se" : "matern52";
}

inline KernelFamily kernel_family_from_string(std::string_view name) {
  if (name == "se" || name == "squared_exponential") return KernelFamily::SquaredExponential;
  if (name == "matern52" || name == "matern") return KernelFamily::Matern52;
  throw std::invalid_argument("unknown kernel family '" + std::string(name) + "'");
}

/// Stationary covariance k(x, x') = theta^2 * rho(r), where r is the
/// lengthscale-weighted distance and rho(0) = 1.
///
/// `lengthscale` holds either one entry (isotropic) or one per dimension.
struct KernelSpec {
  KernelFamily family = KernelFamily::SquaredExponential;
  double theta = 1.0;
  Eigen::VectorXd lengthscale = Eigen::VectorXd::Ones(1);
  int dim = 1;

  static KernelSpec isotropic(KernelFamily family, int dim, double theta, double lengthscale) {
    KernelSpec k;
    k.family = family;
    k.dim = dim;
    k.theta = theta;
    k.lengthscale = Eigen::VectorXd::Constant(1, lengthscale);
    return k;
  }

  double variance() const { return theta * theta; }

  double lengthscale_at(Eigen::Index j) const {
    return lengthscale.size() == 1 ? lengthscale[0] : lengthscale[j];
  }

  double max_lengthscale() const { return lengthscale.maxCoeff(); }

  void validate() const {
    if (dim < 1) throw std::invalid_argument("kernel dimension must be >= 1");
    if (!(theta >= 0.0) || !std::isfinite(theta))
      throw std::invalid_argument("kernel scale theta must be finite and >= 0");
    if (lengthscale.size() != 1 && lengthscale.size() != dim)
      throw std::invalid_argument("lengthscale must have 1 or dim entries");
    if (!(lengthscale.array() > 0.0).all() || !lengthscale.allFinite())
      throw std::invalid_argument("lengthscales must be finite and > 0");
  }
};

namespace detail {

inline constexpr double kSqrt5 = 2.23606797749978969640917366873;

/// Unit-variance radial profile as a function of the scaled distance r.
inline double radial_profile(KernelFamily family, double r) {
  switch (family) {
    case KernelFamily::SquaredExponential:
      return std::exp(-0.5 * r * r);
    case KernelFamily::Matern52: {
      const double a = kSqrt5 * r;
      return (1.0 + a + a * a / 3.0) * std::exp(-a);
    }
  }
  return 0.0;
}

template <typename A, typename B>
double scaled_distance_sq(const KernelSpec& k, const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& x2) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double u = (x[j] - x2[j]) / k.lengthscale_at(j);
    s += u * u;
  }
  return s;
}

template <typename A, typename B>
double covariance_unchecked(const KernelSpec& k, const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& x2) {
  const double r2 = scaled_distance_sq(k, x, x2);
  if (k.family == KernelFamily::SquaredExponential) return k.variance() * std::exp(-0.5 * r2);
  return k.variance() * radial_profile(k.family, std::sqrt(r2));
}

}  // namespace detail

template <typename A, typename B>
double kernel_eval(const KernelSpec& kernel, const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& x2) {
  if (x.size() != kernel.dim || x2.size() != kernel.dim)
    throw std::invalid_argument("kernel_eval: point dimension does not match kernel dimension");
  return detail::covariance_unchecked(kernel, x, x2);
}

/// Gram matrix over the rows of `points` (n x d).
inline Eigen::MatrixXd kernel_matrix(const KernelSpec& kernel, const std::vector<Point>& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = kernel.variance();
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = detail::covariance_unchecked(kernel, points[i], points[j]);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

/// Distance g such that k(x, x') <= gamma whenever ||x - x'||_2 >= g.
///
/// SE has the closed form sqrt(2 l^2 log(theta^2 / gamma)). Matern-5/2 is
/// inverted by bisection on its radial profile to 1e-10 absolute tolerance.
/// With per-dimension lengthscales the largest one is used, which keeps the
/// bound valid in every direction.
inline double kernel_inverse_radius(const KernelSpec& kernel, double gamma) {
  const double var = kernel.variance();
  if (!(gamma > 0.0) || gamma > var)
    throw std::invalid_argument("kernel_inverse_radius: gamma must lie in (0, theta^2]");
  const double l = kernel.max_lengthscale();
  const double ratio = gamma / var;
  if (ratio >= 1.0) return 0.0;

  if (kernel.family == KernelFamily::SquaredExponential)
    return std::sqrt(2.0 * l * l * std::log(var / gamma));

  double lo = 0.0;
  double hi = 1.0;
  while (detail::radial_profile(kernel.family, hi) > ratio) {
    lo = hi;
    hi *= 2.0;
  }
  // Tolerance is in input units, the bracket is in scaled units.
  const double tol = 1e-10 / l;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (detail::radial_profile(kernel.family, mid) > ratio)
      lo = mid;
    else
      hi = mid;
  }
  return hi * l;
}

}  // namespace ubo
