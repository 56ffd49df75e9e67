#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "ubo/bounded_minimize.hpp"
#include "ubo/gp.hpp"
#include "ubo/kernel.hpp"

namespace ubo {

struct FitOptions {
  int restarts = 8;
  double theta_min = 1e-3;
  double theta_max = 1e3;
  // Lengthscale bounds as multiples of the domain diameter.
  double lengthscale_min_factor = 1e-3;
  double lengthscale_max_factor = 10.0;
  double noise_min = 1e-8;
  double noise_max = 1.0;
  bool ard = true;  // one lengthscale per input dimension
  int max_iterations = 200;
};

struct FitResult {
  KernelSpec kernel;
  double noise_variance = 0.0;
  double log_likelihood = -std::numeric_limits<double>::infinity();
  bool used_default = false;
};

/// Hyperparameters packed as [log theta, log l_1..l_m, log sigma^2].
struct HyperParameters {
  KernelFamily family = KernelFamily::SquaredExponential;
  int dim = 1;
  bool ard = false;

  Eigen::Index lengthscale_count() const { return ard ? dim : 1; }
  Eigen::Index size() const { return lengthscale_count() + 2; }

  KernelSpec kernel(const Eigen::VectorXd& p) const {
    KernelSpec k;
    k.family = family;
    k.dim = dim;
    k.theta = std::exp(p[0]);
    k.lengthscale = p.segment(1, lengthscale_count()).array().exp();
    return k;
  }
  double noise(const Eigen::VectorXd& p) const { return std::exp(p[size() - 1]); }

  Eigen::VectorXd pack(const KernelSpec& k, double noise) const {
    Eigen::VectorXd p(size());
    p[0] = std::log(k.theta);
    for (Eigen::Index j = 0; j < lengthscale_count(); ++j)
      p[1 + j] = std::log(k.lengthscale.size() == 1 ? k.lengthscale[0] : k.lengthscale[j]);
    p[size() - 1] = std::log(noise);
    return p;
  }
};

/// Log marginal likelihood log p(y | X, params) and its gradient with
/// respect to the log-parameters. Returns -inf when the Gram matrix cannot
/// be factored.
inline double log_marginal_likelihood(const std::vector<Point>& X, const Eigen::VectorXd& y,
                                      const HyperParameters& hp, const Eigen::VectorXd& p,
                                      Eigen::VectorXd* grad = nullptr) {
  const auto n = static_cast<Eigen::Index>(X.size());
  const KernelSpec k = hp.kernel(p);
  const double noise = hp.noise(p);
  const double var = k.variance();
  const Eigen::Index m = hp.lengthscale_count();

  Eigen::MatrixXd K(n, n);
  // Per-pair squared scaled offsets, per lengthscale parameter.
  std::vector<Eigen::MatrixXd> U(grad ? static_cast<std::size_t>(m) : 0, Eigen::MatrixXd::Zero(n, n));
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = var;
    for (Eigen::Index j = 0; j < i; ++j) {
      double r2 = 0.0;
      for (Eigen::Index c = 0; c < k.dim; ++c) {
        const double u = (X[i][c] - X[j][c]) / k.lengthscale_at(c);
        r2 += u * u;
        if (grad) {
          const auto slot = static_cast<std::size_t>(hp.ard ? c : 0);
          U[slot](i, j) += u * u;
        }
      }
      const double v = var * detail::radial_profile(k.family, std::sqrt(r2));
      K(i, j) = v;
      K(j, i) = v;
      if (grad) {
        // dK/dlog l = theta^2 * w(r) * u^2
        const double r = std::sqrt(r2);
        const double w = k.family == KernelFamily::SquaredExponential
                             ? std::exp(-0.5 * r2)
                             : (5.0 / 3.0) * (1.0 + detail::kSqrt5 * r) * std::exp(-detail::kSqrt5 * r);
        for (auto& Uc : U) {
          Uc(i, j) *= var * w;
          Uc(j, i) = Uc(i, j);
        }
      }
    }
  }

  Eigen::MatrixXd A = K;
  A.diagonal().array() += noise;
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();

  const Eigen::VectorXd alpha = llt.solve(y);
  const double log_det_half = llt.matrixLLT().diagonal().array().log().sum();
  const double lml =
      -0.5 * y.dot(alpha) - log_det_half - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  if (!std::isfinite(lml)) return -std::numeric_limits<double>::infinity();

  if (grad) {
    const Eigen::MatrixXd W = alpha * alpha.transpose() - llt.solve(Eigen::MatrixXd::Identity(n, n));
    grad->resize(hp.size());
    (*grad)[0] = 0.5 * (W.cwiseProduct(2.0 * K)).sum();
    for (Eigen::Index c = 0; c < m; ++c) (*grad)[1 + c] = 0.5 * (W.cwiseProduct(U[static_cast<std::size_t>(c)])).sum();
    (*grad)[hp.size() - 1] = 0.5 * noise * W.trace();
  }
  return lml;
}

/// Multistart maximum-likelihood fit of (theta, lengthscale, sigma^2) in
/// log space. Start 0 is `warm_start` when given (clipped into bounds),
/// otherwise the centre of the log box; the rest are drawn from `seed`.
inline FitResult fit_hyperparameters(const Dataset& data, KernelFamily family, int dim, double domain_diameter,
                                     std::uint64_t seed, const FitOptions& opt = {},
                                     std::optional<std::pair<KernelSpec, double>> warm_start = std::nullopt,
                                     std::optional<std::pair<KernelSpec, double>> fallback = std::nullopt) {
  if (!(domain_diameter > 0.0)) throw std::invalid_argument("fit_hyperparameters: domain diameter must be > 0");
  if (data.size() < 2) {
    FitResult r;
    if (fallback) {
      r.kernel = fallback->first;
      r.noise_variance = fallback->second;
    } else {
      r.kernel = KernelSpec::isotropic(family, dim, 1.0, 0.2 * domain_diameter);
      r.noise_variance = 1e-6;
    }
    r.used_default = true;
    return r;
  }
  data.validate(dim);

  HyperParameters hp{family, dim, opt.ard};
  const Eigen::Index np = hp.size();
  Eigen::VectorXd lo(np), hi(np);
  lo[0] = std::log(opt.theta_min);
  hi[0] = std::log(opt.theta_max);
  lo.segment(1, hp.lengthscale_count()).setConstant(std::log(opt.lengthscale_min_factor * domain_diameter));
  hi.segment(1, hp.lengthscale_count()).setConstant(std::log(opt.lengthscale_max_factor * domain_diameter));
  lo[np - 1] = std::log(opt.noise_min);
  hi[np - 1] = std::log(opt.noise_max);

  const Eigen::VectorXd y = data.value_vector();
  auto objective = [&](const Eigen::VectorXd& p, Eigen::VectorXd& g) {
    const double v = log_marginal_likelihood(data.points, y, hp, p, &g);
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    g = -g;
    return -v;
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  QuasiNewtonOptions qn;
  qn.max_iterations = opt.max_iterations;

  FitResult best;
  for (int s = 0; s < opt.restarts; ++s) {
    Eigen::VectorXd p0(np);
    if (s == 0) {
      p0 = warm_start ? hp.pack(warm_start->first, warm_start->second) : Eigen::VectorXd(0.5 * (lo + hi));
      p0 = p0.cwiseMax(lo).cwiseMin(hi);
    } else {
      for (Eigen::Index j = 0; j < np; ++j) p0[j] = lo[j] + unit(rng) * (hi[j] - lo[j]);
    }
    const MinimizeResult r = minimize_bounded(objective, p0, lo, hi, qn);
    if (std::isfinite(r.value) && -r.value > best.log_likelihood) {
      best.log_likelihood = -r.value;
      best.kernel = hp.kernel(r.x);
      best.noise_variance = hp.noise(r.x);
    }
  }
  if (!std::isfinite(best.log_likelihood))
    throw NumericFailure("fit_hyperparameters: no start produced a finite likelihood");
  return best;
}

}  // namespace ubo
