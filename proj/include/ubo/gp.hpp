#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "ubo/kernel.hpp"

namespace ubo {

/// Raised when (K + sigma^2 I) stays indefinite after the maximum jitter.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered observations D = {(x_i, y_i)} with observation noise variance.
/// Values are used as given; the prior mean is zero, so callers centre them.
struct Dataset {
  std::vector<Point> points;
  std::vector<double> values;
  double noise_variance = 0.0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  void add(Point x, double y) {
    points.push_back(std::move(x));
    values.push_back(y);
  }

  Eigen::VectorXd value_vector() const {
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  }

  void validate(int dim) const {
    if (points.size() != values.size())
      throw std::invalid_argument("dataset: points and values differ in length");
    if (!(noise_variance >= 0.0)) throw std::invalid_argument("dataset: noise variance must be >= 0");
    for (const auto& p : points)
      if (p.size() != dim) throw std::invalid_argument("dataset: point dimension mismatch");
  }
};

/// lambda_max is the largest singular value of (K + sigma^2 I)^{-1};
/// weight_bound is max(sum of negative z_j magnitudes, sum of positive z_j)
/// for z = (K + sigma^2 I)^{-1} y.
struct ExpansionQuantities {
  double lambda_max = 0.0;
  double weight_bound = 0.0;
  std::size_t n = 0;
};

struct PosteriorValue {
  double mean = 0.0;
  double variance = 0.0;
};

/// Zero-mean GP posterior conditioned on a dataset. Immutable once built.
class GpPosterior {
 public:
  static constexpr double kJitterStart = 1e-10;
  static constexpr double kJitterMax = 1e-4;

  GpPosterior(Dataset data, KernelSpec kernel) : data_(std::move(data)), kernel_(std::move(kernel)) {
    kernel_.validate();
    data_.validate(kernel_.dim);
    if (data_.empty()) return;

    Eigen::MatrixXd A = kernel_matrix(kernel_, data_.points);
    A.diagonal().array() += data_.noise_variance;
    factor_with_jitter(A);
    z_ = llt_.solve(data_.value_vector());
  }

  const Dataset& data() const { return data_; }
  const KernelSpec& kernel() const { return kernel_; }
  int dim() const { return kernel_.dim; }
  std::size_t size() const { return data_.size(); }
  const Eigen::VectorXd& weights() const { return z_; }
  /// Diagonal jitter that had to be added on top of sigma^2 (0 if none).
  double jitter() const { return jitter_; }

  template <typename Derived>
  Eigen::VectorXd cross_covariance(const Eigen::MatrixBase<Derived>& x) const {
    const auto n = static_cast<Eigen::Index>(data_.size());
    Eigen::VectorXd kx(n);
    for (Eigen::Index i = 0; i < n; ++i) kx[i] = detail::covariance_unchecked(kernel_, x, data_.points[i]);
    return kx;
  }

  template <typename Derived>
  PosteriorValue predict(const Eigen::MatrixBase<Derived>& x) const {
    if (x.size() != kernel_.dim) throw std::invalid_argument("posterior: query dimension mismatch");
    if (data_.empty()) return {0.0, kernel_.variance()};
    Eigen::VectorXd kx = cross_covariance(x);
    const double mean = kx.dot(z_);
    llt_.matrixL().solveInPlace(kx);
    const double var = kernel_.variance() - kx.squaredNorm();
    return {mean, std::max(var, 0.0)};
  }

  template <typename Derived>
  double mean(const Eigen::MatrixBase<Derived>& x) const {
    return predict(x).mean;
  }

  template <typename Derived>
  double variance(const Eigen::MatrixBase<Derived>& x) const {
    return predict(x).variance;
  }

  /// Requires n >= 1. Eigenvalues of the factored SPD matrix equal its
  /// singular values, so lambda_max = 1 / (smallest eigenvalue).
  ExpansionQuantities expansion_quantities() const {
    if (data_.empty()) throw std::invalid_argument("expansion_quantities: dataset is empty");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(factored_, Eigen::EigenvaluesOnly);
    const double smallest = eig.eigenvalues().minCoeff();
    if (!(smallest > 0.0)) throw NumericFailure("expansion_quantities: matrix is not positive definite");

    double pos = 0.0;
    double neg = 0.0;
    for (Eigen::Index j = 0; j < z_.size(); ++j) {
      if (z_[j] >= 0.0)
        pos += z_[j];
      else
        neg -= z_[j];
    }
    return {1.0 / smallest, std::max(pos, neg), data_.size()};
  }

 private:
  void factor_with_jitter(const Eigen::MatrixXd& A) {
    const double var = kernel_.variance();
    llt_.compute(A);
    if (llt_.info() == Eigen::Success) {
      factored_ = A;
      return;
    }
    for (double jitter = kJitterStart * var; var > 0.0 && jitter <= kJitterMax * var * (1.0 + 1e-12); jitter *= 2.0) {
      Eigen::MatrixXd B = A;
      B.diagonal().array() += jitter;
      llt_.compute(B);
      if (llt_.info() == Eigen::Success) {
        jitter_ = jitter;
        factored_ = std::move(B);
        return;
      }
    }
    throw NumericFailure("GP factorization failed after maximum jitter (n=" + std::to_string(data_.size()) + ")");
  }

  Dataset data_;
  KernelSpec kernel_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::MatrixXd factored_;
  Eigen::VectorXd z_;
  double jitter_ = 0.0;
};

}  // namespace ubo
