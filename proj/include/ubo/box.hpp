#pragma once

#include <stdexcept>

#include <Eigen/Core>

#include "ubo/kernel.hpp"

namespace ubo {

/// Axis-aligned box [lo, hi].
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  Box() = default;
  Box(Eigen::VectorXd lower, Eigen::VectorXd upper) : lo(std::move(lower)), hi(std::move(upper)) {
    if (lo.size() != hi.size()) throw std::invalid_argument("box: bound dimensions differ");
    if ((hi.array() < lo.array()).any()) throw std::invalid_argument("box: lower bound exceeds upper bound");
  }

  static Box cube(int dim, double lower, double upper) {
    return {Eigen::VectorXd::Constant(dim, lower), Eigen::VectorXd::Constant(dim, upper)};
  }

  int dim() const { return static_cast<int>(lo.size()); }
  Eigen::VectorXd sides() const { return hi - lo; }
  Eigen::VectorXd center() const { return 0.5 * (lo + hi); }
  double longest_side() const { return sides().maxCoeff(); }
  double diameter() const { return sides().norm(); }

  bool contains(const Point& x, double tol = 0.0) const {
    return ((x.array() >= lo.array() - tol) && (x.array() <= hi.array() + tol)).all();
  }

  bool contains(const Box& other) const {
    return (other.lo.array() >= lo.array()).all() && (other.hi.array() <= hi.array()).all();
  }

  Point clamp(const Point& x) const { return x.cwiseMax(lo).cwiseMin(hi); }

  /// Scale every side by `factor` about the centre.
  Box scaled(double factor) const {
    const Eigen::VectorXd c = center();
    const Eigen::VectorXd half = 0.5 * factor * sides();
    return {c - half, c + half};
  }
};

}  // namespace ubo
