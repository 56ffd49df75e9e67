#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ubo/box.hpp"
#include "ubo/kernel.hpp"
#include "ubo/seeding.hpp"

namespace ubo {

/// A synthetic objective in maximization form (standard minimization test
/// functions are negated) with its known optimum. The domain is metadata
/// for box placement; the evaluator is defined on all of R^d.
struct Benchmark {
  std::string name;
  int dim = 0;
  Box domain;
  std::function<double(const Point&)> evaluate;
  std::vector<Point> argmax;
  double max_value = 0.0;
};

namespace functions {

inline double beale(const Point& x) {
  const double a = x[0], b = x[1];
  const double t1 = 1.5 - a + a * b;
  const double t2 = 2.25 - a + a * b * b;
  const double t3 = 2.625 - a + a * b * b * b;
  return t1 * t1 + t2 * t2 + t3 * t3;
}

inline double eggholder(const Point& x) {
  const double a = x[0], b = x[1] + 47.0;
  return -b * std::sin(std::sqrt(std::abs(b + a / 2.0))) - a * std::sin(std::sqrt(std::abs(a - b)));
}

inline double levy(const Point& x) {
  const auto d = x.size();
  auto w = [&](Eigen::Index i) { return 1.0 + (x[i] - 1.0) / 4.0; };
  constexpr double pi = std::numbers::pi;
  const double s0 = std::sin(pi * w(0));
  double f = s0 * s0;
  for (Eigen::Index i = 0; i + 1 < d; ++i) {
    const double wi = w(i);
    const double s = std::sin(pi * wi + 1.0);
    f += (wi - 1.0) * (wi - 1.0) * (1.0 + 10.0 * s * s);
  }
  const double wd = w(d - 1);
  const double sd = std::sin(2.0 * pi * wd);
  f += (wd - 1.0) * (wd - 1.0) * (1.0 + sd * sd);
  return f;
}

inline double ackley(const Point& x) {
  const double d = static_cast<double>(x.size());
  const double sq = x.squaredNorm() / d;
  const double cs = (2.0 * std::numbers::pi * x.array()).cos().sum() / d;
  return -20.0 * std::exp(-0.2 * std::sqrt(sq)) - std::exp(cs) + 20.0 + std::numbers::e;
}

template <std::size_t D>
double hartman(const Point& x, const std::array<std::array<double, D>, 4>& A,
               const std::array<std::array<double, D>, 4>& P) {
  static constexpr std::array<double, 4> alpha{1.0, 1.2, 3.0, 3.2};
  double f = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (std::size_t j = 0; j < D; ++j) {
      const double u = x[static_cast<Eigen::Index>(j)] - P[i][j];
      inner += A[i][j] * u * u;
    }
    f -= alpha[i] * std::exp(-inner);
  }
  return f;
}

inline double hartman3(const Point& x) {
  static constexpr std::array<std::array<double, 3>, 4> A{{{3.0, 10.0, 30.0},
                                                           {0.1, 10.0, 35.0},
                                                           {3.0, 10.0, 30.0},
                                                           {0.1, 10.0, 35.0}}};
  static constexpr std::array<std::array<double, 3>, 4> P{{{0.3689, 0.1170, 0.2673},
                                                           {0.4699, 0.4387, 0.7470},
                                                           {0.1091, 0.8732, 0.5547},
                                                           {0.0381, 0.5743, 0.8828}}};
  return hartman<3>(x, A, P);
}

inline double hartman6(const Point& x) {
  static constexpr std::array<std::array<double, 6>, 4> A{{{10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
                                                           {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
                                                           {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
                                                           {17.0, 8.0, 0.05, 10.0, 0.1, 14.0}}};
  static constexpr std::array<std::array<double, 6>, 4> P{{{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                                                           {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                                                           {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                                                           {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}}};
  return hartman<6>(x, A, P);
}

}  // namespace functions

namespace detail {

inline Point make_point(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), p.data());
  return p;
}

template <typename F>
std::function<double(const Point&)> negated(F f, int dim, std::string name) {
  return [f, dim, name = std::move(name)](const Point& x) {
    if (x.size() != dim) throw std::invalid_argument(name + ": expected a point of dimension " + std::to_string(dim));
    return -f(x);
  };
}

}  // namespace detail

/// Known names: beale, eggholder, hartman3, hartman6, levy<d>, ackley<d>
/// and quadratic1d (-(x - 0.3)^2 on [-1, 1]).
inline Benchmark make_benchmark(const std::string& name) {
  using detail::make_point;
  Benchmark b;
  b.name = name;
  if (name == "beale") {
    b.dim = 2;
    b.domain = Box::cube(2, -4.5, 4.5);
    b.evaluate = detail::negated(functions::beale, 2, name);
    b.argmax = {make_point({3.0, 0.5})};
    b.max_value = 0.0;
  } else if (name == "eggholder") {
    b.dim = 2;
    b.domain = Box::cube(2, -512.0, 512.0);
    b.evaluate = detail::negated(functions::eggholder, 2, name);
    b.argmax = {make_point({512.0, 404.2319})};
    b.max_value = 959.6407;
  } else if (name == "hartman3") {
    b.dim = 3;
    b.domain = Box::cube(3, 0.0, 1.0);
    b.evaluate = detail::negated(functions::hartman3, 3, name);
    b.argmax = {make_point({0.114614, 0.555649, 0.852547})};
    b.max_value = 3.86278;
  } else if (name == "hartman6") {
    b.dim = 6;
    b.domain = Box::cube(6, 0.0, 1.0);
    b.evaluate = detail::negated(functions::hartman6, 6, name);
    b.argmax = {make_point({0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573})};
    b.max_value = 3.32237;
  } else if (name.rfind("levy", 0) == 0 || name.rfind("ackley", 0) == 0) {
    const bool is_levy = name.rfind("levy", 0) == 0;
    const std::string digits = name.substr(is_levy ? 4 : 6);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); }))
      throw std::invalid_argument("unknown benchmark '" + name + "'");
    const int d = std::stoi(digits);
    if (d < 1 || d > 64) throw std::invalid_argument("unknown benchmark '" + name + "'");
    b.dim = d;
    if (is_levy) {
      b.domain = Box::cube(d, -10.0, 10.0);
      b.evaluate = detail::negated(functions::levy, d, name);
      b.argmax = {Point::Ones(d)};
    } else {
      b.domain = Box::cube(d, -32.768, 32.768);
      b.evaluate = detail::negated(functions::ackley, d, name);
      b.argmax = {Point::Zero(d)};
    }
    b.max_value = 0.0;
  } else if (name == "quadratic1d") {
    b.dim = 1;
    b.domain = Box::cube(1, -1.0, 1.0);
    b.evaluate = [](const Point& x) {
      if (x.size() != 1) throw std::invalid_argument("quadratic1d: expected a 1-d point");
      return -(x[0] - 0.3) * (x[0] - 0.3);
    };
    b.argmax = {make_point({0.3})};
    b.max_value = 0.0;
  } else {
    throw std::invalid_argument("unknown benchmark '" + name + "'");
  }
  return b;
}

/// Initial user box: every side is 20% of the domain side, the centre is
/// uniform over the domain, and the box is then shifted to lie inside it.
inline Box place_initial_box(const Box& domain, std::mt19937_64& rng, double fraction = 0.2) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Eigen::VectorXd side = fraction * domain.sides();
  Eigen::VectorXd c(domain.dim());
  for (int j = 0; j < domain.dim(); ++j) {
    c[j] = domain.lo[j] + unit(rng) * (domain.hi[j] - domain.lo[j]);
    c[j] = std::clamp(c[j], domain.lo[j] + 0.5 * side[j], domain.hi[j] - 0.5 * side[j]);
  }
  return {c - 0.5 * side, c + 0.5 * side};
}

inline Box place_initial_box(const Benchmark& bench, std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, Stream::Placement));
  return place_initial_box(bench.domain, rng);
}

/// Placement redrawn until no known argmax lies inside the box.
inline Box place_initial_box_excluding_argmax(const Benchmark& bench, std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, Stream::Placement));
  for (int attempt = 0; attempt < 100000; ++attempt) {
    Box b = place_initial_box(bench.domain, rng);
    if (std::none_of(bench.argmax.begin(), bench.argmax.end(), [&](const Point& a) { return b.contains(a); }))
      return b;
  }
  throw std::runtime_error("place_initial_box_excluding_argmax: every placement covers the argmax");
}

/// Latin hypercube design: along every axis each of the `count`
/// equal-width strata holds exactly one point.
inline std::vector<Point> latin_hypercube(const Box& box, int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("latin_hypercube: count must be >= 1");
  const int d = box.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> pts(static_cast<std::size_t>(count), Point(d));
  std::vector<int> perm(static_cast<std::size_t>(count));
  for (int j = 0; j < d; ++j) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < count; ++i) {
      const double u = (perm[static_cast<std::size_t>(i)] + unit(rng)) / count;
      pts[static_cast<std::size_t>(i)][j] = box.lo[j] + u * (box.hi[j] - box.lo[j]);
    }
  }
  return pts;
}

struct AggregateCurve {
  std::vector<double> mean;
  std::vector<double> stderr_;
  std::size_t repetitions = 0;
};

/// Per-index mean and standard error (sample std / sqrt(reps)).
inline AggregateCurve aggregate(const std::vector<std::vector<double>>& series) {
  if (series.empty()) throw std::invalid_argument("aggregate: no series");
  const std::size_t len = series.front().size();
  for (const auto& s : series)
    if (s.size() != len) throw std::invalid_argument("aggregate: series lengths differ");
  const double reps = static_cast<double>(series.size());
  AggregateCurve out;
  out.repetitions = series.size();
  out.mean.assign(len, 0.0);
  out.stderr_.assign(len, 0.0);
  for (std::size_t t = 0; t < len; ++t) {
    double m = 0.0;
    for (const auto& s : series) m += s[t];
    m /= reps;
    double ss = 0.0;
    for (const auto& s : series) ss += (s[t] - m) * (s[t] - m);
    out.mean[t] = m;
    out.stderr_[t] = series.size() > 1 ? std::sqrt(ss / (reps - 1.0)) / std::sqrt(reps) : 0.0;
  }
  return out;
}

}  // namespace ubo
