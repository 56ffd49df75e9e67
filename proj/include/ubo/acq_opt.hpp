#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "ubo/acquisition.hpp"
#include "ubo/bounded_minimize.hpp"
#include "ubo/box.hpp"
#include "ubo/expansion.hpp"
#include "ubo/gp.hpp"

namespace ubo {

struct BoxSearchOptions {
  int starts = 32;
  int max_iterations = 200;
  double gradient_step = 1e-6;  // fraction of each box side
};

struct BoxMaximum {
  Point x;
  double value = -std::numeric_limits<double>::infinity();
};

namespace detail {

inline double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
    i /= static_cast<std::uint64_t>(base);
    f *= inv;
  }
  return r;
}

inline int nth_prime(int j) {
  static constexpr std::array<int, 24> primes{2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                              41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};
  if (j < static_cast<int>(primes.size())) return primes[static_cast<std::size_t>(j)];
  int p = primes.back();
  for (int found = static_cast<int>(primes.size()) - 1; found < j;) {
    p += 2;
    bool prime = true;
    for (int q = 3; q * q <= p; q += 2)
      if (p % q == 0) {
        prime = false;
        break;
      }
    if (prime) ++found;
  }
  return p;
}

/// Lexicographic order on coordinates, used to break value ties.
inline bool lex_less(const Point& a, const Point& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

inline bool better(double va, const Point& a, double vb, const Point& b) {
  if (va != vb) return va > vb;
  return lex_less(a, b);
}

}  // namespace detail

/// `count` points of a Halton sequence in [0,1]^dim with a seeded random
/// shift modulo 1.
inline std::vector<Point> shifted_halton(int count, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd shift(dim);
  for (int j = 0; j < dim; ++j) shift[j] = unit(rng);
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Point p(dim);
    for (int j = 0; j < dim; ++j) {
      const double v = detail::radical_inverse(static_cast<std::uint64_t>(i + 1), detail::nth_prime(j)) + shift[j];
      p[j] = v - std::floor(v);
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

/// Multistart maximization of `objective` over `box`.
///
/// Starts: the caller's `extra_starts` that lie in the box, topped up from a
/// shifted Halton set to `opt.starts`. Each start runs projected BFGS on
/// central-difference gradients in unit-cube coordinates. Zero-width sides
/// stay fixed.
template <typename F>
BoxMaximum maximize_over_box(F&& objective, const Box& box, std::uint64_t seed,
                             std::span<const Point> extra_starts = {}, const BoxSearchOptions& opt = {}) {
  const int d = box.dim();
  if (d < 1) throw std::invalid_argument("maximize_over_box: empty box");
  if (!box.lo.allFinite() || !box.hi.allFinite()) throw std::invalid_argument("maximize_over_box: box must be finite");
  const Eigen::VectorXd width = box.sides();

  auto to_box = [&](const Eigen::VectorXd& u) -> Point { return box.lo + u.cwiseProduct(width); };

  std::vector<Eigen::VectorXd> starts;
  for (const auto& s : extra_starts) {
    if (static_cast<int>(starts.size()) >= opt.starts) break;
    if (s.size() == d && box.contains(s)) {
      Eigen::VectorXd u(d);
      for (int j = 0; j < d; ++j) u[j] = width[j] > 0.0 ? (s[j] - box.lo[j]) / width[j] : 0.0;
      starts.push_back(u);
    }
  }
  const int fill = opt.starts - static_cast<int>(starts.size());
  for (auto& u : shifted_halton(std::max(fill, 0), d, seed)) starts.push_back(std::move(u));

  const double h = opt.gradient_step;
  auto negated = [&](const Eigen::VectorXd& u, Eigen::VectorXd& g) {
    const double f0 = objective(to_box(u));
    g.resize(d);
    Eigen::VectorXd v = u;
    for (int j = 0; j < d; ++j) {
      if (!(width[j] > 0.0)) {
        g[j] = 0.0;
        continue;
      }
      const double uj = u[j];
      const double up = std::min(uj + h, 1.0);
      const double dn = std::max(uj - h, 0.0);
      v[j] = up;
      const double fp = objective(to_box(v));
      v[j] = dn;
      const double fm = objective(to_box(v));
      v[j] = uj;
      g[j] = -(fp - fm) / (up - dn);
    }
    return -f0;
  };

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd one = Eigen::VectorXd::Ones(d);
  for (int j = 0; j < d; ++j)
    if (!(width[j] > 0.0)) one[j] = 0.0;

  QuasiNewtonOptions qn;
  qn.max_iterations = opt.max_iterations;
  qn.gradient_tolerance = 1e-10;

  BoxMaximum best;
  for (const auto& u0 : starts) {
    const MinimizeResult r = minimize_bounded(negated, u0.cwiseMin(one), zero, one, qn);
    const Point x = to_box(r.x);
    const double v = objective(x);
    if (!std::isfinite(v)) continue;
    if (best.x.size() == 0 || detail::better(v, x, best.value, best.x)) {
      best.x = x;
      best.value = v;
    }
  }
  if (best.x.size() == 0) throw NumericFailure("maximize_over_box: objective was non-finite at every start");
  return best;
}

enum class RefinementBranch { UserBox, BigBox, PerBall, Fallback };

inline const char* to_string(RefinementBranch b) {
  switch (b) {
    case RefinementBranch::UserBox: return "user_box";
    case RefinementBranch::BigBox: return "big_box";
    case RefinementBranch::PerBall: return "per_ball";
    case RefinementBranch::Fallback: return "per_ball_fallback";
  }
  return "?";
}

struct Suggestion {
  Point x;
  double value = 0.0;
  RefinementBranch branch = RefinementBranch::UserBox;
};

/// UCB maximization over a search region with the per-ball refinement.
///
/// The region's hypercube is searched first. A maximum above sqrt(beta)
/// theta or below sqrt(beta) theta - eps is returned as is. Otherwise the
/// hypercube's maximizer may only reflect the acquisition's approach to its
/// limit far from the data, so the boxes around each ball are searched in
/// descending order of UCB at their centres, and the first maximum below
/// sqrt(beta) theta - eps wins. If none qualifies the best per-ball maximum
/// is returned.
inline Suggestion refined_maximize(const GpPosterior& gp, double beta_t, double eps, const SearchRegion& region,
                                   std::uint64_t seed, std::span<const Point> extra_starts = {},
                                   const BoxSearchOptions& opt = {}) {
  auto acq = [&](const Point& x) { return ucb(gp.predict(x), beta_t); };

  const BoxMaximum big = maximize_over_box(acq, region.hypercube, seed, extra_starts, opt);
  if (region.user_box() || region.centers.empty()) return {big.x, big.value, RefinementBranch::UserBox};

  const double limit = asymptotic_value(beta_t, gp.kernel().theta);
  if (big.value > limit || big.value < limit - eps) return {big.x, big.value, RefinementBranch::BigBox};

  std::vector<std::size_t> order(region.centers.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> center_value(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) center_value[i] = acq(region.centers[i]);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return center_value[a] > center_value[b]; });

  BoxMaximum best_ball;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const std::size_t i = order[rank];
    const Point center = region.centers[i];
    const BoxMaximum m =
        maximize_over_box(acq, region.ball_box(i), seed + 0x9E3779B97F4A7C15ULL * (rank + 1), std::span(&center, 1), opt);
    if (m.value < limit - eps) return {m.x, m.value, RefinementBranch::PerBall};
    if (best_ball.x.size() == 0 || detail::better(m.value, m.x, best_ball.value, best_ball.x)) best_ball = m;
  }
  return {best_ball.x, best_ball.value, RefinementBranch::Fallback};
}

}  // namespace ubo
