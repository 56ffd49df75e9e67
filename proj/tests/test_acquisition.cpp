#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "ubo/acquisition.hpp"

using namespace ubo;

namespace {

BetaSchedule example_schedule() {
  BetaSchedule s;
  s.delta = 0.1;
  s.dim = 2;
  s.side_length = 1.0;
  s.a = 1.0;
  s.b = 1.0;
  s.scale = 1.0;
  return s;
}

}  // namespace

TEST(Beta, WorkedExample) {
  // 2 ln(2 pi^2 / 0.3) + 4 ln(2 sqrt(ln 80)), evaluated independently.
  EXPECT_NEAR(beta(example_schedule(), 1), 14.100770874119425, 1e-10);
}

TEST(Beta, ExperimentScaleIsLinear) {
  auto s = example_schedule();
  s.scale = 0.2;
  EXPECT_NEAR(beta(s, 1), 14.100770874119425 / 5.0, 1e-10);
}

TEST(Beta, IncreasingInLocalIteration) {
  const auto s = example_schedule();
  EXPECT_GT(beta(s, 4), beta(s, 1));
  for (int t = 1; t < 200; ++t) EXPECT_LT(beta(s, t), beta(s, t + 1));
}

TEST(Beta, ResetsWithEpochOffset) {
  auto s = example_schedule();
  s.epoch_offset = 7;
  EXPECT_DOUBLE_EQ(beta_at(s, 8), beta(s, 1));
  EXPECT_DOUBLE_EQ(beta_at(s, 12), beta(s, 5));
}

TEST(Beta, InvalidInputs) {
  auto s = example_schedule();
  s.side_length = 0.0;
  EXPECT_THROW(beta(s, 1), std::invalid_argument);
  s = example_schedule();
  s.delta = 1.0;
  EXPECT_THROW(beta(s, 1), std::invalid_argument);
  s.delta = 0.0;
  EXPECT_THROW(beta(s, 1), std::invalid_argument);
  EXPECT_THROW(beta(example_schedule(), 0), std::invalid_argument);
}

TEST(Ucb, ZeroBetaCollapsesToMean) {
  Dataset d;
  d.add(Point::Constant(1, 0.0), 0.7);
  d.noise_variance = 0.01;
  const GpPosterior gp(d, KernelSpec::isotropic(KernelFamily::SquaredExponential, 1, 1.0, 1.0));
  const Point x = Point::Constant(1, 0.4);
  EXPECT_DOUBLE_EQ(ucb(gp, x, 0.0), gp.mean(x));
  EXPECT_DOUBLE_EQ(lcb(gp, x, 0.0), gp.mean(x));
}

TEST(Ucb, SingleObservationValue) {
  Dataset d;
  d.add(Point::Constant(1, 0.0), 1.0);
  d.noise_variance = 0.01;
  const GpPosterior gp(d, KernelSpec::isotropic(KernelFamily::SquaredExponential, 1, 1.0, 1.0));
  EXPECT_NEAR(ucb(gp, Point::Constant(1, 0.0), 4.0), 1.189106447942988, 1e-12);
}

TEST(Ucb, ApproachesAsymptoteFarAway) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = ubo::testing::random_instance(rng, 10, 3);
    const GpPosterior gp(inst.data, inst.kernel);
    const double b = 0.5 + 5.0 * trial / 20.0;
    const double far = 10.0 * kernel_inverse_radius(inst.kernel, 1e-6 * inst.kernel.variance());
    const Point x = ubo::testing::point_on_sphere(rng, inst.data.points[0], far + 8.0);
    const double limit = asymptotic_value(b, inst.kernel.theta);
    EXPECT_NEAR(ucb(gp, x, b), limit, 1e-3 * limit);
  }
}

TEST(AsymptoticValue, Arithmetic) {
  EXPECT_DOUBLE_EQ(asymptotic_value(4.0, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(asymptotic_value(0.0, 3.0), 0.0);
  EXPECT_NEAR(asymptotic_value(2.82, 0.9), 1.5113570061372, 1e-12);
}

TEST(AcquisitionProperties, BandWidthAndMonotoneInBeta) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    auto inst = ubo::testing::random_instance(rng, 12, 3);
    const GpPosterior gp(inst.data, inst.kernel);
    for (const auto& x : ubo::testing::random_points(rng, 10, inst.kernel.dim, -3.0, 3.0)) {
      const auto p = gp.predict(x);
      double prev_u = -1e300, prev_l = 1e300;
      for (double b : {0.0, 0.5, 1.0, 3.0, 10.0}) {
        const double u = ucb(p, b), l = lcb(p, b);
        EXPECT_NEAR(u - l, 2.0 * std::sqrt(b) * std::sqrt(p.variance), 1e-12);
        EXPECT_GE(u, l);
        EXPECT_GE(u, prev_u);
        EXPECT_LE(l, prev_l);
        prev_u = u;
        prev_l = l;
      }
    }
  }
}

TEST(AcquisitionProperties, InvariantToRowPermutation) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = ubo::testing::random_instance(rng, 12, 3);
    Dataset shuffled = inst.data;
    std::vector<std::size_t> idx(shuffled.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      shuffled.points[i] = inst.data.points[idx[i]];
      shuffled.values[i] = inst.data.values[idx[i]];
    }
    const GpPosterior a(inst.data, inst.kernel), b(shuffled, inst.kernel);
    for (const auto& x : ubo::testing::random_points(rng, 5, inst.kernel.dim)) EXPECT_NEAR(ucb(a, x, 2.0), ucb(b, x, 2.0), 1e-9);
  }
}
