#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "ubo/benchlab.hpp"
#include "ubo/engine.hpp"

using namespace ubo;

namespace {

RunConfig beale_config(Strategy strategy, std::uint64_t seed, int budget = 20) {
  const Benchmark b = make_benchmark("beale");
  RunConfig c;
  c.strategy = strategy;
  c.seed = seed;
  c.objective = b.evaluate;
  c.initial_box = place_initial_box(b, seed);
  c.budget = budget;
  c.init_count = 6;
  return c;
}

RunConfig quadratic_config(Strategy strategy, std::uint64_t seed, int budget) {
  const Benchmark b = make_benchmark("quadratic1d");
  RunConfig c;
  c.strategy = strategy;
  c.seed = seed;
  c.objective = b.evaluate;
  c.initial_box = Box::cube(1, -0.1, 0.1);
  c.budget = budget;
  c.init_count = 3;
  return c;
}

void expect_same(const RunTrace& a, const RunTrace& b) {
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].x, b.records[i].x);
    EXPECT_EQ(a.records[i].y, b.records[i].y);
    EXPECT_EQ(a.records[i].box.lo, b.records[i].box.lo);
    EXPECT_EQ(a.records[i].flags, b.records[i].flags);
  }
  EXPECT_EQ(a.recommendation, b.recommendation);
}

}  // namespace

TEST(Engine, ZeroBudgetRecommendsBestInitialPoint) {
  RunConfig c = beale_config(Strategy::Ubo, 4, 0);
  const RunTrace t = run(c);
  ASSERT_EQ(static_cast<int>(t.records.size()), 6);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& r : t.records) best = std::max(best, r.y);
  EXPECT_EQ(t.recommendation_value, best);
  EXPECT_EQ(t.expansions, 0);
}

TEST(Engine, UboExpandsAtFirstIteration) {
  const RunTrace t = run(beale_config(Strategy::Ubo, 2));
  ASSERT_TRUE(t.complete()) << t.failure;
  const IterationRecord& first = t.records[static_cast<std::size_t>(t.init_count)];
  EXPECT_EQ(first.t, 1);
  EXPECT_TRUE(first.expanded);
  EXPECT_GT(first.radius, 0.0);
  EXPECT_GE(t.expansions, 1);
}

TEST(Engine, TraceInvariants) {
  for (Strategy s : {Strategy::Ubo, Strategy::Vanilla, Strategy::VolumeDoubling}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const RunConfig c = beale_config(s, seed);
      const RunTrace t = run(c);
      ASSERT_TRUE(t.complete()) << t.failure;
      ASSERT_EQ(static_cast<int>(t.records.size()), 26);

      int epoch_start = 0, completed = 0, expansions = 0;
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& r : t.records) {
        EXPECT_GE(r.best_y, best);
        best = r.best_y;
        if (r.t == 0) continue;
        // Suggestion lies in the box current when it was made.
        EXPECT_TRUE(r.box.contains(r.x, 1e-9)) << to_string(s) << " t=" << r.t;
        EXPECT_EQ(r.k, expansions);

        const int t_local = s == Strategy::Ubo ? r.t_local : r.t;
        EXPECT_EQ(r.t_local, t_local);
        if (s == Strategy::Ubo) {
          EXPECT_EQ(completed + r.t_local, r.t);
        }

        BetaSchedule sched{c.delta, 2, r.box.longest_side(), c.a_k, c.b_k, c.beta_scale,
                           s == Strategy::Ubo ? epoch_start : 0};
        EXPECT_EQ(r.beta, beta(sched, t_local));

        if (s == Strategy::Ubo) {
          EXPECT_TRUE(std::isfinite(r.regret_bound));
          if (r.expanded) {
            EXPECT_TRUE(r.regret_bound <= c.epsilon || r.t == 1);
            EXPECT_GT(r.t, epoch_start);
            epoch_start = r.t;
            completed = r.t;
          }
        } else {
          EXPECT_TRUE(std::isnan(r.regret_bound));
          EXPECT_TRUE(std::isnan(r.radius));
        }
        if (r.expanded && s != Strategy::Vanilla) ++expansions;
      }
      EXPECT_EQ(expansions, t.expansions);
      if (s == Strategy::Vanilla) {
        EXPECT_EQ(t.expansions, 0);
      }
    }
  }
}

TEST(Engine, VolumeDoublingSchedule) {
  RunConfig c = quadratic_config(Strategy::VolumeDoubling, 1, 6);
  const RunTrace t = run(c);
  ASSERT_TRUE(t.complete());
  std::vector<int> doubled;
  for (const auto& r : t.records)
    if (r.expanded) doubled.push_back(r.t);
  EXPECT_EQ(doubled, (std::vector<int>{3, 6}));
  EXPECT_NEAR(t.final_box.sides()[0], 0.8, 1e-12);

  RunConfig c2 = beale_config(Strategy::VolumeDoubling, 1, 6);
  c2.initial_box = Box::cube(2, 0.0, 0.2);
  const RunTrace t2 = run(c2);
  EXPECT_NEAR(t2.final_box.sides()[0], 0.2 * std::sqrt(2.0), 1e-12);
  EXPECT_TRUE(t2.final_box.center().isApprox(Eigen::Vector2d(0.1, 0.1)));
}

TEST(Engine, VanillaNeverExceedsBoxCeiling) {
  const Benchmark b = make_benchmark("beale");
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    RunConfig c = beale_config(Strategy::Vanilla, seed);
    c.initial_box = place_initial_box_excluding_argmax(b, seed);
    const RunTrace t = run(c);
    // Dense grid ceiling over the user box.
    double ceiling = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 400; ++i)
      for (int j = 0; j <= 400; ++j) {
        const Eigen::Vector2d x = c.initial_box.lo.array() + c.initial_box.sides().array() * Eigen::Array2d(i, j) / 400.0;
        ceiling = std::max(ceiling, b.evaluate(x));
      }
    EXPECT_LE(t.recommendation_value, ceiling + 1e-6 * std::abs(ceiling));
    EXPECT_LT(t.recommendation_value, b.max_value);
    EXPECT_TRUE(c.initial_box.contains(t.recommendation));
  }
}

TEST(Engine, Reproducible) {
  for (Strategy s : {Strategy::Ubo, Strategy::VolumeDoubling}) {
    const RunConfig c = beale_config(s, 9);
    expect_same(run(c), run(c));
  }
}

TEST(Engine, TriggerFiresOnQuadratic) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    RunConfig c = quadratic_config(Strategy::Ubo, seed, 30);
    c.freeze_region = true;
    const RunTrace t = run(c);
    ASSERT_TRUE(t.complete());
    bool fired = false;
    for (const auto& r : t.records) fired = fired || (r.t > 0 && r.regret_bound <= c.epsilon);
    EXPECT_TRUE(fired) << "seed " << seed;
    EXPECT_EQ(t.expansions, 0);
  }
}

TEST(Engine, ObjectiveFailureLeavesPartialTrace) {
  RunConfig c = quadratic_config(Strategy::Ubo, 1, 10);
  int calls = 0;
  c.objective = [&](const Point& x) {
    if (++calls > 6) throw std::runtime_error("sensor offline");
    return -x.squaredNorm();
  };
  const RunTrace t = run(c);
  EXPECT_EQ(t.status, RunStatus::ObjectiveFailure);
  EXPECT_FALSE(t.complete());
  EXPECT_EQ(static_cast<int>(t.records.size()), 6);
  EXPECT_NE(t.failure.find("sensor offline"), std::string::npos);

  c.objective = [](const Point&) { return std::numeric_limits<double>::quiet_NaN(); };
  EXPECT_EQ(run(c).status, RunStatus::ObjectiveFailure);
}

TEST(Engine, InvalidConfigRejected) {
  RunConfig c = quadratic_config(Strategy::Ubo, 1, 5);
  c.epsilon = 0.0;
  EXPECT_THROW(run(c), std::invalid_argument);
  c = quadratic_config(Strategy::Ubo, 1, 5);
  c.init_count = 1;
  EXPECT_THROW(run(c), std::invalid_argument);
  c = quadratic_config(Strategy::Ubo, 1, 5);
  c.initial_box = Box::cube(1, 0.0, 0.0);
  EXPECT_THROW(run(c), std::invalid_argument);
}

TEST(Engine, StrategyNames) {
  EXPECT_EQ(strategy_from_string("ubo"), Strategy::Ubo);
  EXPECT_EQ(strategy_from_string("vanilla"), Strategy::Vanilla);
  EXPECT_EQ(strategy_from_string("volx2"), Strategy::VolumeDoubling);
  EXPECT_FALSE(strategy_from_string("random").has_value());
  EXPECT_THROW(run_baseline(quadratic_config(Strategy::Ubo, 1, 2)), std::invalid_argument);
  EXPECT_EQ(run_baseline(quadratic_config(Strategy::Vanilla, 1, 2)).expansions, 0);
}
