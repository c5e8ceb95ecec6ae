#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace vddc;

namespace {

// Single type with its efficient size on the B = 20 grid: 6 / C - 1 = 30.
Scenario single_type() {
  Scenario sc;
  const double c = 6.0 / 31.0;
  sc.types = {{1, 0.1, c - 0.1, 1.0, 1}};
  sc.total_uavs = 1;
  return sc;
}

EpisodeLog synthetic_log(const std::vector<std::pair<std::size_t, std::size_t>>& actions) {
  EpisodeLog log;
  log.type_indices = {1};
  log.slots = actions.size();
  for (std::size_t t = 0; t < actions.size(); ++t) {
    SlotRecord r;
    r.slot = t;
    r.type_index = 1;
    r.reward_action = actions[t].first;
    r.size_action = actions[t].second;
    r.size = 10.0 * actions[t].second;
    r.reward = 1.0 * actions[t].first;
    log.records.push_back(r);
  }
  return log;
}

} // namespace

TEST(Grids, RewardLevels) {
  PhcParams p;
  p.reward_levels = 10;
  p.r_max = 20.0;
  p.margin_max = 1.0;
  const auto g = action_grids(p, 300.0);
  ASSERT_EQ(g.reward.size(), 11u);
  for (int a = 0; a <= 10; ++a) EXPECT_DOUBLE_EQ(g.reward[a], 2.0 * a);
}

TEST(Grids, SizeLevels) {
  PhcParams p;
  p.size_levels = 10;
  const auto g = action_grids(p, 300.0);
  ASSERT_EQ(g.size.size(), 11u);
  for (int b = 0; b <= 10; ++b) EXPECT_DOUBLE_EQ(g.size[b], 30.0 * b);
}

TEST(Grids, TwoLevel) {
  EXPECT_EQ(uniform_grid(1, 7.0), (std::vector<double>{0.0, 7.0}));
  EXPECT_EQ(uniform_grid(0, 7.0), (std::vector<double>{7.0}));
}

TEST(Grids, DefaultTops) {
  const auto sc = single_type();
  const auto p = resolve_defaults(PhcParams{}, sc);
  EXPECT_NEAR(p.r_max, 2.0 * (6.0 / 31.0 * 300.0 + 1.0), 1e-12);
  EXPECT_NEAR(p.margin_max, 6.0 * std::log(301.0), 1e-12);
}

TEST(Quantize, OnGridAndNearest) {
  const auto g = uniform_grid(10, 300.0);
  EXPECT_EQ(quantize_state(90.0, g), 3u);
  EXPECT_EQ(quantize_state(31.0, g), 1u);
  EXPECT_EQ(quantize_state(44.0, g), 1u);
  EXPECT_EQ(quantize_state(46.0, g), 2u);
}

TEST(Quantize, TiesRoundDown) { EXPECT_EQ(quantize_state(45.0, uniform_grid(10, 300.0)), 1u); }

TEST(Quantize, Clamps) {
  const auto g = uniform_grid(10, 300.0);
  EXPECT_EQ(quantize_state(1e6, g), 10u);
  EXPECT_EQ(quantize_state(-3.0, g), 0u);
}

TEST(PhcUpdate, SingleBellmanStep) {
  PolicyTables t(1, 3);
  phc_update(t, 0, 1, 10.0, 0, {0.7, 0.8, 0.01});
  EXPECT_DOUBLE_EQ(t.q(0, 1), 7.0);
}

TEST(PhcUpdate, HillClimbArithmetic) {
  PolicyTables t(1, 11);
  t.q(0, 4) = 1.0;  // greedy action
  phc_update(t, 0, 0, 0.0, 0, {0.7, 0.8, 0.01});
  // No entry hits zero, so renormalization only removes the net 0.01/11.
  const double up = 1.0 / 11 + 0.01, down = 1.0 / 11 - 0.01 / 11;
  const double sum = up + 10 * down;
  EXPECT_NEAR(t.policy(0)[4], up / sum, 1e-15);
  EXPECT_NEAR(t.policy(0)[0], down / sum, 1e-15);
  EXPECT_TRUE(t.valid());
}

TEST(PhcUpdate, ZeroPayoffFixedPoint) {
  PolicyTables t(2, 3);
  phc_update(t, 0, 2, 0.0, 1, {0.7, 0.8, 0.01});
  for (std::size_t a = 0; a < 3; ++a) EXPECT_EQ(t.q(0, a), 0.0);
}

TEST(PhcUpdate, GreedyTiesGoLow) {
  PolicyTables t(1, 4);
  EXPECT_EQ(t.greedy(0), 0u);
  t.q(0, 2) = 1.0;
  t.q(0, 3) = 1.0;
  EXPECT_EQ(t.greedy(0), 2u);
}

TEST(PhcProperty, PolicyStaysOnSimplex) {
  RngStream rng(17);
  PolicyTables t(5, 7);
  for (int k = 0; k < 200000; ++k) {
    phc_update(t, rng.below(5), rng.below(7), test::uniform(rng, -50, 50), rng.below(5),
               {test::uniform(rng, 0.01, 1.0), test::uniform(rng, 0.0, 0.99), test::uniform(rng, 0.001, 0.5)});
  }
  EXPECT_TRUE(t.valid(1e-9));
}

TEST(PhcProperty, QBoundedByDiscountedPayoff) {
  RngStream rng(23);
  PolicyTables t(4, 6);
  const double bound = 5.0, phi = 0.9;
  for (int k = 0; k < 100000; ++k)
    phc_update(t, rng.below(4), rng.below(6), test::uniform(rng, -bound, bound), rng.below(4), {0.5, phi, 0.05});
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t a = 0; a < 6; ++a) EXPECT_LE(std::abs(t.q(s, a)), bound / (1 - phi) + 1e-9);
}

TEST(PhcProperty, GeometricApproachToFixedPoint) {
  const double kappa = 0.7, phi = 0.8, payoff = 3.0;
  PolicyTables t(1, 1);
  const double target = payoff / (1 - phi);
  const double rate = (1 - kappa) + kappa * phi;
  for (int n = 1; n <= 60; ++n) {
    phc_update(t, 0, 0, payoff, 0, {kappa, phi, 0.01});
    EXPECT_NEAR(target - t.q(0, 0), target * std::pow(rate, n), 1e-9);
  }
}

TEST(SelectAction, PointMass) {
  PolicyTables t(1, 5);
  for (auto& p : t.policy(0)) p = 0.0;
  t.policy(0)[3] = 1.0;
  RngStream rng(1);
  for (int k = 0; k < 1000; ++k) EXPECT_EQ(select_action(t, 0, rng), 3u);
}

TEST(SelectAction, UniformFrequencies) {
  const std::size_t n = 8, draws = 100000;
  PolicyTables t(1, n);
  RngStream rng(77);
  std::vector<int> hits(n, 0);
  for (std::size_t k = 0; k < draws; ++k) ++hits[select_action(t, 0, rng)];
  const double mean = double(draws) / n, sigma = std::sqrt(draws * (1.0 / n) * (1 - 1.0 / n));
  for (int h : hits) EXPECT_LE(std::abs(h - mean), 3 * sigma);
}

TEST(SelectAction, Deterministic) {
  PolicyTables t(1, 6);
  RngStream a(5), b(5);
  for (int k = 0; k < 500; ++k) EXPECT_EQ(select_action(t, 0, a), select_action(t, 0, b));
}

TEST(Settle, AbstainingIsNeutral) {
  const auto sc = single_type();
  const auto d = settle(sc, sc.types[0], 0.0, 2.0);
  EXPECT_EQ(d.reward, 0.0);
  EXPECT_EQ(d.uav_payoff, 0.0);
  EXPECT_EQ(d.gcs_payoff, 0.0);
}

TEST(Settle, ValueMinusMargin) {
  const auto sc = single_type();
  const auto& t = sc.types[0];
  const double v = 6.0 * std::log(31.0);
  const auto d = settle(sc, t, 30.0, 5.0);
  EXPECT_NEAR(d.reward, v - 5.0, 1e-12);
  EXPECT_NEAR(d.uav_payoff, v - 5.0 - t.marginal_cost() * 30.0 - 1.0, 1e-12);
  EXPECT_NEAR(d.gcs_payoff, 5.0, 1e-12);
  EXPECT_EQ(settle(sc, t, 30.0, 1e3).reward, 0.0);
}

TEST(Train, DegenerateGridReachesFixedPoint) {
  const auto sc = single_type();
  PhcParams p;
  p.reward_levels = p.size_levels = 0;
  RngStream rng(1);
  const auto res = train(sc, p, 10000, cold_tables(sc, p), rng);
  const auto& first = res.log.records.front();
  for (const auto& r : res.log.records) {
    EXPECT_EQ(r.size, first.size);
    EXPECT_EQ(r.uav_utility, first.uav_utility);
  }
  EXPECT_NEAR(res.tables.gcs[0].q(0, 0), first.gcs_term / (1 - p.discount_gcs), 1e-6);
  EXPECT_NEAR(res.tables.uav[0].q(0, 0), first.uav_utility / (1 - p.discount_uav), 1e-6);
}

TEST(Train, LogShape) {
  Scenario sc = test::scenario_a();
  PhcParams p;
  RngStream rng(4);
  const auto res = train(sc, p, 300, cold_tables(sc, p), rng);
  EXPECT_EQ(res.log.slots, 300u);
  EXPECT_EQ(res.log.records.size(), 600u);
  EXPECT_EQ(res.log.type_indices, (std::vector<int>{1, 2}));
  for (const auto& r : res.log.records) {
    EXPECT_LE(r.reward_action, 20u);
    EXPECT_LE(r.size_action, 20u);
  }
  EXPECT_EQ(res.log.at(0, 0).gcs_state, 0u);  // previous size starts at 0
  EXPECT_TRUE(res.tables.gcs[0].valid() && res.tables.uav[1].valid());
}

TEST(Train, SameSeedSameLog) {
  const auto sc = test::scenario_a();
  PhcParams p;
  RngStream a(99), b(99);
  const auto x = train(sc, p, 2000, cold_tables(sc, p), a);
  const auto y = train(sc, p, 2000, cold_tables(sc, p), b);
  EXPECT_TRUE(x.log == y.log);
  EXPECT_TRUE(x.tables == y.tables);
}

TEST(Train, RejectsMismatchedTables) {
  const auto sc = single_type();
  PhcParams p;
  PhcParams q = p;
  q.size_levels = 5;
  RngStream rng(1);
  EXPECT_THROW(train(sc, p, 10, cold_tables(sc, q), rng), ValidationError);
}

TEST(TrainShape, SizeRisesFromEarlyWindow) {
  // A cheap type whose efficient size (255) sits far above the mean of the
  // uniform initial strategy: late sizes exceed early ones on fixed seeds.
  Scenario sc;
  sc.types = {{1, 0.0234375, 0.0, 1.0, 1}};
  sc.total_uavs = 1;
  PhcParams p;
  for (std::uint64_t seed : {1, 2, 3}) {
    RngStream rng(mix_seed(seed, 0));
    const auto log = train(sc, p, 20000, cold_tables(sc, p), rng).log;
    double early = 0, late = 0;
    for (std::size_t t = 0; t < 500; ++t) early += log.at(t, 0).size;
    for (std::size_t t = 19500; t < 20000; ++t) late += log.at(t, 0).size;
    EXPECT_GT(late, early) << "seed " << seed;
  }
}

TEST(Convergence, ConstantWindow) {
  const auto log = synthetic_log(std::vector<std::pair<std::size_t, std::size_t>>(600, {4, 7}));
  const auto c = convergence_check(log, 500);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_TRUE(c[0].converged);
  EXPECT_EQ(c[0].modal_size_action, 7u);
  EXPECT_EQ(c[0].modal_reward_action, 4u);
  EXPECT_DOUBLE_EQ(c[0].modal_size, 70.0);
  EXPECT_DOUBLE_EQ(c[0].modal_reward, 4.0);
  EXPECT_EQ(convergence_slot(log, 500), 500u);
}

TEST(Convergence, AlternatingIsNot) {
  std::vector<std::pair<std::size_t, std::size_t>> acts;
  for (int t = 0; t < 1000; ++t) acts.push_back({1, static_cast<std::size_t>(t % 2)});
  const auto log = synthetic_log(acts);
  EXPECT_FALSE(convergence_check(log, 500)[0].converged);
  EXPECT_FALSE(convergence_slot(log, 500).has_value());
}

TEST(Convergence, SlotMarksStartOfStableStretch) {
  std::vector<std::pair<std::size_t, std::size_t>> acts;
  for (int t = 0; t < 300; ++t) acts.push_back({static_cast<std::size_t>(t % 3), static_cast<std::size_t>(t % 5)});
  for (int t = 0; t < 1000; ++t) acts.push_back({2, 2});
  const auto log = synthetic_log(acts);
  // About 470 stable slots plus the noise slots that happen to match.
  const auto s = convergence_slot(log, 500);
  ASSERT_TRUE(s.has_value());
  EXPECT_GE(*s, 760u);
  EXPECT_LE(*s, 800u);
}

TEST(Convergence, WindowLongerThanLog) {
  const auto log = synthetic_log(std::vector<std::pair<std::size_t, std::size_t>>(100, {0, 0}));
  EXPECT_THROW(convergence_check(log, 500), InsufficientData);
  EXPECT_THROW(convergence_slot(log, 500), InsufficientData);
}

TEST(Hotboot, NoEpisodesIsColdStart) {
  const auto sc = single_type();
  PhcParams p;
  RngStream rng(1);
  EXPECT_TRUE(hotboot(sc, p, rng) == cold_tables(sc, p));
}

TEST(Hotboot, TablesStayValid) {
  const auto sc = test::scenario_a();
  PhcParams p;
  p.hotboot_episodes = 3;
  p.hotboot_slots = 500;
  RngStream rng(2);
  const auto t = hotboot(sc, p, rng);
  for (const auto& g : t.gcs) EXPECT_TRUE(g.valid());
  for (const auto& u : t.uav) EXPECT_TRUE(u.valid());
  EXPECT_FALSE(t == cold_tables(sc, p));
}

TEST(Hotboot, PerturbationKeepsStructure) {
  const auto sc = test::scenario_a();
  RngStream rng(3);
  for (int k = 0; k < 100; ++k) {
    const auto s = perturb_scenario(sc, 0.2, rng);
    EXPECT_NO_THROW(s.validate());
    for (std::size_t j = 0; j < sc.types.size(); ++j) {
      EXPECT_EQ(s.types[j].delay, sc.types[j].delay);
      EXPECT_GE(s.types[j].count, 1);
      const double ratio = s.types[j].marginal_cost() / sc.types[j].marginal_cost();
      EXPECT_GE(ratio, 0.8 - 1e-12);
      EXPECT_LE(ratio, 1.2 + 1e-12);
    }
  }
}

TEST(Params, Validation) {
  auto bad = [](auto mutate) {
    PhcParams p;
    mutate(p);
    EXPECT_THROW(p.validate(), ValidationError);
  };
  bad([](PhcParams& p) { p.learning_rate_gcs = 0.0; });
  bad([](PhcParams& p) { p.learning_rate_uav = 1.5; });
  bad([](PhcParams& p) { p.discount_gcs = 1.0; });
  bad([](PhcParams& p) { p.step_uav = 1.0; });
  bad([](PhcParams& p) { p.reward_levels = -1; });
  bad([](PhcParams& p) { p.min_share = 0.0; });
  EXPECT_NO_THROW(PhcParams{}.validate());
}
