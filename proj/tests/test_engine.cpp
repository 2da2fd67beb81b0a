#include <gtest/gtest.h>

#include "property_checks.hpp"
#include "swarmcap/engine.hpp"

using namespace swarmcap;

namespace {

ScenarioConfig small(PolicyKind kind, double sim_time = 2000) {
  ScenarioConfig c;
  c.map_size_m = 2000;
  c.n_uavs = 5;
  c.sim_time_s = sim_time;
  c.policy.kind = kind;
  c.policy.beta = 2;
  c.policy.f = 0.5;
  return c;
}

}  // namespace

TEST(Config, Defaults) {
  const ScenarioConfig c;
  EXPECT_EQ(c.grid().cells_per_side(), 60);
  EXPECT_EQ(c.effective_decision_interval(), 5.0);
  EXPECT_EQ(c.step_cells(), 1);
  ScenarioConfig fast = c;
  fast.speed_mps = 40;
  EXPECT_EQ(fast.effective_decision_interval(), 10.0);
  EXPECT_EQ(fast.step_cells(), 4);
  EXPECT_EQ(c.max_claim_age(), 4.0);
}

TEST(Config, ValidationNamesField) {
  ScenarioConfig c;
  c.evaporation_rate = 2;
  try {
    c.validate();
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("evaporation_rate"), std::string::npos);
  }
  c = {};
  c.hello_period_s = 0.25;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.map_size_m = 6050;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Fairness, HandValues) { EXPECT_EQ(checks::fairness_hand_values(), ""); }
TEST(Fairness, JainBounds) { EXPECT_EQ(checks::jain_bounds(), ""); }
TEST(Fairness, NothingScanned) { EXPECT_EQ(fairness(ScanLedger(4)), 0.0); }

TEST(CoverageTime, Examples) {
  std::vector<double> first(100, std::numeric_limits<double>::infinity());
  EXPECT_EQ(coverage_time(first, 0.9, 8000), (CoverageTime{8000, true}));
  for (int i = 0; i < 89; ++i) first[static_cast<std::size_t>(i)] = 10.0 * i;
  EXPECT_TRUE(coverage_time(first, 0.9, 8000).censored);
  first[95] = 1750;
  EXPECT_EQ(coverage_time(first, 0.9, 8000), (CoverageTime{1750, false}));
  first[96] = 1700;
  EXPECT_EQ(coverage_time(first, 0.9, 8000).tc_s, 1700);
}

TEST(CoverageTime, TinyMapCoveredWithinSeconds) {
  ScenarioConfig c;
  c.map_size_m = 300;  // 3x3 cells, a single interior cell
  c.n_uavs = 1;
  c.sim_time_s = 10;
  const auto r = run(c);
  EXPECT_FALSE(r.tc_censored);
  EXPECT_LT(r.tc_s, 10.0);  // launch row is the border on this map
}

TEST(MeanSem, Examples) {
  const std::vector<double> one{4.0};
  EXPECT_EQ(mean_sem(one), (MeanSem{4.0, 0.0}));
  const std::vector<double> same{2.5, 2.5, 2.5};
  EXPECT_EQ(mean_sem(same).sem, 0.0);
  const std::vector<double> v{1, 2, 3};
  EXPECT_DOUBLE_EQ(mean_sem(v).mean, 2.0);
  EXPECT_DOUBLE_EQ(mean_sem(v).sem, 1.0 / std::sqrt(3.0));
}

TEST(Batch, SingleSeedMatchesRun) {
  auto c = small(PolicyKind::Cap, 500);
  c.seed = 9;
  const std::vector<std::uint64_t> seeds{9};
  const auto b = run_batch(c, seeds, 1);
  const auto r = run(c);
  EXPECT_EQ(b.runs.front(), r);
  EXPECT_EQ(b.tc_s.mean, r.tc_s);
  EXPECT_EQ(b.tc_s.sem, 0.0);
  EXPECT_EQ(b.ncc_mean.mean, r.ncc_mean);
}

TEST(Batch, ThreadedEqualsSerial) {
  const auto c = small(PolicyKind::Cacoc2, 500);
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4};
  const auto a = run_batch(c, seeds, 1);
  const auto b = run_batch(c, seeds, 3);
  EXPECT_EQ(a.runs, b.runs);
  EXPECT_EQ(a.tc_s, b.tc_s);
}

TEST(Run, SingleUavStaysOneComponent) {
  auto c = small(PolicyKind::Pheromone, 6000);
  c.n_uavs = 1;
  const auto r = run(c);
  for (const auto& s : r.samples) {
    EXPECT_EQ(s.ncc, 1u);
    EXPECT_EQ(s.anc, 0.0);
  }
  EXPECT_GE(r.samples.back().covered_fraction, 0.5);
}

TEST(Run, HoldPositionStubKeepsPairLinked) {
  auto c = small(PolicyKind::Cap, 600);
  c.n_uavs = 2;
  Simulation sim(c, [](const DecisionInputs& in) { return in.uav.current_cell; });
  sim.run_to_end();
  const auto r = sim.result();
  ASSERT_FALSE(r.samples.empty());
  for (const auto& s : r.samples) {
    EXPECT_EQ(s.ncc, 1u);
    EXPECT_EQ(s.anc, 1.0);
  }
}

TEST(Run, Invariants) {
  for (auto kind : {PolicyKind::Cap, PolicyKind::Pheromone, PolicyKind::Cacoc2}) {
    auto c = small(kind, 1500);
    c.n_uavs = 8;
    Simulation sim(c);
    double prev_cov = 0;
    while (!sim.finished()) {
      sim.step();
      ASSERT_EQ(sim.uavs().size(), 8u);
      for (const auto& u : sim.uavs()) {
        ASSERT_GE(u.position.x, 0.0);
        ASSERT_LE(u.position.x, sim.grid().width_m());
        ASSERT_GE(u.position.y, 0.0);
        ASSERT_LE(u.position.y, sim.grid().height_m());
      }
      ASSERT_GE(sim.ledger().covered_fraction(), prev_cov);
      prev_cov = sim.ledger().covered_fraction();
    }
    for (const auto& s : sim.samples()) {
      ASSERT_GE(s.ncc, 1u);
      ASSERT_LE(s.ncc, 8u);
      ASSERT_GE(s.anc, 0.0);
      ASSERT_LE(s.anc, 7.0);
    }
    ASSERT_EQ(sim.samples().size(), 150u);
  }
}

TEST(Run, SampledNccAgreesWithOracle) {
  auto c = small(PolicyKind::Cacoc2, 400);
  c.n_uavs = 7;
  c.tx_range_m = 300;
  Simulation sim(c);
  while (!sim.finished()) {
    sim.step();
    if (sim.tick_index() % 100 != 0) continue;
    const auto& s = sim.samples().back();
    const auto n = sim.uavs().size();
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        adj[i][j] = i != j && distance(sim.uavs()[i].position, sim.uavs()[j].position) <= 300;
    ASSERT_EQ(s.ncc, checks::brute_force_components(n, adj));
  }
}

TEST(Run, HelloObserverCountsReceivers) {
  auto c = small(PolicyKind::Cap, 20);
  c.n_uavs = 3;
  Simulation sim(c);
  std::size_t events = 0;
  sim.on_hello = [&](double t, int, std::size_t receivers) {
    EXPECT_EQ(std::fmod(t, 2.0), 0.0);
    EXPECT_EQ(receivers, 2u);
    ++events;
  };
  sim.run_to_end();
  EXPECT_EQ(events, 30u);
}

TEST(Run, DifferentSeedsDiffer) {
  auto c = small(PolicyKind::Pheromone, 1000);
  const auto a = run(c);
  c.seed = 2;
  const auto b = run(c);
  EXPECT_FALSE(a == b);
}

TEST(EngineProperties, Deterministic) { EXPECT_EQ(checks::run_is_deterministic(), ""); }
