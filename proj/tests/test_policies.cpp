#include <gtest/gtest.h>

#include <random>
#include <set>

#include "property_checks.hpp"
#include "swarmcap/policies.hpp"

using namespace swarmcap;

namespace {

const GridSpec kGrid(60, 100.0);

UavState north_at(Cell c) {
  UavState s;
  s.id = 0;
  s.current_cell = c;
  s.position = kGrid.center(c);
  s.heading = 0.0;
  return s;
}

HelloMessage claim(int id, Vec2 pos, Cell next, double t) {
  HelloMessage m;
  m.sender_id = id;
  m.position = pos;
  m.next_waypoint_cell = next;
  m.timestamp = t;
  return m;
}

// Independent look-ahead: (4 p + sum of 8 neighbours) / 12, border/outside read 4.
double oracle_look_ahead(const PheromoneField& f, Cell c) {
  double s = 4 * f.at(c);
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx)
      if (dx || dy) {
        const Cell n{c.x + dx, c.y + dy};
        s += kGrid.contains(n) ? f.at(n) : 4.0;
      }
  return s / 12;
}

}  // namespace

TEST(Cap, SymmetricCaseGoesAhead) {
  PheromoneField f(kGrid, 0.006, 0.006, 4.0);
  NeighborTable t;
  for (int i = 1; i <= 5; ++i) t.upsert(claim(i, kGrid.center({30, 31}), {30, 31}, 10.0));
  const auto u = north_at({30, 30});
  const DecisionInputs in{u, f, t, 1, 1000, 10, 4};
  const auto pick = cap_select(in, 4.0);
  EXPECT_EQ(pick.cell, (Cell{30, 31}));
  EXPECT_EQ(pick.turn, 0);
}

TEST(Cap, HandEvaluatedScores) {
  const std::array<double, 5> p{0.2, 0.0, 0.9, 0.9, 0.9};
  const std::array<double, 5> k{5, 1, 0, 0, 0};
  const auto e = checks::synthetic_candidates(p, k, 4.0);
  EXPECT_NEAR(e[0].score, 0.8, 1e-12);
  EXPECT_NEAR(e[1].score, 0.25, 1e-12);
  EXPECT_EQ(best_candidate(e).cell, e[0].cell);
}

TEST(Cap, SaturatedReducesToArgminLookAhead) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> val(0.0, 1.2);
  for (int trial = 0; trial < 200; ++trial) {
    PheromoneField f(kGrid, 0.006, 0.006, 4.0);
    for (int y = 27; y <= 33; ++y)
      for (int x = 27; x <= 33; ++x) f.set({x, y}, val(rng));
    NeighborTable t;
    t.upsert(claim(1, kGrid.center({30, 30}), {30, 30}, 10.0));  // K = 1 at every candidate
    const auto u = north_at({30, 30});
    auto scratch = f;
    const DecisionInputs in{u, scratch, t, 1, 1000, 10, 4};
    const auto pick = cap_select(in, 0.5);
    // deposits are pending, so the candidates read the pre-decision field
    double best = 1e9;
    for (const auto& c : candidate_waypoints(u, kGrid, 1)) best = std::min(best, oracle_look_ahead(f, c.cell));
    EXPECT_NEAR(oracle_look_ahead(f, pick.cell), best, 1e-12);
  }
}

TEST(Cap, UnderConnectedMovesTowardNeighbour) {
  PheromoneField f(kGrid, 0.006, 0.006, 4.0);
  NeighborTable t;
  t.upsert(claim(1, kGrid.center({38, 30}), {38, 30}, 10.0));
  const auto u = north_at({30, 30});
  const DecisionInputs in{u, f, t, 1, 1000, 10, 4};
  EXPECT_EQ(cap_select(in, 4.0).cell, (Cell{31, 30}));
}

TEST(Cap, ArrivalDepositIsPending) {
  PheromoneField f(kGrid, 0.006, 0.006, 4.0);
  NeighborTable t;
  const auto u = north_at({30, 30});
  const DecisionInputs in{u, f, t, 1, 1000, 10, 4};
  (void)cap_select(in, 2.0);
  EXPECT_EQ(f.at({30, 30}), 0.0);
  EXPECT_EQ(f.pending_at({30, 30}), kArrivalDeposit);
}

TEST(Pheromone, PicksUntouched) {
  PheromoneField f(kGrid, 0.006, 0.006, 4.0);
  for (int y = 25; y <= 35; ++y)
    for (int x = 25; x <= 35; ++x) f.set({x, y}, 1.0);
  f.set({31, 30}, 0.0);
  NeighborTable t;
  const auto u = north_at({30, 30});
  const DecisionInputs in{u, f, t, 1, 1000, 10, 4};
  EXPECT_EQ(pheromone_select(in).cell, (Cell{31, 30}));
}

TEST(Pheromone, AllEqualGoesAhead) {
  PheromoneField f(kGrid, 0.006, 0.006, 4.0);
  NeighborTable t;
  const auto u = north_at({30, 30});
  const DecisionInputs in{u, f, t, 1, 1000, 10, 4};
  EXPECT_EQ(pheromone_select(in).cell, (Cell{30, 31}));
}

TEST(Pheromone, IsolatedUavAtWallStaysOnLastRow) {
  PheromoneField f(kGrid, 0.006, 0.006, 4.0);
  NeighborTable t;
  const auto u = north_at({30, 58});
  const DecisionInputs in{u, f, t, 1, 1000, 10, 4};
  const auto pick = pheromone_select(in);
  // forward candidates collapse onto the current cell and tie with the
  // sideways ones, so the smallest turn wins
  EXPECT_EQ(pick.cell, (Cell{30, 58}));
}

TEST(Pheromone, AgreesWithSaturatedCapOnRandomInputs) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> pos(1, 58), nb(0, 4), stride(1, 4);
  std::uniform_real_distribution<double> val(0.0, 1.5), hd(-3.2, 3.2), off(-900, 900);
  for (int trial = 0; trial < 2000; ++trial) {
    PheromoneField f(kGrid, 0.006, 0.006, 4.0);
    const Cell c{pos(rng), pos(rng)};
    for (int dy = -5; dy <= 5; ++dy)
      for (int dx = -5; dx <= 5; ++dx)
        if (kGrid.is_interior({c.x + dx, c.y + dy}) && trial % 3 != 0)
          f.set({c.x + dx, c.y + dy}, trial % 5 == 0 ? std::round(val(rng)) : val(rng));
    NeighborTable t;
    const int n = nb(rng);
    for (int i = 0; i < n; ++i) {
      const Vec2 p = kGrid.center(c) + Vec2{off(rng), off(rng)};
      t.upsert(claim(i + 1, p, kGrid.cell_of(p), 10.0));
    }
    UavState u = north_at(c);
    u.heading = hd(rng);
    const int s = stride(rng);
    auto fa = f, fb = f;
    const DecisionInputs a{u, fa, t, s, 1000, 10, 4};
    const DecisionInputs b{u, fb, t, s, 1000, 10, 4};
    ASSERT_EQ(cap_select(a, 0.0).cell, pheromone_select(b).cell);
    ASSERT_TRUE(fa == fb);
  }
}

TEST(Rossler, Deterministic) {
  ChaoticState a({1.0, -2.0, 0.5}), b({1.0, -2.0, 0.5});
  for (int i = 0; i < 500; ++i) ASSERT_EQ(a.next(), b.next());
}

TEST(Rossler, RangeAndDeciles) {
  ChaoticState s({0.3, 4.1, -2.2});
  std::set<int> deciles;
  for (int i = 0; i < 10000; ++i) {
    const double r = s.next();
    ASSERT_GE(r, 0.0);
    ASSERT_LE(r, 1.0);
    deciles.insert(std::min(9, static_cast<int>(r * 10)));
  }
  EXPECT_EQ(deciles.size(), 10u);
}

TEST(CacocDirection, Thresholds) {
  EXPECT_EQ(cacoc_direction(1, 1, 1, 0.2), Turn::Right);
  EXPECT_EQ(cacoc_direction(1, 1, 1, 0.5), Turn::Left);
  EXPECT_EQ(cacoc_direction(1, 1, 1, 0.9), Turn::Ahead);
  EXPECT_EQ(cacoc_direction(0, 0, 0, 0.1), Turn::Right);
  EXPECT_EQ(cacoc_direction(0, 0, 0, 0.5), Turn::Left);
  EXPECT_EQ(cacoc_direction(0, 0, 0, 0.9), Turn::Ahead);
  EXPECT_THROW(cacoc_direction(-1, 0, 0, 0.5), std::invalid_argument);
}

TEST(CacocDirection, UnvisitedRightIsLikely) {
  // p_R = 1/2 when the right cell is clean: half of the unit interval maps to R
  int right = 0;
  for (int i = 0; i < 1000; ++i)
    if (cacoc_direction(10, 10, 0, (i + 0.5) / 1000) == Turn::Right) ++right;
  EXPECT_EQ(right, 500);
  EXPECT_EQ(cacoc_direction(10, 10, 0, 0.1), Turn::Right);
}

TEST(Flock, Examples) {
  NeighborTable none;
  EXPECT_EQ(flock_force(none, kGrid, 10, 4), (Vec2{0, 0}));

  NeighborTable north;
  north.upsert(claim(1, kGrid.center({10, 10}), {10, 11}, 10));
  north.upsert(claim(2, kGrid.center({20, 10}), {20, 12}, 10));
  const Vec2 n = flock_force(north, kGrid, 10, 4);
  EXPECT_NEAR(n.x, 0.0, 1e-12);
  EXPECT_NEAR(n.y, 1.0, 1e-12);

  NeighborTable mixed;
  mixed.upsert(claim(1, kGrid.center({10, 10}), {10, 11}, 10));
  mixed.upsert(claim(2, kGrid.center({20, 10}), {21, 10}, 10));
  const Vec2 m = flock_force(mixed, kGrid, 10, 4);
  EXPECT_NEAR(m.x, 0.5, 1e-12);
  EXPECT_NEAR(m.y, 0.5, 1e-12);
  EXPECT_NEAR(m.norm(), std::sqrt(2.0) / 2, 1e-12);

  EXPECT_EQ(flock_force(mixed, kGrid, 20, 4), (Vec2{0, 0}));  // stale
}

TEST(CacocVelocity, Examples) {
  const Vec2 north{0, 1}, east{1, 0};
  const Vec2 a = cacoc2_velocity(north, east, 0.0, 20);
  EXPECT_NEAR(a.x, 0, 1e-12);
  EXPECT_NEAR(a.y, 20, 1e-12);
  const Vec2 b = cacoc2_velocity(north, north, 0.7, 20);
  EXPECT_NEAR(b.x, 0, 1e-12);
  EXPECT_NEAR(b.norm(), 20, 1e-12);
  const Vec2 c = cacoc2_velocity(north, east, 1.0, 20);
  EXPECT_NEAR(rad_to_deg(bearing_of(c)), 45.0, 1e-12);
  EXPECT_NEAR(c.norm(), 20, 1e-12);
  const Vec2 d = cacoc2_velocity(north, Vec2{0, -1}, 1.0, 20);
  EXPECT_NEAR(d.y, 20, 1e-12);
}

TEST(Cacoc2, ZeroFlockingFollowsChaoticChoice) {
  for (int trial = 0; trial < 300; ++trial) {
    PheromoneField f(kGrid, 0.006, 0.006, 4.0);
    NeighborTable t;
    t.upsert(claim(1, kGrid.center({32, 30}), {33, 30}, 10));
    const auto u = north_at({30, 30});
    ChaoticState chaos({0.1 * trial, 1.0, 0.0});
    ChaoticState copy = chaos;
    const Turn expected = cacoc_direction(0, 0, 0, copy.next());
    const DecisionInputs in{u, f, t, 1, 1000, 10, 4};
    const auto d = cacoc2_select(in, chaos, 0.0);
    const Cell want = expected == Turn::Left ? Cell{29, 31} : expected == Turn::Right ? Cell{31, 31} : Cell{30, 31};
    ASSERT_EQ(d.turn, expected);
    ASSERT_EQ(d.chosen.cell, want);
  }
}

TEST(Cacoc2, NoNeighboursSameAsZeroFlocking) {
  for (int trial = 0; trial < 200; ++trial) {
    PheromoneField f(kGrid, 0.006, 0.006, 4.0);
    NeighborTable t;
    const auto u = north_at({30, 30});
    ChaoticState a({0.05 * trial, 2.0, 0.0}), b = a;
    auto fa = f, fb = f;
    const DecisionInputs ia{u, fa, t, 1, 1000, 10, 4};
    const DecisionInputs ib{u, fb, t, 1, 1000, 10, 4};
    ASSERT_EQ(cacoc2_select(ia, a, 0.0).chosen.cell, cacoc2_select(ib, b, 5.0).chosen.cell);
  }
}

TEST(Cacoc2, StrongFlockingFollowsTheFlock) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> ang(-85.0, 85.0);
  for (int trial = 0; trial < 300; ++trial) {
    PheromoneField f(kGrid, 0.006, 0.006, 4.0);
    NeighborTable t;
    // neighbours bunched behind the UAV, all travelling toward one bearing
    const double flock_deg = ang(rng);
    const Vec2 dir = heading_vector(deg_to_rad(flock_deg));
    for (int i = 0; i < 3; ++i) {
      const Vec2 p = kGrid.center({29 + i, 26});
      const Vec2 target = p + dir * 1000.0;
      // announced cell whose center lies on the travel ray
      t.upsert(claim(i + 1, p, kGrid.cell_of(target), 10));
    }
    const Vec2 flock = flock_force(t, kGrid, 10, 4);
    const auto u = north_at({30, 30});
    ChaoticState chaos({0.02 * trial, -1.0, 0.0});
    const DecisionInputs in{u, f, t, 1, 1000, 10, 4};
    const auto d = cacoc2_select(in, chaos, 1000.0);
    const double err = std::abs(wrap_angle(d.chosen.direction.angle() - bearing_of(flock)));
    ASSERT_LE(rad_to_deg(err), 45.0);
  }
}

TEST(PolicyKinds, ParseAndPrint) {
  for (auto k : {PolicyKind::Cap, PolicyKind::Pheromone, PolicyKind::Cacoc2})
    EXPECT_EQ(parse_policy_kind(to_string(k)), k);
  EXPECT_THROW(parse_policy_kind("dqn"), std::invalid_argument);
}

TEST(PolicyProperties, AlphaUnitInterval) { EXPECT_EQ(checks::alpha_in_unit_interval(), ""); }
TEST(PolicyProperties, ArgmaxSaturationInvariance) {
  EXPECT_EQ(checks::argmax_saturation_invariance(), "");
}
TEST(PolicyProperties, RankMonotonicity) { EXPECT_EQ(checks::rank_monotonicity(), ""); }
TEST(PolicyProperties, CapLimitEqualsPheromoneFullRun) {
  EXPECT_EQ(checks::cap_limit_matches_pheromone(), "");
}
