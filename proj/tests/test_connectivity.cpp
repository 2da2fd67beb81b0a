#include <gtest/gtest.h>

#include "property_checks.hpp"
#include "swarmcap/connectivity.hpp"

using namespace swarmcap;

TEST(Gamma, Branches) {
  EXPECT_EQ(gamma(500, 1000), 1.0);
  EXPECT_NEAR(gamma(800, 1000), 0.5, 1e-12);
  EXPECT_EQ(gamma(1001, 1000), 0.0);
  EXPECT_EQ(gamma(1000, 1000), 0.0);
  EXPECT_THROW(gamma(1, 0), std::invalid_argument);
}

TEST(WeightedDegree, Examples) {
  EXPECT_EQ(weighted_degree({0, 0}, {}, 1000), 0.0);
  const std::vector<Vec2> close{{100, 0}, {0, 200}, {-300, 0}, {0, -599}};
  EXPECT_EQ(weighted_degree({0, 0}, close, 1000), 4.0);
  const std::vector<Vec2> mixed{{500, 0}, {0, 800}};
  EXPECT_NEAR(weighted_degree({0, 0}, mixed, 1000), 1.5, 1e-12);
}

TEST(EstimateK, Examples) {
  const GridSpec g(60, 100.0);
  EXPECT_EQ(estimate_k_at({30, 30}, {}, g, 1000, 10, 4), 0.0);
  const std::vector<NeighborClaim> near{{1, {33, 30}, 9.0}};
  EXPECT_EQ(estimate_k_at({30, 30}, near, g, 1000, 10, 4), 1.0);
  const std::vector<NeighborClaim> far{{1, {39, 30}, 9.0}};
  EXPECT_NEAR(estimate_k_at({30, 30}, far, g, 1000, 10, 4), 0.25, 1e-12);
  const std::vector<NeighborClaim> stale{{1, {33, 30}, 5.0}};
  EXPECT_EQ(estimate_k_at({30, 30}, stale, g, 1000, 10, 4), 0.0);
}

TEST(Graph, Thresholds) {
  const std::vector<NodePosition> a{{0, {0, 0}}, {1, {999, 0}}};
  EXPECT_EQ(build_graph(a, 1000).edges.size(), 1u);
  const std::vector<NodePosition> b{{0, {0, 0}}, {1, {1001, 0}}};
  EXPECT_EQ(build_graph(b, 1000).edges.size(), 0u);
  const std::vector<NodePosition> c{{0, {0, 0}}, {1, {1000, 0}}};
  EXPECT_EQ(build_graph(c, 1000).edges.size(), 1u);
  std::vector<NodePosition> same;
  for (int i = 0; i < 6; ++i) same.push_back({i, {5, 5}});
  EXPECT_EQ(build_graph(same, 1000).edges.size(), 15u);
}

TEST(Graph, NccAndAnc) {
  std::vector<NodePosition> clique;
  for (int i = 0; i < 5; ++i) clique.push_back({i, {10.0 * i, 0}});
  const auto g = build_graph(clique, 1000);
  EXPECT_EQ(ncc(g), 1u);
  EXPECT_DOUBLE_EQ(anc(g), 4.0);

  std::vector<NodePosition> isolated;
  for (int i = 0; i < 4; ++i) isolated.push_back({i, {5000.0 * i, 0}});
  EXPECT_EQ(ncc(build_graph(isolated, 1000)), 4u);
  EXPECT_EQ(anc(build_graph(isolated, 1000)), 0.0);

  std::vector<NodePosition> two;
  for (int i = 0; i < 3; ++i) two.push_back({i, {10.0 * i, 0}});
  for (int i = 0; i < 3; ++i) two.push_back({3 + i, {9000 + 10.0 * i, 0}});
  EXPECT_EQ(ncc(build_graph(two, 1000)), 2u);

  const std::vector<NodePosition> path{{0, {0, 0}}, {1, {900, 0}}, {2, {1800, 0}}};
  EXPECT_DOUBLE_EQ(anc(build_graph(path, 1000)), 4.0 / 3.0);

  EXPECT_THROW(anc(build_graph(std::vector<NodePosition>{}, 1000)), std::invalid_argument);
}

TEST(Graph, MetricBounds) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> p(0, 4000);
  for (int t = 0; t < 300; ++t) {
    std::vector<NodePosition> pos;
    const int n = 1 + t % 25;
    for (int i = 0; i < n; ++i) pos.push_back({i, {p(rng), p(rng)}});
    const auto g = build_graph(pos, 1000);
    EXPECT_GE(ncc(g), 1u);
    EXPECT_LE(ncc(g), static_cast<std::size_t>(n));
    EXPECT_GE(anc(g), 0.0);
    EXPECT_LE(anc(g), n - 1.0);
  }
}

TEST(ConnectivityProperties, GammaContinuity) { EXPECT_EQ(checks::gamma_continuity(), ""); }
TEST(ConnectivityProperties, GammaScaleInvariance) {
  EXPECT_EQ(checks::gamma_scale_invariance(), "");
}
TEST(ConnectivityProperties, NccMatchesOracle) { EXPECT_EQ(checks::ncc_matches_oracle(), ""); }
