#pragma once

#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "swarmcap/geometry.hpp"

namespace swarmcap {

/// Distance-weighted link value: 1 up to 60% of the range, then linear
/// down to 0 at the range limit, 0 beyond.
inline double gamma(double d, double tx) {
  if (!(tx > 0.0)) throw std::invalid_argument("transmission range must be > 0");
  if (d <= 0.6 * tx) return 1.0;
  if (d <= tx) return 2.5 * (1.0 - d / tx);
  return 0.0;
}

inline double weighted_degree(Vec2 self, std::span<const Vec2> neighbours, double tx) {
  double k = 0.0;
  for (const Vec2& p : neighbours) k += gamma(distance(self, p), tx);
  return k;
}

/// Next-waypoint announcement as last heard from a neighbour.
struct NeighborClaim {
  int id{0};
  Cell next_waypoint_cell{};
  double timestamp{0.0};
};

/// Predicted weighted degree at a candidate cell, with every neighbour
/// placed at the center of its announced next waypoint. Claims older than
/// max_age at time `now` are ignored.
inline double estimate_k_at(Cell candidate, std::span<const NeighborClaim> claims,
                            const GridSpec& grid, double tx, double now, double max_age) {
  const Vec2 self = grid.center(candidate);
  double k = 0.0;
  for (const auto& claim : claims) {
    if (now - claim.timestamp > max_age) continue;
    k += gamma(distance(self, grid.center(claim.next_waypoint_cell)), tx);
  }
  return k;
}

struct NodePosition {
  int id{0};
  Vec2 position{};
};

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n), rank_(n, 0), components_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    --components_;
    return true;
  }

  std::size_t components() const { return components_; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned> rank_;
  std::size_t components_;
};

/// Undirected disk graph snapshot; edges hold node indices (u < v).
struct LinkGraph {
  std::vector<int> ids;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  double timestamp{0.0};

  std::size_t node_count() const { return ids.size(); }
};

inline LinkGraph build_graph(std::span<const NodePosition> nodes, double tx, double t = 0.0) {
  if (!(tx > 0.0)) throw std::invalid_argument("transmission range must be > 0");
  LinkGraph g;
  g.timestamp = t;
  g.ids.reserve(nodes.size());
  for (const auto& n : nodes) g.ids.push_back(n.id);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
      if (distance(nodes[i].position, nodes[j].position) <= tx) g.edges.emplace_back(i, j);
  return g;
}

inline std::size_t ncc(const LinkGraph& g) {
  DisjointSet ds(g.node_count());
  for (const auto& [u, v] : g.edges) ds.unite(u, v);
  return ds.components();
}

inline double anc(const LinkGraph& g) {
  if (g.node_count() == 0) throw std::invalid_argument("anc of an empty graph");
  return 2.0 * static_cast<double>(g.edges.size()) / static_cast<double>(g.node_count());
}

}  // namespace swarmcap
