#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "swarmcap/geometry.hpp"

namespace swarmcap {

/// One of the eight compass directions: 0 = north, counted clockwise.
class Direction {
 public:
  constexpr Direction() = default;
  constexpr explicit Direction(int index) : index_(((index % 8) + 8) % 8) {}

  constexpr int index() const { return index_; }
  constexpr Cell offset() const {
    constexpr std::array<Cell, 8> offsets{{{0, 1}, {1, 1}, {1, 0}, {1, -1},
                                           {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}}};
    return offsets[static_cast<std::size_t>(index_)];
  }
  double angle() const { return index_ * (std::numbers::pi / 4.0); }
  Vec2 unit_vector() const { return heading_vector(angle()); }
  constexpr Direction rotated(int steps) const { return Direction(index_ + steps); }

  constexpr auto operator<=>(const Direction&) const = default;

 private:
  int index_{0};
};

/// Nearest of the eight sector centers; a heading exactly on a sector
/// boundary goes to the clockwise neighbour.
inline Direction discretize_heading(double heading) {
  const double sectors = heading / (std::numbers::pi / 4.0);
  const auto idx = static_cast<long>(std::floor(sectors + 0.5));
  return Direction(static_cast<int>(((idx % 8) + 8) % 8));
}

struct UavState {
  int id{0};
  Vec2 position{};
  double heading{0.0};  // radians, compass convention
  double speed{20.0};   // m/s
  Cell current_cell{};
  Cell next_waypoint_cell{};
  Vec2 target_point{};
  double max_turn_rate{deg_to_rad(60.0)};  // rad/s
};

struct WaypointCandidate {
  Direction direction{};
  int turn{0};  // -2..2 relative to the current direction, positive = clockwise
  Cell cell{};
};

using CandidateSet = std::array<WaypointCandidate, 5>;

/// Waypoint stride in cells for a speed and decision interval.
inline int step_cells_for(double speed, double decision_interval, double cell_size) {
  return std::max(1, static_cast<int>(std::lround(speed * decision_interval / cell_size)));
}

/// The five forward cells reachable from the current cell (directions d-2..d+2).
/// A candidate beyond the interior is pulled back along its own ray to the
/// farthest interior cell.
inline CandidateSet candidate_waypoints(const UavState& state, const GridSpec& grid,
                                        int step_cells) {
  if (step_cells < 1) throw std::invalid_argument("step_cells must be >= 1");
  const Direction d = discretize_heading(state.heading);
  CandidateSet out{};
  const int lo = 1;
  const int hi = grid.cells_per_side() - 2;
  for (int i = 0; i < 5; ++i) {
    const int turn = i - 2;
    const Direction dir = d.rotated(turn);
    Cell chosen{std::clamp(state.current_cell.x, lo, hi), std::clamp(state.current_cell.y, lo, hi)};
    for (int k = step_cells; k >= 1; --k) {
      const Cell c = state.current_cell + dir.offset() * k;
      if (grid.is_interior(c)) {
        chosen = c;
        break;
      }
    }
    out[static_cast<std::size_t>(i)] = {dir, turn, chosen};
  }
  return out;
}

inline void set_waypoint(UavState& state, const GridSpec& grid, Cell cell) {
  state.next_waypoint_cell = cell;
  state.target_point = grid.center(cell);
}

/// One kinematic tick. Turns toward the target (or hard right while
/// avoiding) by at most max_turn_rate*dt, then moves speed*dt forward.
inline UavState advance(const UavState& state, const GridSpec& grid, double dt,
                        bool avoiding = false) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  UavState next = state;
  const double max_delta = state.max_turn_rate * dt;
  double delta = 0.0;
  if (avoiding) {
    delta = max_delta;
  } else if (distance(state.position, state.target_point) > 0.0) {
    delta = std::clamp(wrap_angle(bearing(state.position, state.target_point) - state.heading),
                       -max_delta, max_delta);
  }
  next.heading = wrap_angle(state.heading + delta);
  next.position = state.position + heading_vector(next.heading) * (state.speed * dt);
  next.position.x = std::clamp(next.position.x, 0.0, grid.width_m());
  next.position.y = std::clamp(next.position.y, 0.0, grid.height_m());
  next.current_cell = grid.cell_of(next.position);
  return next;
}

inline bool waypoint_reached(const UavState& state, const GridSpec& grid) {
  return distance(state.position, state.target_point) <= grid.cell_size_m() / 2.0;
}

namespace detail {

// Cell index along one axis for a point that may sit on a grid line; the
// side is the one the segment actually occupies.
inline int axis_cell(double v, double s, double motion, bool at_start, int n) {
  const double q = v / s;
  int i = static_cast<int>(std::floor(q));
  const bool on_line = q == std::floor(q);
  if (on_line && motion != 0.0) {
    const bool toward_lower = at_start ? motion < 0.0 : motion > 0.0;
    if (toward_lower) i -= 1;
  }
  return std::clamp(i, 0, n - 1);
}

}  // namespace detail

/// Cells crossed by the segment p0 -> p1 in travel order (grid traversal).
/// When a segment passes exactly through a lattice corner the x crossing is
/// taken first, so consecutive cells always share an edge.
inline std::vector<Cell> cells_traversed(Vec2 p0, Vec2 p1, const GridSpec& grid) {
  const double s = grid.cell_size_m();
  const int n = grid.cells_per_side();
  const Vec2 d = p1 - p0;
  Cell c{detail::axis_cell(p0.x, s, d.x, true, n), detail::axis_cell(p0.y, s, d.y, true, n)};
  const Cell end{detail::axis_cell(p1.x, s, d.x, false, n),
                 detail::axis_cell(p1.y, s, d.y, false, n)};
  std::vector<Cell> out{c};
  if (c == end) return out;

  constexpr double inf = std::numeric_limits<double>::infinity();
  const int step_x = d.x > 0 ? 1 : (d.x < 0 ? -1 : 0);
  const int step_y = d.y > 0 ? 1 : (d.y < 0 ? -1 : 0);
  double t_max_x = step_x == 0 ? inf : (((step_x > 0 ? c.x + 1 : c.x) * s) - p0.x) / d.x;
  double t_max_y = step_y == 0 ? inf : (((step_y > 0 ? c.y + 1 : c.y) * s) - p0.y) / d.y;
  const double t_delta_x = step_x == 0 ? inf : s / std::abs(d.x);
  const double t_delta_y = step_y == 0 ? inf : s / std::abs(d.y);

  while (c != end) {
    const bool x_left = c.x != end.x;
    const bool y_left = c.y != end.y;
    if (x_left && (!y_left || t_max_x <= t_max_y)) {
      c.x += step_x != 0 ? step_x : (end.x > c.x ? 1 : -1);
      t_max_x += t_delta_x;
    } else {
      c.y += step_y != 0 ? step_y : (end.y > c.y ? 1 : -1);
      t_max_y += t_delta_y;
    }
    out.push_back(c);
  }
  return out;
}

struct CollisionRule {
  double d_min{30.0};
  double release{50.0};
};

/// Pairwise avoidance: whenever two UAVs come closer than d_min the one with
/// the higher id yields by turning right until it is farther than the
/// release distance from that partner. Returns the partner being avoided,
/// per UAV, in the order of `states`.
inline std::vector<std::optional<int>> collision_avoidance(
    std::span<const UavState> states, const CollisionRule& rule,
    std::span<const std::optional<int>> previous = {}) {
  std::vector<std::optional<int>> out(states.size());
  auto find = [&](int id) -> const UavState* {
    for (const auto& s : states)
      if (s.id == id) return &s;
    return nullptr;
  };
  for (std::size_t i = 0; i < states.size() && i < previous.size(); ++i) {
    if (!previous[i]) continue;
    const UavState* partner = find(*previous[i]);
    if (partner && distance(states[i].position, partner->position) <= rule.release)
      out[i] = previous[i];
  }
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      if (distance(states[i].position, states[j].position) >= rule.d_min) continue;
      const bool j_yields = states[j].id > states[i].id;
      const std::size_t yielder = j_yields ? j : i;
      const int partner = j_yields ? states[i].id : states[j].id;
      if (!out[yielder]) out[yielder] = partner;
    }
  return out;
}

}  // namespace swarmcap
