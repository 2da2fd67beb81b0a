#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "swarmcap/comms.hpp"
#include "swarmcap/connectivity.hpp"
#include "swarmcap/kinematics.hpp"
#include "swarmcap/pheromone_field.hpp"

namespace swarmcap {

enum class PolicyKind { Cap, Pheromone, Cacoc2 };

inline std::string_view to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::Cap: return "cap";
    case PolicyKind::Pheromone: return "pheromone";
    case PolicyKind::Cacoc2: return "cacoc2";
  }
  return "?";
}

inline PolicyKind parse_policy_kind(std::string_view s) {
  if (s == "cap") return PolicyKind::Cap;
  if (s == "pheromone") return PolicyKind::Pheromone;
  if (s == "cacoc2") return PolicyKind::Cacoc2;
  throw std::invalid_argument("unknown policy '" + std::string(s) +
                              "' (expected cap, pheromone or cacoc2)");
}

struct PolicySpec {
  PolicyKind kind{PolicyKind::Cap};
  double beta{4.0};  // CAP connectivity threshold
  double f{0.3};     // CACOC2 flocking weight

  bool operator==(const PolicySpec&) const = default;
};

// ---------------------------------------------------------------------------
// CAP scoring

/// Saturating connectivity weight: K/beta below the threshold, 1 at or above.
/// beta = 0 is the saturated limit (every candidate counts as connected).
inline double connectivity_weight(double k, double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (k >= beta) return 1.0;
  return k / beta;
}

inline double cap_score(double weight, double look_ahead) {
  return weight * (1.0 - std::clamp(look_ahead, 0.0, 1.0));
}

struct CandidateEvaluation {
  Cell cell{};
  Direction direction{};
  int turn{0};
  double look_ahead{0.0};  // raw, unclamped
  double k{0.0};
  double alpha{1.0};
  double score{0.0};
};

/// Strict "a is preferred over b": higher score, then lower look-ahead
/// pheromone, then the smaller turn, then the lower direction index.
inline bool preferred(const CandidateEvaluation& a, const CandidateEvaluation& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.look_ahead != b.look_ahead) return a.look_ahead < b.look_ahead;
  if (std::abs(a.turn) != std::abs(b.turn)) return std::abs(a.turn) < std::abs(b.turn);
  return a.direction.index() < b.direction.index();
}

inline const CandidateEvaluation& best_candidate(std::span<const CandidateEvaluation> evals) {
  if (evals.empty()) throw std::invalid_argument("no candidates");
  const CandidateEvaluation* best = &evals.front();
  for (const auto& e : evals)
    if (preferred(e, *best)) best = &e;
  return *best;
}

inline std::array<CandidateEvaluation, 5> evaluate_cap(const CandidateSet& candidates,
                                                       const PheromoneField& field,
                                                       std::span<const NeighborClaim> claims,
                                                       double beta, double tx, double now,
                                                       double max_claim_age) {
  std::array<CandidateEvaluation, 5> out{};
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    auto& e = out[i];
    e.cell = c.cell;
    e.direction = c.direction;
    e.turn = c.turn;
    e.look_ahead = field.look_ahead(c.cell);
    e.k = estimate_k_at(c.cell, claims, field.grid(), tx, now, max_claim_age);
    e.alpha = connectivity_weight(e.k, beta);
    e.score = cap_score(e.alpha, e.look_ahead);
  }
  return out;
}

/// Everything a policy reads at a decision point. `field` is the deciding
/// UAV's private map and receives the arrival deposit.
struct DecisionInputs {
  const UavState& uav;
  PheromoneField& field;
  const NeighborTable& neighbours;
  int step_cells{1};
  double tx{1000.0};
  double now{0.0};
  double max_claim_age{4.0};
};

inline constexpr double kArrivalDeposit = 1.0;

inline CandidateEvaluation cap_select(const DecisionInputs& in, double beta) {
  in.field.deposit(in.uav.current_cell, kArrivalDeposit);
  const auto candidates = candidate_waypoints(in.uav, in.field.grid(), in.step_cells);
  const auto claims = in.neighbours.claims(in.now, in.max_claim_age);
  const auto evals = evaluate_cap(candidates, in.field, claims, beta, in.tx, in.now,
                                  in.max_claim_age);
  return best_candidate(evals);
}

/// Repel-pheromone baseline: minimum look-ahead pheromone, CAP tie rule.
inline CandidateEvaluation pheromone_select(const DecisionInputs& in) {
  in.field.deposit(in.uav.current_cell, kArrivalDeposit);
  const auto candidates = candidate_waypoints(in.uav, in.field.grid(), in.step_cells);
  std::array<CandidateEvaluation, 5> evals{};
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    evals[i].cell = candidates[i].cell;
    evals[i].direction = candidates[i].direction;
    evals[i].turn = candidates[i].turn;
    evals[i].look_ahead = in.field.look_ahead(candidates[i].cell);
    evals[i].score = 0.0;
  }
  return best_candidate(evals);
}

// ---------------------------------------------------------------------------
// CACOC2

struct RosslerParams {
  double a{0.2};
  double b{0.2};
  double c{5.7};
  double h{0.01};
  int warmup_maxima{50};
};

/// Rossler system sampled through its first return map: each call runs the
/// flow (RK4) to the next local maximum of x and returns it rescaled to
/// [0, 1] by the range of maxima seen so far.
class ChaoticState {
 public:
  explicit ChaoticState(std::array<double, 3> initial, RosslerParams params = {})
      : params_(params), s_(initial) {
    prev_x_ = s_[0];
    rk4_step();
    for (int i = 0; i < params_.warmup_maxima; ++i) {
      const double m = next_maximum();
      lo_ = std::min(lo_, m);
      hi_ = std::max(hi_, m);
    }
  }

  double next() {
    const double m = next_maximum();
    lo_ = std::min(lo_, m);
    hi_ = std::max(hi_, m);
    last_ = hi_ > lo_ ? (m - lo_) / (hi_ - lo_) : 0.5;
    return last_;
  }

  double last() const { return last_; }
  const std::array<double, 3>& state() const { return s_; }
  const RosslerParams& params() const { return params_; }

  bool operator==(const ChaoticState&) const = default;

 private:
  std::array<double, 3> deriv(const std::array<double, 3>& s) const {
    return {-s[1] - s[2], s[0] + params_.a * s[1], params_.b + s[2] * (s[0] - params_.c)};
  }

  void rk4_step() {
    const double h = params_.h;
    auto axpy = [](const std::array<double, 3>& s, const std::array<double, 3>& k, double w) {
      return std::array<double, 3>{s[0] + w * k[0], s[1] + w * k[1], s[2] + w * k[2]};
    };
    const auto k1 = deriv(s_);
    const auto k2 = deriv(axpy(s_, k1, h / 2));
    const auto k3 = deriv(axpy(s_, k2, h / 2));
    const auto k4 = deriv(axpy(s_, k3, h));
    for (int i = 0; i < 3; ++i) s_[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    if (!std::isfinite(s_[0]) || !std::isfinite(s_[1]) || !std::isfinite(s_[2]) ||
        std::abs(s_[2]) > 1e6) {
      // escaped the basin; restart on the attractor side
      s_ = {1.0, 1.0, 0.0};
    }
  }

  // Parabolic refinement of the sampled local maximum of x.
  double next_maximum() {
    for (;;) {
      const double x0 = prev_x_;
      const double x1 = s_[0];
      rk4_step();
      const double x2 = s_[0];
      prev_x_ = x1;
      if (x1 > x0 && x1 >= x2) {
        const double curv = x0 - 2.0 * x1 + x2;
        return curv < 0.0 ? x1 - (x0 - x2) * (x0 - x2) / (8.0 * curv) : x1;
      }
    }
  }

  RosslerParams params_;
  std::array<double, 3> s_;
  double prev_x_{0.0};
  double lo_{1e300};
  double hi_{-1e300};
  double last_{0.5};
};

enum class Turn { Left, Ahead, Right };

/// Left/ahead/right choice from the three look-ahead pheromone values and a
/// return-map sample.
inline Turn cacoc_direction(double pher_left, double pher_ahead, double pher_right, double rho) {
  if (pher_left < 0.0 || pher_ahead < 0.0 || pher_right < 0.0)
    throw std::invalid_argument("pheromone values must be non-negative");
  const double total = pher_left + pher_ahead + pher_right;
  double p_left = 1.0 / 3.0;
  double p_right = 1.0 / 3.0;
  if (total > 0.0) {
    p_left = (total - pher_left) / (2.0 * total);
    p_right = (total - pher_right) / (2.0 * total);
  }
  if (rho < p_right) return Turn::Right;
  if (p_left < rho && rho < p_right + p_left) return Turn::Left;
  return Turn::Ahead;
}

/// Mean of the fresh neighbours' unit travel directions (position toward
/// announced next waypoint).
inline Vec2 flock_force(const NeighborTable& table, const GridSpec& grid, double now,
                        double max_age) {
  Vec2 sum{};
  int count = 0;
  table.for_each_fresh(now, max_age, [&](int, const NeighborEntry& e) {
    const Vec2 v = grid.center(e.next_waypoint_cell) - e.position;
    const double n = v.norm();
    if (n == 0.0) return;
    sum += v * (1.0 / n);
    ++count;
  });
  return count ? sum * (1.0 / count) : Vec2{};
}

/// v * (F_C + f F_flock) / |F_C + f F_flock|; falls back to F_C when the sum vanishes.
inline Vec2 cacoc2_velocity(Vec2 chaotic_dir, Vec2 flock, double f, double speed) {
  if (!(speed > 0.0)) throw std::invalid_argument("speed must be > 0");
  const Vec2 sum = chaotic_dir + flock * f;
  const double n = sum.norm();
  if (n == 0.0) return chaotic_dir * (speed / chaotic_dir.norm());
  return sum * (speed / n);
}

struct Cacoc2Decision {
  CandidateEvaluation chosen{};
  Turn turn{Turn::Ahead};
  double rho{0.0};
  Vec2 velocity{};
};

inline Cacoc2Decision cacoc2_select(const DecisionInputs& in, ChaoticState& chaotic, double f) {
  in.field.deposit(in.uav.current_cell, kArrivalDeposit);
  const auto candidates = candidate_waypoints(in.uav, in.field.grid(), in.step_cells);
  // candidates are ordered by turn -2..2: left, ahead, right sit at 1, 2, 3
  const double pher_left = in.field.look_ahead(candidates[1].cell);
  const double pher_ahead = in.field.look_ahead(candidates[2].cell);
  const double pher_right = in.field.look_ahead(candidates[3].cell);

  Cacoc2Decision out;
  out.rho = chaotic.next();
  out.turn = cacoc_direction(pher_left, pher_ahead, pher_right, out.rho);
  const std::size_t pick = out.turn == Turn::Left ? 1 : (out.turn == Turn::Right ? 3 : 2);
  const Vec2 chaotic_dir = candidates[pick].direction.unit_vector();
  const Vec2 flock = flock_force(in.neighbours, in.field.grid(), in.now, in.max_claim_age);
  out.velocity = cacoc2_velocity(chaotic_dir, flock, f, in.uav.speed);

  const double target = bearing_of(out.velocity);
  std::optional<std::size_t> best;
  double best_err = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double err = std::abs(wrap_angle(candidates[i].direction.angle() - target));
    const auto& cur = candidates[i];
    const bool tied = best && std::abs(err - best_err) <= 1e-12;
    const bool wins_tie =
        tied && (std::abs(cur.turn) < std::abs(candidates[*best].turn) ||
                 (std::abs(cur.turn) == std::abs(candidates[*best].turn) &&
                  cur.direction.index() < candidates[*best].direction.index()));
    if (!best || (!tied && err < best_err) || wins_tie) {
      best = i;
      best_err = err;
    }
  }
  const auto& c = candidates[*best];
  out.chosen.cell = c.cell;
  out.chosen.direction = c.direction;
  out.chosen.turn = c.turn;
  out.chosen.look_ahead = in.field.look_ahead(c.cell);
  return out;
}

}  // namespace swarmcap
