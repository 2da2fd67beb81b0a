#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmcap/geometry.hpp"

namespace swarmcap {

/// 5x5 window of a pheromone map centered on one cell. Entries that fall
/// outside the map are flagged absent.
struct PheromonePatch {
  static constexpr int radius = 2;
  static constexpr int side = 2 * radius + 1;

  Cell center{};
  std::array<double, side * side> values{};
  std::array<bool, side * side> present{};

  static constexpr std::size_t slot(int dx, int dy) {
    return static_cast<std::size_t>((dy + radius) * side + (dx + radius));
  }
  double at(int dx, int dy) const { return values[slot(dx, dy)]; }
  bool has(int dx, int dy) const { return present[slot(dx, dy)]; }
  int present_count() const {
    return static_cast<int>(std::count(present.begin(), present.end(), true));
  }

  bool operator==(const PheromonePatch&) const = default;
};

/// Repel pheromone map with evaporation, diffusion and a pinned border ring.
///
/// Deposits accumulate in a pending buffer and become visible at the next
/// step(). A step updates every interior cell from the pre-step values:
///
///   p' = (1 - evap) * ((1 - diff) * p + deposit + diff/8 * sum(8 neighbours))
///
/// Border cells are a sink: they hold the fixed boundary value (seen by
/// look_ahead), absorb whatever diffuses into them and emit nothing.
class PheromoneField {
 public:
  PheromoneField(GridSpec grid, double evaporation_rate, double diffusion_rate,
                 double boundary_value)
      : grid_(grid),
        evaporation_(evaporation_rate),
        diffusion_(diffusion_rate),
        boundary_(boundary_value),
        values_(grid.cell_count(), 0.0),
        pending_(grid.cell_count(), 0.0),
        scratch_(grid.cell_count(), 0.0) {
    if (!(evaporation_rate >= 0.0 && evaporation_rate <= 1.0))
      throw std::invalid_argument("evaporation_rate must be in [0, 1], got " +
                                  std::to_string(evaporation_rate));
    if (!(diffusion_rate >= 0.0 && diffusion_rate <= 1.0))
      throw std::invalid_argument("diffusion_rate must be in [0, 1], got " +
                                  std::to_string(diffusion_rate));
    if (!(boundary_value >= 0.0))
      throw std::invalid_argument("boundary_value must be >= 0");
    pin_border(values_);
  }

  const GridSpec& grid() const { return grid_; }
  double evaporation_rate() const { return evaporation_; }
  double diffusion_rate() const { return diffusion_; }
  double boundary_value() const { return boundary_; }

  double at(Cell c) const { return values_[grid_.index(c)]; }
  double pending_at(Cell c) const { return pending_[grid_.index(c)]; }
  std::span<const double> values() const { return values_; }

  // Test and tooling hook; border cells stay pinned.
  void set(Cell c, double v) {
    if (!grid_.contains(c)) throw std::out_of_range("cell outside map");
    if (v < 0.0) throw std::invalid_argument("pheromone must be non-negative");
    if (grid_.is_interior(c)) values_[grid_.index(c)] = v;
  }

  void deposit(Cell c, double amount) {
    if (amount < 0.0) throw std::invalid_argument("deposit amount must be non-negative");
    if (!grid_.is_interior(c)) return;
    pending_[grid_.index(c)] += amount;
  }

  void step() {
    const int n = grid_.cells_per_side();
    const auto stride = static_cast<std::size_t>(n);
    const double keep = 1.0 - diffusion_;
    const double share = diffusion_ / 8.0;
    const double survive = 1.0 - evaporation_;
    std::vector<double> column(stride);
    pin_border(values_, 0.0);
    for (int y = 1; y < n - 1; ++y) {
      const double* below = values_.data() + static_cast<std::size_t>(y - 1) * stride;
      const double* row = below + stride;
      const double* above = row + stride;
      const double* dep = pending_.data() + static_cast<std::size_t>(y) * stride;
      double* out = scratch_.data() + static_cast<std::size_t>(y) * stride;
      for (std::size_t x = 0; x < stride; ++x) column[x] = below[x] + row[x] + above[x];
      for (std::size_t x = 1; x + 1 < stride; ++x) {
        const double neighbours = column[x - 1] + column[x] + column[x + 1] - row[x];
        out[x] = survive * (keep * row[x] + dep[x] + share * neighbours);
      }
    }
    std::swap(values_, scratch_);
    pin_border(values_);
    std::fill(pending_.begin(), pending_.end(), 0.0);
  }

  /// Weighted 3x3 average with the center counted four times. Neighbours
  /// beyond the map edge read as the boundary value.
  double look_ahead(Cell c) const {
    if (!grid_.contains(c)) throw std::out_of_range("look_ahead cell outside map");
    double sum = 4.0 * at(c);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const Cell nb{c.x + dx, c.y + dy};
        sum += grid_.contains(nb) ? at(nb) : boundary_;
      }
    return sum / 12.0;
  }

  PheromonePatch extract_patch(Cell center) const {
    if (!grid_.contains(center)) throw std::out_of_range("patch center outside map");
    PheromonePatch patch;
    patch.center = center;
    for (int dy = -PheromonePatch::radius; dy <= PheromonePatch::radius; ++dy)
      for (int dx = -PheromonePatch::radius; dx <= PheromonePatch::radius; ++dx) {
        const Cell c{center.x + dx, center.y + dy};
        const auto s = PheromonePatch::slot(dx, dy);
        patch.present[s] = grid_.contains(c);
        patch.values[s] = patch.present[s] ? at(c) : 0.0;
      }
    return patch;
  }

  void merge_patch(const PheromonePatch& patch) {
    for (int dy = -PheromonePatch::radius; dy <= PheromonePatch::radius; ++dy)
      for (int dx = -PheromonePatch::radius; dx <= PheromonePatch::radius; ++dx) {
        if (!patch.has(dx, dy)) continue;
        const Cell c{patch.center.x + dx, patch.center.y + dy};
        if (!grid_.is_interior(c)) continue;
        double& v = values_[grid_.index(c)];
        v = std::max(v, patch.at(dx, dy));
      }
  }

  double interior_total() const {
    double total = 0.0;
    const int n = grid_.cells_per_side();
    for (int y = 1; y < n - 1; ++y)
      for (int x = 1; x < n - 1; ++x) total += at({x, y});
    return total;
  }

  /// Row-major dump, one map row (constant y, ascending) per line.
  void write_csv(std::ostream& os) const {
    const int n = grid_.cells_per_side();
    char buf[32];
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        std::snprintf(buf, sizeof buf, "%.6f", at({x, y}));
        if (x) os << ',';
        os << buf;
      }
      os << '\n';
    }
  }

  bool operator==(const PheromoneField& o) const {
    return grid_ == o.grid_ && evaporation_ == o.evaporation_ && diffusion_ == o.diffusion_ &&
           boundary_ == o.boundary_ && values_ == o.values_ && pending_ == o.pending_;
  }

 private:
  void pin_border(std::vector<double>& v) const { pin_border(v, boundary_); }
  void pin_border(std::vector<double>& v, double value) const {
    const int n = grid_.cells_per_side();
    for (int i = 0; i < n; ++i) {
      v[grid_.index({i, 0})] = value;
      v[grid_.index({i, n - 1})] = value;
      v[grid_.index({0, i})] = value;
      v[grid_.index({n - 1, i})] = value;
    }
  }

  GridSpec grid_;
  double evaporation_;
  double diffusion_;
  double boundary_;
  std::vector<double> values_;
  std::vector<double> pending_;
  std::vector<double> scratch_;
};

}  // namespace swarmcap
