#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace swarmcap {

struct Vec2 {
  double x{0.0};
  double y{0.0};

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;

  double norm() const { return std::sqrt(x * x + y * y); }
  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

// Headings are compass angles: 0 = +y (north), increasing clockwise.
inline Vec2 heading_vector(double heading) { return {std::sin(heading), std::cos(heading)}; }

inline double bearing(Vec2 from, Vec2 to) { return std::atan2(to.x - from.x, to.y - from.y); }

inline double bearing_of(Vec2 v) { return std::atan2(v.x, v.y); }

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

struct Cell {
  int x{0};
  int y{0};

  constexpr Cell operator+(Cell o) const { return {x + o.x, y + o.y}; }
  constexpr Cell operator*(int k) const { return {x * k, y * k}; }
  constexpr auto operator<=>(const Cell&) const = default;
};

/// Square search area split into C x C cells. Cell (x, y) spans
/// [x*s, (x+1)*s) x [y*s, (y+1)*s) in meters; x grows east, y grows north.
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(int cells_per_side, double cell_size_m)
      : cells_per_side_(cells_per_side), cell_size_m_(cell_size_m) {
    if (cells_per_side < 3)
      throw std::invalid_argument("cells_per_side must be >= 3, got " +
                                  std::to_string(cells_per_side));
    if (!(cell_size_m > 0.0)) throw std::invalid_argument("cell_size_m must be > 0");
  }

  static GridSpec from_extent(double side_m, double cell_size_m) {
    if (!(cell_size_m > 0.0)) throw std::invalid_argument("cell_size_m must be > 0");
    const double ratio = side_m / cell_size_m;
    const long cells = std::lround(ratio);
    if (std::abs(ratio - static_cast<double>(cells)) > 1e-9)
      throw std::invalid_argument("map side must be a whole number of cells");
    return GridSpec(static_cast<int>(cells), cell_size_m);
  }

  int cells_per_side() const { return cells_per_side_; }
  double cell_size_m() const { return cell_size_m_; }
  double width_m() const { return cells_per_side_ * cell_size_m_; }
  double height_m() const { return width_m(); }
  std::size_t cell_count() const {
    return static_cast<std::size_t>(cells_per_side_) * static_cast<std::size_t>(cells_per_side_);
  }

  bool contains(Cell c) const {
    return c.x >= 0 && c.y >= 0 && c.x < cells_per_side_ && c.y < cells_per_side_;
  }
  bool is_interior(Cell c) const {
    return c.x >= 1 && c.y >= 1 && c.x < cells_per_side_ - 1 && c.y < cells_per_side_ - 1;
  }
  bool is_border(Cell c) const { return contains(c) && !is_interior(c); }

  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(cells_per_side_) +
           static_cast<std::size_t>(c.x);
  }

  // Points on or past the map edge map to the nearest edge cell.
  Cell cell_of(Vec2 p) const {
    auto clampi = [this](double v) {
      const int i = static_cast<int>(std::floor(v / cell_size_m_));
      return i < 0 ? 0 : (i >= cells_per_side_ ? cells_per_side_ - 1 : i);
    };
    return {clampi(p.x), clampi(p.y)};
  }

  Vec2 center(Cell c) const { return {(c.x + 0.5) * cell_size_m_, (c.y + 0.5) * cell_size_m_}; }

  bool operator==(const GridSpec&) const = default;

 private:
  int cells_per_side_{3};
  double cell_size_m_{1.0};
};

}  // namespace swarmcap
