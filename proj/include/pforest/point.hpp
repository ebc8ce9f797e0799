#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "pforest/geometry.hpp"

namespace pforest {

enum class Boundary { Periodic, Open };

// Simulation window: space box [-L_i/2, +L_i/2] per axis, explicit time
// interval. Space is a torus under Periodic boundary; time is always bounded
// and never wraps.
struct Window {
  int d = 2;  // process dimension; space has d-1 coordinates
  SpaceVec space_extent;
  double time_lo = 0.0;
  double time_hi = 1.0;
  Boundary boundary = Boundary::Periodic;

  int sdim() const { return d - 1; }
  double space_lo(int axis) const { return -0.5 * space_extent[axis]; }
  double space_hi(int axis) const { return 0.5 * space_extent[axis]; }

  double space_volume() const {
    double v = 1.0;
    for (int i = 0; i < sdim(); ++i) v *= space_extent[i];
    return v;
  }
  double volume() const { return space_volume() * (time_hi - time_lo); }

  bool contains_space(const SpaceVec& x) const {
    for (int i = 0; i < sdim(); ++i) {
      if (x[i] < space_lo(i) || x[i] > space_hi(i)) return false;
    }
    return true;
  }
  bool contains(const SpaceVec& x, double r) const {
    return r >= time_lo && r <= time_hi && contains_space(x);
  }

  // Throws ValidationError when degenerate.
  void validate() const;
};

struct Point {
  std::uint64_t id = 0;
  SpaceVec x;
  double r = 0.0;
};

// Space distance squared under the window's boundary mode.
double dist2(const SpaceVec& a, const SpaceVec& b, const Window& w);

// Minimal-image displacement from `origin` to `x` (plain difference under
// Open boundary). Exactly antisymmetric: recenter(a,b) == -recenter(b,a)
// coordinate-wise in floating point.
SpaceVec recenter(const SpaceVec& x, const SpaceVec& origin, const Window& w);

// Time-major order used everywhere a total order on points is needed:
// (r, x_1, ..., x_{d-1}, id) ascending.
bool time_lex_less(const Point& a, const Point& b);

// Immutable point configuration in a window.
class PointSample {
 public:
  // Validates: window sane, ids unique, coordinates unique, points inside the
  // window. Point order is preserved as given (file round-trips depend on it).
  static PointSample create(const Window& window, double rate, std::uint64_t seed,
                            std::vector<Point> points, bool is_palm);

  const Window& window() const { return window_; }
  double rate() const { return rate_; }
  std::uint64_t seed() const { return seed_; }
  bool is_palm() const { return is_palm_; }
  const std::vector<Point>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  const Point& point(std::uint32_t index) const { return points_[index]; }

  std::optional<std::uint32_t> index_of(std::uint64_t id) const {
    auto it = id_to_index_.find(id);
    if (it == id_to_index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  PointSample() = default;

  Window window_;
  double rate_ = 0.0;
  std::uint64_t seed_ = 0;
  bool is_palm_ = false;
  std::vector<Point> points_;
  std::unordered_map<std::uint64_t, std::uint32_t> id_to_index_;
};

// Homogeneous Poisson sample: point count is Poisson(rate * window volume),
// coordinates are iid uniform. Points are stored in time order and ids are
// assigned 1..n in that order (id 0 stays reserved for the Palm origin).
// Deterministic given (rate, window, seed).
PointSample sample_poisson(double rate, const Window& window, std::uint64_t seed);

// Same sample with the space-time origin inserted as point id 0 (Palm
// version). Requires the window to contain the origin and id 0 to be free.
PointSample palm_version(const PointSample& sample);

}  // namespace pforest
