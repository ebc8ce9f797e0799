#include "pforest/point.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pforest/errors.hpp"
#include "pforest/rng.hpp"

namespace pforest {

void Window::validate() const {
  if (d < 2 || d - 1 > kMaxSpaceDim) {
    throw ValidationError("window dimension d must be in [2, " +
                          std::to_string(kMaxSpaceDim + 1) + "], got " + std::to_string(d));
  }
  for (int i = 0; i < sdim(); ++i) {
    if (!(space_extent[i] > 0.0) || !std::isfinite(space_extent[i])) {
      throw ValidationError("window space extent must be positive and finite");
    }
  }
  for (int i = sdim(); i < kMaxSpaceDim; ++i) {
    if (space_extent[i] != 0.0) {
      throw ValidationError("window space extent has more coordinates than d-1");
    }
  }
  if (!(time_lo < time_hi) || !std::isfinite(time_lo) || !std::isfinite(time_hi)) {
    throw ValidationError("window time interval must satisfy time_lo < time_hi");
  }
}

double dist2(const SpaceVec& a, const SpaceVec& b, const Window& w) {
  double s = 0.0;
  if (w.boundary == Boundary::Periodic) {
    for (int i = 0; i < w.sdim(); ++i) {
      const double delta = wrap_delta(a[i] - b[i], w.space_extent[i]);
      s += delta * delta;
    }
  } else {
    for (int i = 0; i < w.sdim(); ++i) {
      const double delta = a[i] - b[i];
      s += delta * delta;
    }
  }
  return s;
}

SpaceVec recenter(const SpaceVec& x, const SpaceVec& origin, const Window& w) {
  SpaceVec out;
  if (w.boundary == Boundary::Periodic) {
    for (int i = 0; i < w.sdim(); ++i) out[i] = wrap_delta(x[i] - origin[i], w.space_extent[i]);
  } else {
    for (int i = 0; i < w.sdim(); ++i) out[i] = x[i] - origin[i];
  }
  return out;
}

bool time_lex_less(const Point& a, const Point& b) {
  if (a.r != b.r) return a.r < b.r;
  if (!(a.x == b.x)) return lex_less(a.x, b.x);
  return a.id < b.id;
}

PointSample PointSample::create(const Window& window, double rate, std::uint64_t seed,
                                std::vector<Point> points, bool is_palm) {
  window.validate();
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw ValidationError("rate must be positive and finite");
  }
  PointSample s;
  s.window_ = window;
  s.rate_ = rate;
  s.seed_ = seed;
  s.is_palm_ = is_palm;
  s.points_ = std::move(points);
  s.id_to_index_.reserve(s.points_.size());
  for (std::uint32_t i = 0; i < s.points_.size(); ++i) {
    const Point& p = s.points_[i];
    if (!window.contains(p.x, p.r)) {
      throw ValidationError("point id " + std::to_string(p.id) + " lies outside the window");
    }
    for (int a = window.sdim(); a < kMaxSpaceDim; ++a) {
      if (p.x[a] != 0.0) {
        throw ValidationError("point id " + std::to_string(p.id) +
                              " has more coordinates than d-1");
      }
    }
    if (!s.id_to_index_.emplace(p.id, i).second) {
      throw ValidationError("duplicate point id " + std::to_string(p.id));
    }
  }
  // Coordinate collisions break the tie-break order and never occur for
  // genuine Poisson samples; reject them up front.
  std::vector<std::uint32_t> order(s.points_.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return time_lex_less(s.points_[a], s.points_[b]);
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    const Point& a = s.points_[order[i - 1]];
    const Point& b = s.points_[order[i]];
    if (a.r == b.r && a.x == b.x) {
      throw ValidationError("points " + std::to_string(a.id) + " and " + std::to_string(b.id) +
                            " share identical coordinates");
    }
  }
  return s;
}

PointSample sample_poisson(double rate, const Window& window, std::uint64_t seed) {
  window.validate();
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw ValidationError("rate must be positive and finite");
  }
  SplitRng rng(seed);
  const std::uint64_t n = rng.poisson(rate * window.volume());
  std::vector<Point> pts(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    Point& p = pts[k];
    p.r = rng.uniform(window.time_lo, window.time_hi);
    for (int i = 0; i < window.sdim(); ++i) {
      p.x[i] = rng.uniform(window.space_lo(i), window.space_hi(i));
    }
  }
  std::sort(pts.begin(), pts.end(), time_lex_less);
  for (std::uint64_t k = 0; k < n; ++k) pts[k].id = k + 1;
  return PointSample::create(window, rate, seed, std::move(pts), false);
}

PointSample palm_version(const PointSample& sample) {
  const Window& w = sample.window();
  SpaceVec origin;
  if (!w.contains(origin, 0.0)) {
    throw ValidationError("palm version requires the window to contain the space-time origin");
  }
  if (sample.index_of(0).has_value()) {
    throw ValidationError("palm version requires id 0 to be unused");
  }
  std::vector<Point> pts;
  pts.reserve(sample.size() + 1);
  pts.push_back(Point{0, origin, 0.0});
  pts.insert(pts.end(), sample.points().begin(), sample.points().end());
  return PointSample::create(w, sample.rate(), sample.seed(), std::move(pts), true);
}

}  // namespace pforest
