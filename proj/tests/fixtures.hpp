#pragma once

// Hand-computed fixtures shared by the test binaries. All expected values in
// the tests referencing these fixtures were derived by hand from the model
// definition (first later point within closed unit distance), independently
// of the implementation.

#include <cstdint>
#include <vector>

#include "pforest/point.hpp"

namespace fixtures {

inline pforest::SpaceVec vec1(double x) {
  pforest::SpaceVec v;
  v[0] = x;
  return v;
}

inline pforest::Window open_window_1d(double extent, double t_lo, double t_hi) {
  pforest::Window w;
  w.d = 2;
  w.space_extent[0] = extent;
  w.time_lo = t_lo;
  w.time_hi = t_hi;
  w.boundary = pforest::Boundary::Open;
  return w;
}

// F1: four points on a line, open boundary.
//   a = (0.0, r=0.0)  id 1
//   e = (3.0, r=0.5)  id 2   (isolated: nothing later within distance 1)
//   b = (0.5, r=1.0)  id 3   (mother of a, tau 1.0)
//   c = (1.2, r=2.0)  id 4   (mother of b, tau 2.0; unresolved root)
inline constexpr std::uint64_t kA = 1;
inline constexpr std::uint64_t kE = 2;
inline constexpr std::uint64_t kB = 3;
inline constexpr std::uint64_t kC = 4;

inline pforest::PointSample make_f1() {
  const pforest::Window w = open_window_1d(10.0, 0.0, 2.5);
  std::vector<pforest::Point> pts = {
      {kA, vec1(0.0), 0.0},
      {kE, vec1(3.0), 0.5},
      {kB, vec1(0.5), 1.0},
      {kC, vec1(1.2), 2.0},
  };
  return pforest::PointSample::create(w, 1.0, 0, std::move(pts), false);
}

// F2: one mother with two daughters.
//   q = (0.7, r=2.0)   id 1   (sister rank 2)
//   p = (-0.5, r=2.5)  id 2   (sister rank 1: -0.5 < 0.7)
//   m = (0.0, r=3.0)   id 3   (mother of both; unresolved root)
inline constexpr std::uint64_t kQ = 1;
inline constexpr std::uint64_t kP = 2;
inline constexpr std::uint64_t kM = 3;

inline pforest::PointSample make_f2() {
  const pforest::Window w = open_window_1d(10.0, 0.0, 3.5);
  std::vector<pforest::Point> pts = {
      {kQ, vec1(0.7), 2.0},
      {kP, vec1(-0.5), 2.5},
      {kM, vec1(0.0), 3.0},
  };
  return pforest::PointSample::create(w, 1.0, 0, std::move(pts), false);
}

}  // namespace fixtures
