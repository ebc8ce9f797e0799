#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace pforest {

// Highest supported space dimension (process dimension d up to kMaxSpaceDim + 1).
inline constexpr int kMaxSpaceDim = 4;

// Fixed-capacity space vector. Unused trailing coordinates stay exactly 0.0 so
// that full-array comparisons agree with comparisons over the active prefix.
struct SpaceVec {
  std::array<double, kMaxSpaceDim> c{};

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  friend bool operator==(const SpaceVec& a, const SpaceVec& b) { return a.c == b.c; }
};

// Lexicographic order over coordinates; total for the vectors we produce
// (coordinates are always finite).
inline bool lex_less(const SpaceVec& a, const SpaceVec& b) {
  for (int i = 0; i < kMaxSpaceDim; ++i) {
    if (a.c[i] < b.c[i]) return true;
    if (a.c[i] > b.c[i]) return false;
  }
  return false;
}

// Signed coordinate difference mapped to the minimal torus image, |result| <= extent/2.
inline double wrap_delta(double delta, double extent) {
  if (delta > 0.5 * extent) return delta - extent;
  if (delta < -0.5 * extent) return delta + extent;
  return delta;
}

// Axis-aligned box in space coordinates (window frame).
struct SpaceBox {
  SpaceVec lo;
  SpaceVec hi;

  bool contains(const SpaceVec& x, int sdim) const {
    for (int i = 0; i < sdim; ++i) {
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    }
    return true;
  }
};

}  // namespace pforest
