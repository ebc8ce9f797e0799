#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pforest/point.hpp"

namespace pforest {

// Spatial hash over unit-scale cells with time-sorted buckets. Cell widths are
// L_i / max(1, floor(L_i)), i.e. at least 1 whenever more than one cell exists
// per axis, so a unit ball meets at most 3 cells per axis and a mother query
// touches at most 3^(d-1) buckets.
class GridIndex {
 public:
  explicit GridIndex(const PointSample& sample);

  struct Hit {
    std::uint32_t index;  // index into sample.points()
    double tau;           // its time coordinate
  };

  // First point strictly after time r within closed unit distance of x, under
  // the window's boundary mode. Candidate buckets are merged by a time-ordered
  // frontier scan that stops at the first point satisfying the distance
  // predicate. Ties in time resolve by (x, id) lexicographic order.
  std::optional<Hit> first_hit(const SpaceVec& x, double r) const;

  const PointSample& sample() const { return *sample_; }
  double cell_size() const { return 1.0; }  // nominal; actual widths are >= 1 per axis
  std::size_t bucket_count() const { return buckets_.size(); }

 private:
  std::uint32_t cell_of(const SpaceVec& x) const;

  const PointSample* sample_;
  std::array<int, kMaxSpaceDim> cells_{};     // cells per axis
  std::array<double, kMaxSpaceDim> width_{};  // cell width per axis
  std::vector<std::vector<std::uint32_t>> buckets_;  // per cell, sorted time-major
};

struct MotherResult {
  std::uint32_t index;  // the mother point's index in the sample
  double tau;           // first-obstacle time
};

// Mother of the point with the given id: the sample point minimizing r'
// subject to r' > r(s) and |x' - x(s)| <= 1. Empty when no such point exists
// inside the window (unresolved at the time boundary).
std::optional<MotherResult> mother(const GridIndex& index, std::uint64_t id);

// Same query from an arbitrary probe location inside the window.
std::optional<MotherResult> mother_probe(const GridIndex& index, const SpaceVec& x, double r);

}  // namespace pforest
