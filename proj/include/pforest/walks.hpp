#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pforest/forest.hpp"

namespace pforest {

// Piecewise-constant coalescing-walk path: position is birth_x on
// [birth_r, jump_times[0]) and positions[k] on [jump_times[k], jump_times[k+1]).
// jump_times are strictly increasing; horizon is the last time the path is
// certified (min of the requested t_max and the window's time ceiling).
struct Trajectory {
  SpaceVec birth_x;
  double birth_r = 0.0;
  std::vector<double> jump_times;
  std::vector<SpaceVec> positions;
  double horizon = 0.0;
};

// Walk started by the sample point `id`, followed along its ancestor chain up
// to t_max. Requires r(id) <= t_max <= window.time_hi.
Trajectory trajectory(const Forest& forest, std::uint64_t id, double t_max);

// Walk started at an arbitrary position at time t_start: it waits for the
// first sample point within closed unit distance, jumps onto it and follows
// that point's chain.
Trajectory probe_trajectory(const Forest& forest, const SpaceVec& x, double t_start,
                            double t_max);

// One occupied position of a slice. Walkers founded by sample points carry
// the occupied point's id; walkers from an initial configuration that never
// jumped carry the indices of their initial positions instead.
struct SliceWalker {
  SpaceVec pos;
  std::optional<std::uint64_t> at_point;     // sample point currently occupied
  std::vector<std::uint64_t> founders;       // sample-point founders, ascending id
  std::vector<std::uint32_t> initial_walkers;  // indices into the initial configuration
};

struct SliceConfig {
  double t = 0.0;
  std::vector<SliceWalker> walkers;  // sorted by position, lexicographic

  std::size_t walker_count() const { return walkers.size(); }
  std::vector<SpaceVec> occupied() const;
};

// Configuration eta_t: one walker per sample point born at or before t,
// coalesced by shared ancestry (walkers share a position iff they share the
// youngest ancestor born at or before t). Requires t inside the time window.
SliceConfig eta_slice(const Forest& forest, double t);

// Configuration at time t of the process restarted at t_start from the
// positions `eta0`, ignoring sample points born before t_start. With an empty
// eta0 and t_start == window.time_lo this reproduces eta_slice exactly.
SliceConfig eta_from_initial(const Forest& forest, std::span<const SpaceVec> eta0,
                             double t_start, double t);

struct DependenceSet {
  std::vector<std::uint64_t> ids;  // ascending
  bool emptied = false;            // the swept region emptied before time_lo
};

// Points that can influence the slice inside `region` at time t: a backward
// sweep from t removes each hit obstacle ball from the region and records the
// hit, then the record is closed under ancestors born at or before t. The
// region remainder is tracked on a fine grid, conservatively (cells are only
// discarded when fully covered), so the returned set may slightly exceed the
// minimal one but never misses a dependency; `emptied` is only reported when
// the remainder is truly empty.
DependenceSet dependence_set(const Forest& forest, const SpaceBox& region, double t);

// First time the walks of a and b occupy the same position: the birth time of
// the earliest shared point of their ancestor chains (walks arrive at a point
// exactly when it is born). Empty when the chains stay disjoint inside the
// window.
std::optional<double> meeting_time(const Forest& forest, std::uint64_t a, std::uint64_t b);

// Slice at time t restricted to walkers whose lineage contains a founder born
// at or before r: the positions whose occupants survive backward to r.
// Monotone in r (larger r keeps more walkers). Requires time_lo <= r <= t.
SliceConfig backward_surviving(const Forest& forest, double r, double t);

}  // namespace pforest
