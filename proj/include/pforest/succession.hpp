#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "pforest/forest.hpp"

namespace pforest {

enum class ResolutionStatus {
  Found,
  UnresolvedAtBoundary,  // the answer depends on points outside the window
  DomainError,           // structurally impossible request (unknown id)
};

struct Resolution {
  ResolutionStatus status = ResolutionStatus::DomainError;
  std::uint64_t id = 0;      // valid when status == Found
  std::uint64_t steps = 0;   // parent/daughter/sister hops taken

  bool found() const { return status == ResolutionStatus::Found; }
};

// Next vertex on the succession line: the eldest daughter if any; otherwise
// the eldest younger sister of the nearest ancestor (the vertex itself
// included) that has one. Ascending past an unresolved root yields
// UnresolvedAtBoundary. Hops are capped by the sample's point count.
Resolution successor(const Forest& forest, std::uint64_t id);

// Inverse move: the youngest elder sister followed by youngest daughters down
// to a daughterless vertex, or the mother when there is no elder sister.
// Under an open boundary the descent is answered only when every vertex on it
// has a complete daughter list (none lies within distance 1 of the boundary).
Resolution predecessor(const Forest& forest, std::uint64_t id);

struct SuccessionLabels {
  std::uint64_t anchor = 0;
  std::map<std::int64_t, std::uint64_t> labels;  // n in [-back, forward] -> id
  bool complete = false;                         // every requested label assigned
};

// Labels the line through `anchor`: label 0 is the anchor, positive labels
// follow successor, negative labels follow predecessor. Stops early (and
// reports complete=false) at an unresolved boundary.
SuccessionLabels enumerate_line(const Forest& forest, std::uint64_t anchor,
                                std::uint64_t back, std::uint64_t forward);

// Preorder listing of the branch rooted at `root` (eldest daughters first),
// computed by an explicit-stack traversal independent of successor(). Throws
// DomainError when the branch is truncated at an open boundary.
std::vector<std::uint64_t> preorder_oracle(const Forest& forest, std::uint64_t root);

// Checks that n predecessor moves undo n successor moves from `anchor`, both
// as an id identity and as an exact coordinate identity in recentered (torus)
// coordinates. Empty when a move is unresolved at the boundary, which is not
// a falsification.
std::optional<bool> check_pointshift_identity(const Forest& forest, std::uint64_t anchor,
                                              std::uint64_t n);

}  // namespace pforest
