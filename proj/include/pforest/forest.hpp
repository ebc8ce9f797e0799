#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pforest/grid_index.hpp"
#include "pforest/point.hpp"

namespace pforest {

// Forest over a point sample: every point is linked to its mother (first
// later point within closed unit distance) when that point exists inside the
// window. Mothers are strictly later in time, so the edge set is acyclic by
// construction. The forest borrows the sample; keep the sample alive.
class Forest {
 public:
  static Forest build(const PointSample& sample);
  static Forest build(PointSample&&) = delete;  // the forest borrows the sample

  const PointSample& sample() const { return *sample_; }
  const GridIndex& index() const { return index_; }
  std::size_t size() const { return mother_.size(); }

  // --- index-based accessors (no id lookup; hot paths) ---
  static constexpr std::uint32_t kNone = 0xFFFFFFFFu;
  std::uint32_t mother_index(std::uint32_t i) const { return mother_[i]; }
  double tau(std::uint32_t i) const { return tau_[i]; }  // defined when resolved
  std::span<const std::uint32_t> children(std::uint32_t i) const {
    return {children_.data() + child_begin_[i], child_begin_[i + 1] - child_begin_[i]};
  }
  std::uint32_t sister_rank_index(std::uint32_t i) const { return rank_[i]; }  // 1-based, 0 for roots
  bool near_open_boundary(std::uint32_t i) const { return near_boundary_[i] != 0; }

  std::uint32_t require_index(std::uint64_t id) const;

  // --- id-based operations ---
  // Mother link, or empty when unresolved at the window's time boundary.
  std::optional<std::uint64_t> mother_of(std::uint64_t id) const;
  std::optional<double> tau_of(std::uint64_t id) const;
  std::vector<std::uint64_t> daughters(std::uint64_t id) const;  // in sister order

  // n-th ancestor; empty when the chain leaves the window in fewer than n steps.
  std::optional<std::uint64_t> ancestor(std::uint64_t id, std::uint64_t n) const;

  // 1-based position among the mother's daughters under the sister order
  // (ascending first space coordinate, then remaining coordinates, then id).
  // Throws DomainError for a root.
  std::uint32_t sister_rank(std::uint64_t id) const;

  struct BranchMember {
    std::uint64_t id;
    std::uint32_t generation;  // 0 for the branch root
  };
  struct Branch {
    std::vector<BranchMember> members;  // root first, generation by generation
    bool truncated;  // some member within distance 1 of an open space boundary
  };
  // All descendants of id (the point itself included).
  Branch branch(std::uint64_t id) const;

  // Roots: points whose mother is unresolved. Sorted by id.
  const std::vector<std::uint64_t>& roots() const { return roots_; }
  double unresolved_fraction() const {
    return size() == 0 ? 0.0 : static_cast<double>(roots_.size()) / static_cast<double>(size());
  }

  // Connected components of the mother relation. Component ids are the
  // smallest point id in the class.
  std::uint64_t component_of(std::uint64_t id) const;
  std::uint64_t component_of_index(std::uint32_t i) const { return component_[i]; }
  struct ComponentSummary {
    std::size_t count = 0;
    std::vector<std::size_t> sizes;   // descending
    double largest_fraction = 0.0;    // largest size / point count
  };
  ComponentSummary components() const;

 private:
  explicit Forest(const PointSample& s) : sample_(&s), index_(s) {}

  const PointSample* sample_;
  GridIndex index_;

  std::vector<std::uint32_t> mother_;
  std::vector<double> tau_;
  std::vector<std::uint32_t> children_;     // flattened, sister-sorted
  std::vector<std::uint32_t> child_begin_;  // size+1 offsets into children_
  std::vector<std::uint32_t> rank_;
  std::vector<std::uint8_t> near_boundary_;
  std::vector<std::uint64_t> component_;
  std::vector<std::uint64_t> roots_;
};

}  // namespace pforest
