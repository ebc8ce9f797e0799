#include "pforest/succession.hpp"

#include <string>

#include "pforest/errors.hpp"

namespace pforest {

namespace {

Resolution resolve_found(const Forest& f, std::uint32_t index, std::uint64_t steps) {
  return Resolution{ResolutionStatus::Found, f.sample().point(index).id, steps};
}

}  // namespace

Resolution successor(const Forest& f, std::uint64_t id) {
  if (!f.sample().index_of(id)) return Resolution{ResolutionStatus::DomainError, 0, 0};
  std::uint32_t cur = f.require_index(id);
  std::uint64_t steps = 0;
  const std::uint64_t budget = f.size();

  auto kids = f.children(cur);
  if (!kids.empty()) return resolve_found(f, kids.front(), 1);

  // Ascend until some vertex has a younger sister; take the eldest of them.
  while (true) {
    const std::uint32_t m = f.mother_index(cur);
    if (m == Forest::kNone) return Resolution{ResolutionStatus::UnresolvedAtBoundary, 0, steps};
    const std::uint32_t rank = f.sister_rank_index(cur);  // 1-based
    auto sisters = f.children(m);
    if (rank < sisters.size()) return resolve_found(f, sisters[rank], steps + 1);
    cur = m;
    if (++steps > budget) return Resolution{ResolutionStatus::UnresolvedAtBoundary, 0, steps};
  }
}

Resolution predecessor(const Forest& f, std::uint64_t id) {
  if (!f.sample().index_of(id)) return Resolution{ResolutionStatus::DomainError, 0, 0};
  const std::uint32_t cur = f.require_index(id);
  std::uint64_t steps = 0;
  const std::uint64_t budget = f.size();

  const std::uint32_t m = f.mother_index(cur);
  if (m == Forest::kNone) {
    // A root with no elder sister has its predecessor outside the window.
    return Resolution{ResolutionStatus::UnresolvedAtBoundary, 0, 0};
  }
  const std::uint32_t rank = f.sister_rank_index(cur);
  if (rank <= 1) {
    // Eldest (or only) daughter: predecessor is the mother.
    return resolve_found(f, m, 1);
  }
  // Youngest elder sister, then youngest daughters down to a leaf. Every
  // vertex on the descent must have a trustworthy daughter list.
  std::uint32_t down = f.children(m)[rank - 2];
  ++steps;
  while (true) {
    if (f.near_open_boundary(down)) {
      return Resolution{ResolutionStatus::UnresolvedAtBoundary, 0, steps};
    }
    auto kids = f.children(down);
    if (kids.empty()) return resolve_found(f, down, steps);
    down = kids.back();
    if (++steps > budget) return Resolution{ResolutionStatus::UnresolvedAtBoundary, 0, steps};
  }
}

SuccessionLabels enumerate_line(const Forest& f, std::uint64_t anchor, std::uint64_t back,
                                std::uint64_t forward) {
  SuccessionLabels out;
  out.anchor = anchor;
  f.require_index(anchor);  // throws DomainError on unknown anchor
  out.labels[0] = anchor;
  out.complete = true;

  std::uint64_t cur = anchor;
  for (std::uint64_t n = 1; n <= forward; ++n) {
    const Resolution r = successor(f, cur);
    if (!r.found()) {
      out.complete = false;
      break;
    }
    cur = r.id;
    out.labels[static_cast<std::int64_t>(n)] = cur;
  }
  cur = anchor;
  for (std::uint64_t n = 1; n <= back; ++n) {
    const Resolution r = predecessor(f, cur);
    if (!r.found()) {
      out.complete = false;
      break;
    }
    cur = r.id;
    out.labels[-static_cast<std::int64_t>(n)] = cur;
  }
  return out;
}

std::vector<std::uint64_t> preorder_oracle(const Forest& f, std::uint64_t root) {
  const std::uint32_t r = f.require_index(root);
  std::vector<std::uint64_t> out;
  std::vector<std::uint32_t> stack{r};
  while (!stack.empty()) {
    const std::uint32_t i = stack.back();
    stack.pop_back();
    if (f.near_open_boundary(i)) {
      throw DomainError("branch of id " + std::to_string(root) +
                        " is truncated at the open boundary");
    }
    out.push_back(f.sample().point(i).id);
    auto kids = f.children(i);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

std::optional<bool> check_pointshift_identity(const Forest& f, std::uint64_t anchor,
                                              std::uint64_t n) {
  f.require_index(anchor);
  std::uint64_t cur = anchor;
  for (std::uint64_t k = 0; k < n; ++k) {
    const Resolution r = successor(f, cur);
    if (!r.found()) return std::nullopt;
    cur = r.id;
  }
  const std::uint64_t shifted = cur;
  for (std::uint64_t k = 0; k < n; ++k) {
    const Resolution r = predecessor(f, cur);
    if (!r.found()) return std::nullopt;
    cur = r.id;
  }
  if (cur != anchor) return false;

  // Exact coordinate form of the identity: the displacement applied by the n
  // backward moves, seen from the shifted point, is the exact negation of the
  // forward displacement.
  const Window& w = f.sample().window();
  const Point& pa = f.sample().point(f.require_index(anchor));
  const Point& ps = f.sample().point(f.require_index(shifted));
  const Point& pe = f.sample().point(f.require_index(cur));
  const SpaceVec forward = recenter(ps.x, pa.x, w);
  const SpaceVec backward = recenter(pe.x, ps.x, w);
  for (int i = 0; i < w.sdim(); ++i) {
    if (backward[i] != -forward[i]) return false;
  }
  return true;
}

}  // namespace pforest
