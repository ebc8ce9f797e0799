#include "pforest/forest.hpp"

#include <algorithm>
#include <numeric>

#include "pforest/errors.hpp"

namespace pforest {

namespace {

// Sister order: eldest first. Ascending first space coordinate, ties resolved
// by the remaining coordinates, then by id.
struct SisterLess {
  const PointSample* s;
  bool operator()(std::uint32_t a, std::uint32_t b) const {
    const Point& pa = s->point(a);
    const Point& pb = s->point(b);
    if (!(pa.x == pb.x)) return lex_less(pa.x, pb.x);
    return pa.id < pb.id;
  }
};

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0u);
  }
  std::uint32_t find(std::uint32_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); }
};

}  // namespace

Forest Forest::build(const PointSample& sample) {
  Forest f(sample);
  const std::size_t n = sample.size();
  f.mother_.assign(n, kNone);
  f.tau_.assign(n, 0.0);
  f.near_boundary_.assign(n, 0);

  const Window& w = sample.window();
  for (std::uint32_t i = 0; i < n; ++i) {
    const Point& p = sample.point(i);
    if (auto hit = f.index_.first_hit(p.x, p.r)) {
      f.mother_[i] = hit->index;
      f.tau_[i] = hit->tau;
    }
    if (w.boundary == Boundary::Open) {
      for (int a = 0; a < w.sdim(); ++a) {
        if (p.x[a] - w.space_lo(a) < 1.0 || w.space_hi(a) - p.x[a] < 1.0) {
          f.near_boundary_[i] = 1;
          break;
        }
      }
    }
  }

  // Children, flattened and sister-sorted per mother.
  std::vector<std::uint32_t> counts(n + 1, 0);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (f.mother_[i] != kNone) ++counts[f.mother_[i]];
  }
  f.child_begin_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) f.child_begin_[i + 1] = f.child_begin_[i] + counts[i];
  f.children_.resize(f.child_begin_[n]);
  {
    std::vector<std::uint32_t> cursor(f.child_begin_.begin(), f.child_begin_.end() - 1);
    for (std::uint32_t i = 0; i < n; ++i) {
      if (f.mother_[i] != kNone) f.children_[cursor[f.mother_[i]]++] = i;
    }
  }
  f.rank_.assign(n, 0);
  SisterLess less{&sample};
  for (std::uint32_t m = 0; m < n; ++m) {
    auto begin = f.children_.begin() + f.child_begin_[m];
    auto end = f.children_.begin() + f.child_begin_[m + 1];
    std::sort(begin, end, less);
    std::uint32_t rank = 1;
    for (auto it = begin; it != end; ++it) f.rank_[*it] = rank++;
  }

  for (std::uint32_t i = 0; i < n; ++i) {
    if (f.mother_[i] == kNone) f.roots_.push_back(sample.point(i).id);
  }
  std::sort(f.roots_.begin(), f.roots_.end());

  // Components of the mother relation; canonical id is the least point id.
  UnionFind uf(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (f.mother_[i] != kNone) uf.unite(i, f.mother_[i]);
  }
  f.component_.assign(n, 0);
  std::vector<std::uint64_t> min_id(n, ~0ull);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t r = uf.find(i);
    min_id[r] = std::min(min_id[r], sample.point(i).id);
  }
  for (std::uint32_t i = 0; i < n; ++i) f.component_[i] = min_id[uf.find(i)];
  return f;
}

std::uint32_t Forest::require_index(std::uint64_t id) const {
  auto idx = sample_->index_of(id);
  if (!idx) throw DomainError("unknown point id " + std::to_string(id));
  return *idx;
}

std::optional<std::uint64_t> Forest::mother_of(std::uint64_t id) const {
  const std::uint32_t i = require_index(id);
  if (mother_[i] == kNone) return std::nullopt;
  return sample_->point(mother_[i]).id;
}

std::optional<double> Forest::tau_of(std::uint64_t id) const {
  const std::uint32_t i = require_index(id);
  if (mother_[i] == kNone) return std::nullopt;
  return tau_[i];
}

std::vector<std::uint64_t> Forest::daughters(std::uint64_t id) const {
  std::vector<std::uint64_t> out;
  for (std::uint32_t c : children(require_index(id))) out.push_back(sample_->point(c).id);
  return out;
}

std::optional<std::uint64_t> Forest::ancestor(std::uint64_t id, std::uint64_t n) const {
  std::uint32_t i = require_index(id);
  for (std::uint64_t k = 0; k < n; ++k) {
    if (mother_[i] == kNone) return std::nullopt;
    i = mother_[i];
  }
  return sample_->point(i).id;
}

std::uint32_t Forest::sister_rank(std::uint64_t id) const {
  const std::uint32_t i = require_index(id);
  if (mother_[i] == kNone) {
    throw DomainError("point id " + std::to_string(id) + " has no mother");
  }
  return rank_[i];
}

Forest::Branch Forest::branch(std::uint64_t id) const {
  Branch out;
  out.truncated = false;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> frontier;  // (index, generation)
  frontier.emplace_back(require_index(id), 0);
  while (!frontier.empty()) {
    const auto [i, gen] = frontier.back();
    frontier.pop_back();
    out.members.push_back(BranchMember{sample_->point(i).id, gen});
    out.truncated = out.truncated || near_boundary_[i] != 0;
    for (std::uint32_t c : children(i)) frontier.emplace_back(c, gen + 1);
  }
  std::sort(out.members.begin(), out.members.end(), [](const BranchMember& a, const BranchMember& b) {
    if (a.generation != b.generation) return a.generation < b.generation;
    return a.id < b.id;
  });
  return out;
}

std::uint64_t Forest::component_of(std::uint64_t id) const {
  return component_[require_index(id)];
}

Forest::ComponentSummary Forest::components() const {
  ComponentSummary s;
  std::unordered_map<std::uint64_t, std::size_t> sizes;
  for (std::uint64_t c : component_) ++sizes[c];
  s.count = sizes.size();
  s.sizes.reserve(sizes.size());
  for (const auto& kv : sizes) s.sizes.push_back(kv.second);
  std::sort(s.sizes.begin(), s.sizes.end(), std::greater<>());
  if (!s.sizes.empty() && !component_.empty()) {
    s.largest_fraction = static_cast<double>(s.sizes.front()) / static_cast<double>(component_.size());
  }
  return s;
}

}  // namespace pforest
