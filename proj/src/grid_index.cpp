#include "pforest/grid_index.hpp"

#include <algorithm>
#include <cmath>

#include "pforest/errors.hpp"

namespace pforest {

namespace {

// Order of bucket contents and of frontier ties.
struct TimeMajorLess {
  const PointSample* s;
  bool operator()(std::uint32_t a, std::uint32_t b) const {
    return time_lex_less(s->point(a), s->point(b));
  }
};

}  // namespace

GridIndex::GridIndex(const PointSample& sample) : sample_(&sample) {
  const Window& w = sample.window();
  std::size_t total = 1;
  for (int i = 0; i < w.sdim(); ++i) {
    cells_[i] = std::max(1, static_cast<int>(std::floor(w.space_extent[i])));
    width_[i] = w.space_extent[i] / cells_[i];
    total *= static_cast<std::size_t>(cells_[i]);
  }
  for (int i = w.sdim(); i < kMaxSpaceDim; ++i) {
    cells_[i] = 1;
    width_[i] = 1.0;
  }
  buckets_.assign(total, {});
  for (std::uint32_t i = 0; i < sample.size(); ++i) {
    buckets_[cell_of(sample.point(i).x)].push_back(i);
  }
  for (auto& b : buckets_) std::sort(b.begin(), b.end(), TimeMajorLess{sample_});
}

std::uint32_t GridIndex::cell_of(const SpaceVec& x) const {
  const Window& w = sample_->window();
  std::uint32_t cell = 0;
  for (int i = 0; i < w.sdim(); ++i) {
    int c = static_cast<int>(std::floor((x[i] - w.space_lo(i)) / width_[i]));
    c = std::clamp(c, 0, cells_[i] - 1);
    cell = cell * static_cast<std::uint32_t>(cells_[i]) + static_cast<std::uint32_t>(c);
  }
  return cell;
}

std::optional<GridIndex::Hit> GridIndex::first_hit(const SpaceVec& x, double r) const {
  const Window& w = sample_->window();
  const bool periodic = w.boundary == Boundary::Periodic;

  // Candidate cells per axis: every cell meeting [x-1, x+1] (wrapped under
  // periodic boundary, clamped under open). Duplicates from wrapping on small
  // tori are removed per axis.
  std::array<std::array<int, 5>, kMaxSpaceDim> axis_cells{};
  std::array<int, kMaxSpaceDim> axis_n{};
  for (int i = 0; i < w.sdim(); ++i) {
    const int lo = static_cast<int>(std::floor((x[i] - 1.0 - w.space_lo(i)) / width_[i]));
    const int hi = static_cast<int>(std::floor((x[i] + 1.0 - w.space_lo(i)) / width_[i]));
    int n = 0;
    for (int c = lo; c <= hi && n < 5; ++c) {
      int cc = c;
      if (periodic) {
        cc = ((c % cells_[i]) + cells_[i]) % cells_[i];
      } else if (c < 0 || c >= cells_[i]) {
        continue;
      }
      bool dup = false;
      for (int k = 0; k < n; ++k) dup = dup || axis_cells[i][k] == cc;
      if (!dup) axis_cells[i][n++] = cc;
    }
    if (n == 0) return std::nullopt;  // probe more than a cell away from all points
    axis_n[i] = n;
  }

  // Frontier: one cursor per candidate bucket, advanced past time r.
  struct Cursor {
    const std::vector<std::uint32_t>* bucket;
    std::size_t pos;
  };
  std::array<Cursor, 243> cursors;  // 3^5 upper bound; actual <= 3^sdim (5 only on tiny tori)
  std::size_t ncur = 0;

  std::array<int, kMaxSpaceDim> pick{};
  const int sdim = w.sdim();
  // Cartesian product over per-axis candidate lists.
  while (true) {
    std::uint32_t cell = 0;
    for (int i = 0; i < sdim; ++i) {
      cell = cell * static_cast<std::uint32_t>(cells_[i]) +
             static_cast<std::uint32_t>(axis_cells[i][pick[i]]);
    }
    const auto& bucket = buckets_[cell];
    // First entry with time > r.
    auto it = std::upper_bound(bucket.begin(), bucket.end(), r, [&](double t, std::uint32_t idx) {
      return t < sample_->point(idx).r;
    });
    if (it != bucket.end()) {
      cursors[ncur++] = Cursor{&bucket, static_cast<std::size_t>(it - bucket.begin())};
    }
    int axis = sdim - 1;
    while (axis >= 0) {
      if (++pick[axis] < axis_n[axis]) break;
      pick[axis] = 0;
      --axis;
    }
    if (axis < 0) break;
  }

  // Advance the globally earliest candidate; the first one within the closed
  // unit ball is the mother (later candidates can only have larger tau).
  TimeMajorLess less{sample_};
  while (true) {
    std::size_t best = ncur;
    for (std::size_t c = 0; c < ncur; ++c) {
      if (cursors[c].pos >= cursors[c].bucket->size()) continue;
      if (best == ncur ||
          less((*cursors[c].bucket)[cursors[c].pos], (*cursors[best].bucket)[cursors[best].pos])) {
        best = c;
      }
    }
    if (best == ncur) return std::nullopt;
    const std::uint32_t idx = (*cursors[best].bucket)[cursors[best].pos++];
    if (dist2(sample_->point(idx).x, x, w) <= 1.0) {
      return Hit{idx, sample_->point(idx).r};
    }
  }
}

std::optional<MotherResult> mother(const GridIndex& index, std::uint64_t id) {
  const auto idx = index.sample().index_of(id);
  if (!idx) throw DomainError("unknown point id " + std::to_string(id));
  const Point& p = index.sample().point(*idx);
  auto hit = index.first_hit(p.x, p.r);
  if (!hit) return std::nullopt;
  return MotherResult{hit->index, hit->tau};
}

std::optional<MotherResult> mother_probe(const GridIndex& index, const SpaceVec& x, double r) {
  const Window& w = index.sample().window();
  if (!w.contains(x, r)) throw DomainError("probe lies outside the window");
  auto hit = index.first_hit(x, r);
  if (!hit) return std::nullopt;
  return MotherResult{hit->index, hit->tau};
}

}  // namespace pforest
