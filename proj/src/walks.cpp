#include "pforest/walks.hpp"

#include <algorithm>
#include <unordered_set>

#include "pforest/errors.hpp"

namespace pforest {

namespace {

void check_time(const Window& w, double t, const char* what) {
  if (!(t >= w.time_lo && t <= w.time_hi)) {
    throw DomainError(std::string(what) + " must lie inside the window time range");
  }
}

// Youngest ancestor born at or before t, memoized over the whole sample.
// kNone marks "not computed yet".
struct RepMemo {
  const Forest* f;
  double t;
  std::vector<std::uint32_t> rep;
  std::vector<std::uint32_t> path;

  RepMemo(const Forest& forest, double t_)
      : f(&forest), t(t_), rep(forest.size(), Forest::kNone) {}

  std::uint32_t operator()(std::uint32_t i) {
    path.clear();
    std::uint32_t cur = i;
    while (rep[cur] == Forest::kNone) {
      const std::uint32_t m = f->mother_index(cur);
      if (m == Forest::kNone || f->sample().point(m).r > t) {
        rep[cur] = cur;
        break;
      }
      path.push_back(cur);
      cur = m;
    }
    const std::uint32_t result = rep[cur];
    for (std::uint32_t v : path) rep[v] = result;
    return result;
  }
};

void append_chain(const Forest& f, std::uint32_t start, double t_max, Trajectory& out) {
  std::uint32_t cur = start;
  while (f.mother_index(cur) != Forest::kNone && f.tau(cur) <= t_max) {
    out.jump_times.push_back(f.tau(cur));
    cur = f.mother_index(cur);
    out.positions.push_back(f.sample().point(cur).x);
  }
}

void sort_walkers(SliceConfig& cfg) {
  std::sort(cfg.walkers.begin(), cfg.walkers.end(),
            [](const SliceWalker& a, const SliceWalker& b) { return lex_less(a.pos, b.pos); });
}

}  // namespace

std::vector<SpaceVec> SliceConfig::occupied() const {
  std::vector<SpaceVec> out;
  out.reserve(walkers.size());
  for (const auto& w : walkers) out.push_back(w.pos);
  return out;
}

Trajectory trajectory(const Forest& forest, std::uint64_t id, double t_max) {
  const std::uint32_t i = forest.require_index(id);
  const Point& p = forest.sample().point(i);
  check_time(forest.sample().window(), t_max, "t_max");
  if (t_max < p.r) throw DomainError("t_max precedes the birth of point " + std::to_string(id));
  Trajectory out;
  out.birth_x = p.x;
  out.birth_r = p.r;
  out.horizon = std::min(t_max, forest.sample().window().time_hi);
  append_chain(forest, i, t_max, out);
  return out;
}

Trajectory probe_trajectory(const Forest& forest, const SpaceVec& x, double t_start,
                            double t_max) {
  const Window& w = forest.sample().window();
  check_time(w, t_start, "t_start");
  check_time(w, t_max, "t_max");
  if (t_max < t_start) throw DomainError("t_max precedes t_start");
  if (!w.contains_space(x)) throw DomainError("probe position lies outside the window");
  Trajectory out;
  out.birth_x = x;
  out.birth_r = t_start;
  out.horizon = std::min(t_max, w.time_hi);
  auto hit = forest.index().first_hit(x, t_start);
  if (hit && hit->tau <= t_max) {
    out.jump_times.push_back(hit->tau);
    out.positions.push_back(forest.sample().point(hit->index).x);
    append_chain(forest, hit->index, t_max, out);
  }
  return out;
}

SliceConfig eta_slice(const Forest& forest, double t) {
  check_time(forest.sample().window(), t, "t");
  SliceConfig cfg;
  cfg.t = t;
  RepMemo rep(forest, t);
  std::unordered_map<std::uint32_t, std::size_t> walker_of_rep;
  for (std::uint32_t i = 0; i < forest.size(); ++i) {
    if (forest.sample().point(i).r > t) continue;
    const std::uint32_t r = rep(i);
    auto [it, inserted] = walker_of_rep.emplace(r, cfg.walkers.size());
    if (inserted) {
      SliceWalker wk;
      wk.pos = forest.sample().point(r).x;
      wk.at_point = forest.sample().point(r).id;
      cfg.walkers.push_back(std::move(wk));
    }
    cfg.walkers[it->second].founders.push_back(forest.sample().point(i).id);
  }
  for (auto& wk : cfg.walkers) std::sort(wk.founders.begin(), wk.founders.end());
  sort_walkers(cfg);
  return cfg;
}

SliceConfig eta_from_initial(const Forest& forest, std::span<const SpaceVec> eta0,
                             double t_start, double t) {
  const Window& w = forest.sample().window();
  check_time(w, t_start, "t_start");
  check_time(w, t, "t");
  if (t < t_start) throw DomainError("t precedes t_start");
  for (const SpaceVec& x : eta0) {
    if (!w.contains_space(x)) throw DomainError("initial walker lies outside the window");
  }

  SliceConfig cfg;
  cfg.t = t;
  RepMemo rep(forest, t);
  std::unordered_map<std::uint32_t, std::size_t> walker_of_rep;
  auto walker_at = [&](std::uint32_t r) -> SliceWalker& {
    auto [it, inserted] = walker_of_rep.emplace(r, cfg.walkers.size());
    if (inserted) {
      SliceWalker wk;
      wk.pos = forest.sample().point(r).x;
      wk.at_point = forest.sample().point(r).id;
      cfg.walkers.push_back(std::move(wk));
    }
    return cfg.walkers[it->second];
  };

  for (std::uint32_t i = 0; i < forest.size(); ++i) {
    const Point& p = forest.sample().point(i);
    if (p.r < t_start || p.r > t) continue;
    walker_at(rep(i)).founders.push_back(p.id);
  }
  // Initial walkers: jump onto the first obstacle after t_start, if any
  // arrives by t; otherwise they still occupy their initial position.
  std::vector<std::pair<SpaceVec, std::uint32_t>> still;
  for (std::uint32_t k = 0; k < eta0.size(); ++k) {
    auto hit = forest.index().first_hit(eta0[k], t_start);
    if (hit && hit->tau <= t) {
      walker_at(rep(hit->index)).initial_walkers.push_back(k);
    } else {
      still.emplace_back(eta0[k], k);
    }
  }
  std::sort(still.begin(), still.end(), [](const auto& a, const auto& b) {
    if (!(a.first == b.first)) return lex_less(a.first, b.first);
    return a.second < b.second;
  });
  for (std::size_t s = 0; s < still.size(); ++s) {
    if (s > 0 && still[s].first == still[s - 1].first) {
      cfg.walkers.back().initial_walkers.push_back(still[s].second);
    } else {
      SliceWalker wk;
      wk.pos = still[s].first;
      wk.initial_walkers.push_back(still[s].second);
      cfg.walkers.push_back(std::move(wk));
    }
  }
  for (auto& wk : cfg.walkers) std::sort(wk.founders.begin(), wk.founders.end());
  sort_walkers(cfg);
  return cfg;
}

namespace {

// Per-axis minimal and maximal distance from coordinate p to the interval
// [a, b], under the window's boundary mode.
struct AxisDist {
  double min2sum = 0.0;
  double max2sum = 0.0;
};

void accumulate_axis(double p, double a, double b, double extent, bool periodic, AxisDist& acc) {
  double dmin = 0.0;
  double dmax = 0.0;
  if (periodic) {
    auto circ = [&](double y) {
      double d = std::abs(y - p);
      if (d > 0.5 * extent) d = extent - d;
      return d;
    };
    const bool inside = (p >= a && p <= b);
    dmin = inside ? 0.0 : std::min(circ(a), circ(b));
    // Farthest interval point from p on the circle: an endpoint, unless the
    // antipode of p lies inside the interval.
    double anti = p + 0.5 * extent;
    if (anti > 0.5 * extent) anti -= extent;  // window coordinates are centered
    dmax = (anti >= a && anti <= b) ? 0.5 * extent : std::max(circ(a), circ(b));
  } else {
    dmin = (p < a) ? a - p : (p > b ? p - b : 0.0);
    dmax = std::max(std::abs(a - p), std::abs(b - p));
  }
  acc.min2sum += dmin * dmin;
  acc.max2sum += dmax * dmax;
}

}  // namespace

DependenceSet dependence_set(const Forest& forest, const SpaceBox& region, double t) {
  const Window& w = forest.sample().window();
  check_time(w, t, "t");
  const int sdim = w.sdim();
  for (int i = 0; i < sdim; ++i) {
    if (!(region.lo[i] <= region.hi[i]) || region.lo[i] < w.space_lo(i) ||
        region.hi[i] > w.space_hi(i)) {
      throw DomainError("region must be a box inside the window");
    }
  }
  const bool periodic = w.boundary == Boundary::Periodic;

  // Conservative cover of the region remainder by small cells.
  std::array<int, kMaxSpaceDim> cells{};
  std::array<double, kMaxSpaceDim> width{};
  double h = 0.05;
  for (;;) {
    double total = 1.0;
    for (int i = 0; i < sdim; ++i) {
      cells[i] = std::max(1, static_cast<int>(std::ceil((region.hi[i] - region.lo[i]) / h)));
      total *= cells[i];
    }
    if (total <= 250000.0) break;
    h *= 2.0;
  }
  std::size_t total_cells = 1;
  for (int i = 0; i < sdim; ++i) {
    width[i] = (region.hi[i] - region.lo[i]) / cells[i];  // 0 on a degenerate axis
    total_cells *= static_cast<std::size_t>(cells[i]);
  }
  std::vector<std::uint8_t> alive(total_cells, 1);
  std::size_t alive_count = total_cells;

  // Points at or before t, newest first.
  std::vector<std::uint32_t> order;
  order.reserve(forest.size());
  for (std::uint32_t i = 0; i < forest.size(); ++i) {
    if (forest.sample().point(i).r <= t) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return time_lex_less(forest.sample().point(b), forest.sample().point(a));
  });

  std::vector<std::uint8_t> recorded(forest.size(), 0);
  std::array<int, kMaxSpaceDim> lo_cell{};
  std::array<int, kMaxSpaceDim> hi_cell{};
  std::array<int, kMaxSpaceDim> pick{};
  for (std::uint32_t i : order) {
    if (alive_count == 0) break;
    const Point& p = forest.sample().point(i);
    // Cells possibly meeting the unit ball around p: indices covering
    // [p-1, p+1] per axis (all cells when the ball wraps far enough).
    bool empty_range = false;
    for (int a = 0; a < sdim; ++a) {
      if (width[a] == 0.0) {
        lo_cell[a] = 0;
        hi_cell[a] = 0;
        continue;
      }
      const int lo = static_cast<int>(std::floor((p.x[a] - 1.0 - region.lo[a]) / width[a]));
      const int hi = static_cast<int>(std::floor((p.x[a] + 1.0 - region.lo[a]) / width[a]));
      if (periodic && (hi - lo + 1) >= cells[a]) {
        lo_cell[a] = 0;
        hi_cell[a] = cells[a] - 1;
      } else if (periodic) {
        lo_cell[a] = lo;  // iterated modulo cells[a]
        hi_cell[a] = hi;
      } else {
        lo_cell[a] = std::max(lo, 0);
        hi_cell[a] = std::min(hi, cells[a] - 1);
        if (lo_cell[a] > hi_cell[a]) empty_range = true;
      }
    }
    if (empty_range) continue;

    bool any_intersect = false;
    pick = lo_cell;
    while (true) {
      std::size_t cell = 0;
      AxisDist acc;
      for (int a = 0; a < sdim; ++a) {
        int c = pick[a];
        if (periodic) c = ((c % cells[a]) + cells[a]) % cells[a];
        cell = cell * static_cast<std::size_t>(cells[a]) + static_cast<std::size_t>(c);
        const double ca = region.lo[a] + c * width[a];
        accumulate_axis(p.x[a], ca, ca + width[a], w.space_extent[a], periodic, acc);
      }
      if (alive[cell]) {
        if (acc.min2sum <= 1.0) any_intersect = true;
        if (acc.max2sum <= 1.0) {
          alive[cell] = 0;
          --alive_count;
        }
      }
      int a = sdim - 1;
      while (a >= 0) {
        if (++pick[a] <= hi_cell[a]) break;
        pick[a] = lo_cell[a];
        --a;
      }
      if (a < 0) break;
    }
    if (any_intersect) recorded[i] = 1;
  }

  // Close under ancestors born at or before t.
  for (std::uint32_t i = 0; i < forest.size(); ++i) {
    if (!recorded[i]) continue;
    std::uint32_t cur = i;
    while (true) {
      const std::uint32_t m = forest.mother_index(cur);
      if (m == Forest::kNone || forest.sample().point(m).r > t || recorded[m]) break;
      recorded[m] = 1;
      cur = m;
    }
  }

  DependenceSet out;
  out.emptied = alive_count == 0;
  for (std::uint32_t i = 0; i < forest.size(); ++i) {
    if (recorded[i]) out.ids.push_back(forest.sample().point(i).id);
  }
  std::sort(out.ids.begin(), out.ids.end());
  return out;
}

std::optional<double> meeting_time(const Forest& forest, std::uint64_t a, std::uint64_t b) {
  std::uint32_t ia = forest.require_index(a);
  std::uint32_t ib = forest.require_index(b);
  std::unordered_set<std::uint32_t> chain_a;
  for (std::uint32_t cur = ia;;) {
    chain_a.insert(cur);
    const std::uint32_t m = forest.mother_index(cur);
    if (m == Forest::kNone) break;
    cur = m;
  }
  for (std::uint32_t cur = ib;;) {
    if (chain_a.count(cur)) return forest.sample().point(cur).r;
    const std::uint32_t m = forest.mother_index(cur);
    if (m == Forest::kNone) return std::nullopt;
    cur = m;
  }
}

SliceConfig backward_surviving(const Forest& forest, double r, double t) {
  const Window& w = forest.sample().window();
  check_time(w, r, "r");
  check_time(w, t, "t");
  if (r > t) throw DomainError("r must not exceed t");
  SliceConfig cfg = eta_slice(forest, t);
  std::vector<SliceWalker> kept;
  for (auto& wk : cfg.walkers) {
    bool survives = false;
    for (std::uint64_t fid : wk.founders) {
      const Point& fp = forest.sample().point(forest.require_index(fid));
      if (fp.r <= r) {
        survives = true;
        break;
      }
    }
    if (survives) kept.push_back(std::move(wk));
  }
  cfg.walkers = std::move(kept);
  return cfg;
}

}  // namespace pforest
