#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "fixtures.hpp"
#include "pforest/errors.hpp"
#include "pforest/forest.hpp"
#include "pforest/rng.hpp"
#include "pforest/walks.hpp"

using namespace pforest;
using namespace fixtures;

namespace {

std::multiset<double> first_coords_in(const SliceConfig& cfg, double lo, double hi) {
  std::multiset<double> out;
  for (const SliceWalker& w : cfg.walkers) {
    if (w.pos[0] >= lo && w.pos[0] <= hi) out.insert(w.pos[0]);
  }
  return out;
}

}  // namespace

TEST_CASE("F1 trajectories follow the ancestor chain") {
  const PointSample s = make_f1();
  const Forest f = Forest::build(s);

  const Trajectory ta = trajectory(f, kA, 2.5);
  CHECK(ta.birth_x[0] == 0.0);
  CHECK(ta.birth_r == 0.0);
  REQUIRE(ta.jump_times == std::vector<double>{1.0, 2.0});
  REQUIRE(ta.positions.size() == 2);
  CHECK(ta.positions[0][0] == 0.5);
  CHECK(ta.positions[1][0] == 1.2);
  CHECK(ta.horizon == 2.5);

  // cutting the horizon drops later jumps
  const Trajectory ta_short = trajectory(f, kA, 1.5);
  CHECK(ta_short.jump_times == std::vector<double>{1.0});

  // a walk observed at its own birth has gone nowhere
  const Trajectory ta0 = trajectory(f, kA, 0.0);
  CHECK(ta0.jump_times.empty());
  CHECK(ta0.horizon == 0.0);

  // nothing ever comes within distance 1 of e
  const Trajectory te = trajectory(f, kE, 2.5);
  CHECK(te.jump_times.empty());

  CHECK_THROWS_AS(trajectory(f, kA, 3.5), DomainError);   // beyond the window
  CHECK_THROWS_AS(trajectory(f, kC, 1.0), DomainError);   // before c's birth
  CHECK_THROWS_AS(trajectory(f, 999, 2.0), DomainError);  // unknown id
}

TEST_CASE("F1 meeting times") {
  const PointSample s = make_f1();
  const Forest f = Forest::build(s);

  CHECK(meeting_time(f, kA, kB) == 1.0);  // a jumps onto b at b's birth
  CHECK(meeting_time(f, kA, kC) == 2.0);  // first shared chain point is c
  CHECK(meeting_time(f, kB, kC) == 2.0);
  CHECK(meeting_time(f, kA, kA) == 0.0);  // a walk meets itself at birth
  CHECK_FALSE(meeting_time(f, kA, kE).has_value());
  CHECK(meeting_time(f, kA, kB) == meeting_time(f, kB, kA));
  CHECK_THROWS_AS(meeting_time(f, kA, 999), DomainError);
}

TEST_CASE("F1 slices coalesce by shared ancestry") {
  const PointSample s = make_f1();
  const Forest f = Forest::build(s);

  const SliceConfig before = eta_slice(f, 0.25);
  REQUIRE(before.walker_count() == 1);  // only a is born
  CHECK(before.walkers[0].pos[0] == 0.0);
  CHECK(before.walkers[0].at_point == kA);

  const SliceConfig mid = eta_slice(f, 1.5);
  REQUIRE(mid.walker_count() == 2);  // {a,b} share b's position; e sits alone
  CHECK(mid.walkers[0].pos[0] == 0.5);
  CHECK(mid.walkers[0].at_point == kB);
  CHECK(mid.walkers[0].founders == std::vector<std::uint64_t>{kA, kB});
  CHECK(mid.walkers[1].pos[0] == 3.0);
  CHECK(mid.walkers[1].founders == std::vector<std::uint64_t>{kE});

  const SliceConfig late = eta_slice(f, 2.0);
  REQUIRE(late.walker_count() == 2);
  CHECK(late.walkers[0].pos[0] == 1.2);
  CHECK(late.walkers[0].at_point == kC);
  CHECK(late.walkers[0].founders == std::vector<std::uint64_t>{kA, kB, kC});
  CHECK(late.walkers[1].at_point == kE);

  CHECK_THROWS_AS(eta_slice(f, -1.0), DomainError);
  CHECK_THROWS_AS(eta_slice(f, 3.0), DomainError);
}

TEST_CASE("F1 backward-surviving slice") {
  const PointSample s = make_f1();
  const Forest f = Forest::build(s);

  const SliceConfig alive = backward_surviving(f, 0.25, 2.0);
  REQUIRE(alive.walker_count() == 1);  // only the walker founded by a survives to r
  CHECK(alive.walkers[0].pos[0] == 1.2);

  // r just below t keeps exactly the walkers with a founder born by then
  const SliceConfig all = backward_surviving(f, 2.0, 2.0);
  CHECK(all.walker_count() == eta_slice(f, 2.0).walker_count());

  // monotone in r
  std::size_t last = 0;
  for (double r : {0.0, 0.25, 0.75, 1.5, 2.0}) {
    const std::size_t n = backward_surviving(f, r, 2.0).walker_count();
    CHECK(n >= last);
    last = n;
  }

  CHECK_THROWS_AS(backward_surviving(f, 1.0, 0.5), DomainError);  // r > t
}

TEST_CASE("restart from an empty configuration reproduces the slice") {
  SplitRng seeds(1123);
  for (int rep = 0; rep < 3; ++rep) {
    Window w;
    w.d = 2;
    w.space_extent[0] = 14.0;
    w.time_lo = -2.0;
    w.time_hi = 8.0;
    w.boundary = rep == 0 ? Boundary::Open : Boundary::Periodic;
    const PointSample s = sample_poisson(1.0, w, seeds.next());
    const Forest f = Forest::build(s);
    REQUIRE(s.size() > 5);

    for (double t : {-2.0, 0.5, 8.0}) {
      const SliceConfig direct = eta_slice(f, t);
      const SliceConfig restarted = eta_from_initial(f, {}, w.time_lo, t);
      REQUIRE(direct.walker_count() == restarted.walker_count());
      for (std::size_t k = 0; k < direct.walkers.size(); ++k) {
        CHECK(direct.walkers[k].pos == restarted.walkers[k].pos);
        CHECK(direct.walkers[k].at_point == restarted.walkers[k].at_point);
        CHECK(direct.walkers[k].founders == restarted.walkers[k].founders);
        CHECK(restarted.walkers[k].initial_walkers.empty());
      }

      // walker count never exceeds the number of points born by t
      std::size_t born = 0;
      for (std::uint32_t i = 0; i < s.size(); ++i) born += s.point(i).r <= t ? 1 : 0;
      CHECK(direct.walker_count() <= born);
    }
  }
}

TEST_CASE("initial walkers stand still until captured") {
  // empty sample: nothing can capture the walkers
  const Window w = open_window_1d(10.0, 0.0, 4.0);
  const PointSample empty = PointSample::create(w, 1.0, 0, {}, false);
  const Forest f = Forest::build(empty);
  std::vector<SpaceVec> eta0 = {vec1(-2.0), vec1(1.5)};
  const SliceConfig cfg = eta_from_initial(f, eta0, 0.0, 4.0);
  REQUIRE(cfg.walker_count() == 2);
  CHECK(cfg.walkers[0].pos[0] == -2.0);
  CHECK(cfg.walkers[0].initial_walkers == std::vector<std::uint32_t>{0});
  CHECK_FALSE(cfg.walkers[0].at_point.has_value());
  CHECK(cfg.walkers[1].pos[0] == 1.5);

  // a walker placed on a's position in F1 follows a's walk and coalesces
  const PointSample f1 = make_f1();
  const Forest ff1 = Forest::build(f1);
  std::vector<SpaceVec> on_a = {vec1(0.3)};
  const SliceConfig tracked = eta_from_initial(ff1, on_a, 0.0, 2.0);
  bool found = false;
  for (const SliceWalker& wk : tracked.walkers) {
    if (!wk.initial_walkers.empty()) {
      found = true;
      CHECK(wk.pos[0] == 1.2);  // captured by b at 1.0, then carried to c
      CHECK(wk.at_point == kC);
    }
  }
  CHECK(found);
}

TEST_CASE("distant clusters do not interact") {
  const Window w = open_window_1d(20.0, 0.0, 4.0);
  const std::vector<Point> cluster_a = {
      {1, vec1(-6.0), 1.0}, {2, vec1(-5.5), 2.0}, {3, vec1(-6.3), 3.0}};
  const std::vector<Point> cluster_b = {
      {4, vec1(6.0), 0.5}, {5, vec1(5.7), 1.5}, {6, vec1(6.4), 2.5}};
  std::vector<Point> both = cluster_a;
  both.insert(both.end(), cluster_b.begin(), cluster_b.end());
  std::sort(both.begin(), both.end(), [](const Point& x, const Point& y) { return x.r < y.r; });

  const PointSample sa = PointSample::create(w, 1.0, 0, cluster_a, false);
  const Forest fa = Forest::build(sa);
  const PointSample sboth = PointSample::create(w, 1.0, 0, both, false);
  const Forest fboth = Forest::build(sboth);

  const Trajectory lone = probe_trajectory(fa, vec1(-6.2), 0.0, 4.0);
  const Trajectory joint = probe_trajectory(fboth, vec1(-6.2), 0.0, 4.0);
  REQUIRE(lone.jump_times == std::vector<double>{1.0, 2.0, 3.0});
  REQUIRE(joint.jump_times == lone.jump_times);
  for (std::size_t k = 0; k < lone.positions.size(); ++k) {
    CHECK(joint.positions[k] == lone.positions[k]);
  }

  // a probe in the empty middle never moves
  const Trajectory still = probe_trajectory(fboth, vec1(0.0), 0.0, 4.0);
  CHECK(still.jump_times.empty());

  CHECK_THROWS_AS(probe_trajectory(fboth, vec1(30.0), 0.0, 4.0), DomainError);
}

TEST_CASE("jumps never exceed unit length") {
  Window w;
  w.d = 3;
  w.space_extent[0] = w.space_extent[1] = 6.0;
  w.time_lo = 0.0;
  w.time_hi = 8.0;
  w.boundary = Boundary::Periodic;
  const PointSample s = sample_poisson(1.0, w, 4242);
  const Forest f = Forest::build(s);
  REQUIRE(s.size() > 20);
  for (std::uint32_t i = 0; i < std::min<std::size_t>(s.size(), 60); ++i) {
    const Trajectory tr = trajectory(f, s.point(i).id, 8.0);
    SpaceVec prev = tr.birth_x;
    for (std::size_t k = 0; k < tr.positions.size(); ++k) {
      CHECK(dist2(prev, tr.positions[k], w) <= 1.0 + 1e-12);
      if (k > 0) CHECK(tr.jump_times[k] > tr.jump_times[k - 1]);
      prev = tr.positions[k];
    }
  }
}

TEST_CASE("dependence set certifies the slice content of a region") {
  SplitRng seeds(5150);
  int emptied_seen = 0;
  for (int rep = 0; rep < 4; ++rep) {
    Window w;
    w.d = 2;
    w.space_extent[0] = 12.0;
    w.time_lo = 0.0;
    w.time_hi = 12.0;
    w.boundary = Boundary::Periodic;
    const PointSample s = sample_poisson(1.0, w, seeds.next());
    const Forest f = Forest::build(s);

    SpaceBox region;
    region.lo = vec1(-1.0);
    region.hi = vec1(1.0);
    const double t = w.time_hi;
    const DependenceSet dep = dependence_set(f, region, t);
    CHECK(std::is_sorted(dep.ids.begin(), dep.ids.end()));
    for (std::uint64_t id : dep.ids) CHECK(s.index_of(id).has_value());

    if (dep.emptied) {
      ++emptied_seen;
      // the recorded points alone reproduce the region's occupied positions
      std::vector<Point> kept;
      for (std::uint64_t id : dep.ids) kept.push_back(s.point(*s.index_of(id)));
      const PointSample sub = PointSample::create(w, s.rate(), s.seed(), kept, false);
      const Forest fsub = Forest::build(sub);
      CHECK(first_coords_in(eta_slice(f, t), -1.0, 1.0) ==
            first_coords_in(eta_slice(fsub, t), -1.0, 1.0));
    }
  }
  // rate 1 over 12 time units saturates a 2-unit interval with high margin
  CHECK(emptied_seen == 4);

  // an empty sample can never empty the region
  const Window w = open_window_1d(10.0, 0.0, 1.0);
  const PointSample none = PointSample::create(w, 1.0, 0, {}, false);
  const Forest f = Forest::build(none);
  SpaceBox region;
  region.lo = vec1(-1.0);
  region.hi = vec1(1.0);
  const DependenceSet dep = dependence_set(f, region, 1.0);
  CHECK(dep.ids.empty());
  CHECK_FALSE(dep.emptied);

  SpaceBox bad;
  bad.lo = vec1(-1.0);
  bad.hi = vec1(50.0);
  CHECK_THROWS_AS(dependence_set(f, bad, 1.0), DomainError);
}

TEST_CASE("meeting time equals the first common trajectory point") {
  // cross-check meeting_time against direct trajectory comparison
  Window w;
  w.d = 2;
  w.space_extent[0] = 16.0;
  w.time_lo = 0.0;
  w.time_hi = 10.0;
  w.boundary = Boundary::Periodic;
  const PointSample s = sample_poisson(1.0, w, 777);
  const Forest f = Forest::build(s);
  REQUIRE(s.size() > 30);

  std::size_t met = 0;
  for (std::uint32_t i = 0; i + 1 < std::min<std::size_t>(s.size(), 40); i += 2) {
    const std::uint64_t a = s.point(i).id;
    const std::uint64_t b = s.point(i + 1).id;
    const auto tm = meeting_time(f, a, b);
    const Trajectory ta = trajectory(f, a, w.time_hi);
    const Trajectory tb = trajectory(f, b, w.time_hi);
    const auto pos_at = [&w](const Trajectory& tr, double t) {
      SpaceVec p = tr.birth_x;
      for (std::size_t k = 0; k < tr.jump_times.size() && tr.jump_times[k] <= t; ++k) {
        p = tr.positions[k];
      }
      (void)w;
      return p;
    };
    if (tm.has_value()) {
      ++met;
      REQUIRE(*tm >= std::max(s.point(i).r, s.point(i + 1).r));
      CHECK(pos_at(ta, *tm) == pos_at(tb, *tm));
      // strictly before the meeting the walks are apart (sample a midpoint)
      const double before = 0.5 * (std::max(s.point(i).r, s.point(i + 1).r) + *tm);
      if (before < *tm) {
        CHECK_FALSE(pos_at(ta, before) == pos_at(tb, before));
      }
    } else {
      CHECK_FALSE(pos_at(ta, w.time_hi) == pos_at(tb, w.time_hi));
    }
  }
  CHECK(met > 0);  // dense sample over 10 time units: some pairs must meet
}
