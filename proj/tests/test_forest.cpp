#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "fixtures.hpp"
#include "pforest/errors.hpp"
#include "pforest/forest.hpp"
#include "pforest/point.hpp"
#include "pforest/rng.hpp"

using namespace pforest;
using namespace fixtures;

namespace {

// Reference mother: scan every point, keep the time-lex-first one strictly
// later than p and within closed unit distance.
std::optional<std::uint64_t> brute_mother(const PointSample& s, std::uint32_t i) {
  const Point& p = s.point(static_cast<std::uint32_t>(i));
  const Point* best = nullptr;
  for (std::uint32_t j = 0; j < s.size(); ++j) {
    const Point& q = s.point(j);
    if (!time_lex_less(p, q)) continue;
    if (dist2(p.x, q.x, s.window()) > 1.0) continue;
    if (best == nullptr || time_lex_less(q, *best)) best = &q;
  }
  if (best == nullptr) return std::nullopt;
  return best->id;
}

Window random_window(int d, double extent, Boundary b) {
  Window w;
  w.d = d;
  for (int i = 0; i < d - 1; ++i) w.space_extent[i] = extent;
  w.time_lo = 0.0;
  w.time_hi = 10.0;
  w.boundary = b;
  return w;
}

}  // namespace

TEST_CASE("F1: chain a -> b -> c with isolated e") {
  const PointSample s = make_f1();
  const Forest f = Forest::build(s);

  CHECK(f.mother_of(kA) == kB);
  CHECK(f.tau_of(kA) == 1.0);
  CHECK(f.mother_of(kB) == kC);
  CHECK(f.tau_of(kB) == 2.0);
  CHECK_FALSE(f.mother_of(kC).has_value());
  CHECK_FALSE(f.mother_of(kE).has_value());
  CHECK_FALSE(f.tau_of(kE).has_value());

  CHECK(f.roots() == std::vector<std::uint64_t>{kE, kC});
  CHECK(f.unresolved_fraction() == 0.5);

  CHECK(f.daughters(kB) == std::vector<std::uint64_t>{kA});
  CHECK(f.daughters(kC) == std::vector<std::uint64_t>{kB});
  CHECK(f.daughters(kE).empty());

  CHECK(f.ancestor(kA, 0) == kA);
  CHECK(f.ancestor(kA, 1) == kB);
  CHECK(f.ancestor(kA, 2) == kC);
  CHECK_FALSE(f.ancestor(kA, 3).has_value());
  CHECK_FALSE(f.ancestor(kE, 1).has_value());

  CHECK(f.component_of(kA) == f.component_of(kC));
  CHECK(f.component_of(kE) != f.component_of(kA));
  const auto cs = f.components();
  CHECK(cs.count == 2);
  CHECK(cs.sizes == std::vector<std::size_t>{3, 1});
  CHECK(cs.largest_fraction == 0.75);
}

TEST_CASE("F1: branch enumeration") {
  const PointSample s = make_f1();
  const Forest f = Forest::build(s);

  const auto br = f.branch(kC);
  REQUIRE(br.members.size() == 3);
  CHECK(br.members[0].id == kC);
  CHECK(br.members[0].generation == 0);
  CHECK(br.members[1].id == kB);
  CHECK(br.members[1].generation == 1);
  CHECK(br.members[2].id == kA);
  CHECK(br.members[2].generation == 2);
  CHECK_FALSE(br.truncated);

  const auto leaf = f.branch(kA);
  REQUIRE(leaf.members.size() == 1);
  CHECK(leaf.members[0].id == kA);
  CHECK(leaf.members[0].generation == 0);

  CHECK_THROWS_AS(f.branch(999), DomainError);
}

TEST_CASE("F2: sister order and ranks") {
  const PointSample s = make_f2();
  const Forest f = Forest::build(s);

  CHECK(f.mother_of(kQ) == kM);  // p is 1.2 away from q, too far to mother it
  CHECK(f.mother_of(kP) == kM);
  CHECK(f.daughters(kM) == std::vector<std::uint64_t>{kP, kQ});
  CHECK(f.sister_rank(kP) == 1);
  CHECK(f.sister_rank(kQ) == 2);
  CHECK_THROWS_AS(f.sister_rank(kM), DomainError);

  CHECK(f.roots() == std::vector<std::uint64_t>{kM});
  const auto cs = f.components();
  CHECK(cs.count == 1);
  CHECK(cs.largest_fraction == 1.0);
}

TEST_CASE("distance exactly one still links (closed ball)") {
  const Window w = open_window_1d(10.0, 0.0, 2.0);
  const PointSample s = PointSample::create(
      w, 1.0, 0, {{1, vec1(0.0), 0.0}, {2, vec1(1.0), 1.0}}, false);
  const Forest f = Forest::build(s);
  CHECK(f.mother_of(1) == 2);
}

TEST_CASE("open-boundary branches are flagged near the boundary") {
  const Window w = open_window_1d(10.0, 0.0, 2.0);
  const PointSample s = PointSample::create(
      w, 1.0, 0, {{1, vec1(4.5), 0.0}, {2, vec1(0.0), 1.0}}, false);
  const Forest f = Forest::build(s);
  CHECK(f.branch(1).truncated);        // 0.5 from the space boundary
  CHECK_FALSE(f.branch(2).truncated);  // 5.0 from the space boundary
}

TEST_CASE("degenerate samples") {
  const Window w = open_window_1d(10.0, 0.0, 1.0);
  const PointSample none = PointSample::create(w, 1.0, 0, {}, false);
  const Forest empty = Forest::build(none);
  CHECK(empty.size() == 0);
  CHECK(empty.roots().empty());
  CHECK(empty.unresolved_fraction() == 0.0);
  CHECK(empty.components().count == 0);

  // two far-apart points: no edges, everyone is a root
  const PointSample s = PointSample::create(
      w, 1.0, 0, {{1, vec1(-4.0), 0.1}, {2, vec1(4.0), 0.2}}, false);
  const Forest f = Forest::build(s);
  CHECK(f.roots().size() == 2);
  CHECK(f.unresolved_fraction() == 1.0);

  CHECK_THROWS_AS(f.mother_of(77), DomainError);
}

TEST_CASE("grid construction matches the quadratic scan") {
  SplitRng seeds(314);
  for (int d : {2, 3}) {
    for (Boundary b : {Boundary::Periodic, Boundary::Open}) {
      for (int rep = 0; rep < 4; ++rep) {
        const Window w = random_window(d, d == 2 ? 30.0 : 7.0, b);
        const PointSample s = sample_poisson(1.0, w, seeds.next());
        const Forest f = Forest::build(s);
        for (std::uint32_t i = 0; i < s.size(); ++i) {
          const auto expect = brute_mother(s, i);
          CHECK(f.mother_of(s.point(i).id) == expect);
        }
      }
    }
  }
}

TEST_CASE("structural invariants on random samples") {
  SplitRng seeds(2718);
  for (Boundary b : {Boundary::Periodic, Boundary::Open}) {
    const Window w = random_window(3, 8.0, b);
    const PointSample s = sample_poisson(1.0, w, seeds.next());
    const Forest f = Forest::build(s);
    REQUIRE(s.size() > 10);

    std::size_t edges = 0;
    std::size_t children_total = 0;
    for (std::uint32_t i = 0; i < s.size(); ++i) {
      const Point& p = s.point(i);
      const auto m = f.mother_of(p.id);
      if (m.has_value()) {
        ++edges;
        const auto mi = *s.index_of(*m);
        const Point& mp = s.point(mi);
        CHECK(time_lex_less(p, mp));
        CHECK(dist2(p.x, mp.x, w) <= 1.0);
        CHECK(f.tau_of(p.id) == mp.r);
        // the daughter list of the mother contains p exactly once
        const auto ds = f.daughters(*m);
        CHECK(std::count(ds.begin(), ds.end(), p.id) == 1);
        CHECK(f.sister_rank(p.id) >= 1);
        CHECK(f.sister_rank(p.id) <= ds.size());
        CHECK(ds[f.sister_rank(p.id) - 1] == p.id);
        CHECK(f.component_of(p.id) == f.component_of(*m));
      }

      // daughters are sorted by ascending first space coordinate
      const auto ds = f.daughters(p.id);
      children_total += ds.size();
      for (std::size_t k = 1; k < ds.size(); ++k) {
        const Point& u = s.point(*s.index_of(ds[k - 1]));
        const Point& v = s.point(*s.index_of(ds[k]));
        CHECK(u.x[0] <= v.x[0]);
      }
    }
    CHECK(edges == s.size() - f.roots().size());
    CHECK(children_total == edges);

    // component sizes partition the sample
    const auto cs = f.components();
    std::size_t total = 0;
    for (std::size_t k = 0; k < cs.sizes.size(); ++k) {
      total += cs.sizes[k];
      if (k > 0) CHECK(cs.sizes[k - 1] >= cs.sizes[k]);
    }
    CHECK(total == s.size());
    CHECK(cs.count == cs.sizes.size());

    // ancestor times increase strictly along any chain
    for (std::uint32_t i = 0; i < std::min<std::size_t>(s.size(), 50); ++i) {
      std::uint64_t cur = s.point(i).id;
      double last_r = s.point(i).r;
      for (std::uint64_t n = 1;; ++n) {
        const auto up = f.ancestor(s.point(i).id, n);
        if (!up.has_value()) break;
        const Point& q = s.point(*s.index_of(*up));
        CHECK(q.r > last_r);
        last_r = q.r;
        cur = *up;
      }
      CHECK(std::find(f.roots().begin(), f.roots().end(), cur) != f.roots().end());
    }
  }
}

TEST_CASE("build is deterministic") {
  const Window w = random_window(2, 25.0, Boundary::Periodic);
  const PointSample s = sample_poisson(1.0, w, 64);
  const Forest f1 = Forest::build(s);
  const Forest f2 = Forest::build(s);
  REQUIRE(f1.size() == f2.size());
  for (std::uint32_t i = 0; i < f1.size(); ++i) {
    CHECK(f1.mother_index(i) == f2.mother_index(i));
  }
  CHECK(f1.roots() == f2.roots());
}
