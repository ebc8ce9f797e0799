#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <vector>

#include "fixtures.hpp"
#include "pforest/errors.hpp"
#include "pforest/forest.hpp"
#include "pforest/rng.hpp"
#include "pforest/succession.hpp"

using namespace pforest;
using namespace fixtures;

TEST_CASE("F2: successor walks the branch in preorder") {
  const PointSample s = make_f2();
  const Forest f = Forest::build(s);

  const Resolution sm = successor(f, kM);
  REQUIRE(sm.found());
  CHECK(sm.id == kP);  // eldest daughter

  const Resolution sp = successor(f, kP);
  REQUIRE(sp.found());
  CHECK(sp.id == kQ);  // no daughters; q is p's younger sister

  // q closes the branch; continuing depends on m's unresolved mother
  CHECK(successor(f, kQ).status == ResolutionStatus::UnresolvedAtBoundary);

  CHECK(preorder_oracle(f, kM) == std::vector<std::uint64_t>{kM, kP, kQ});
}

TEST_CASE("F2: predecessor inverts successor") {
  const PointSample s = make_f2();
  const Forest f = Forest::build(s);

  const Resolution pq = predecessor(f, kQ);
  REQUIRE(pq.found());
  CHECK(pq.id == kP);  // youngest elder sister, childless so no descent

  const Resolution pp = predecessor(f, kP);
  REQUIRE(pp.found());
  CHECK(pp.id == kM);  // no elder sister, fall back to the mother

  CHECK(predecessor(f, kM).status == ResolutionStatus::UnresolvedAtBoundary);

  CHECK(check_pointshift_identity(f, kM, 0) == true);
  CHECK(check_pointshift_identity(f, kM, 1) == true);
  CHECK(check_pointshift_identity(f, kM, 2) == true);
}

TEST_CASE("F1: single-file chain") {
  const PointSample s = make_f1();
  const Forest f = Forest::build(s);

  CHECK(successor(f, kC).id == kB);
  CHECK(successor(f, kB).id == kA);
  CHECK(successor(f, kA).status == ResolutionStatus::UnresolvedAtBoundary);
  CHECK(successor(f, kE).status == ResolutionStatus::UnresolvedAtBoundary);

  CHECK(predecessor(f, kA).id == kB);
  CHECK(predecessor(f, kB).id == kC);
  CHECK(predecessor(f, kC).status == ResolutionStatus::UnresolvedAtBoundary);

  CHECK(preorder_oracle(f, kC) == std::vector<std::uint64_t>{kC, kB, kA});
  CHECK(preorder_oracle(f, kE) == std::vector<std::uint64_t>{kE});
}

TEST_CASE("unknown ids resolve to DomainError status") {
  const PointSample s = make_f1();
  const Forest f = Forest::build(s);
  CHECK(successor(f, 999).status == ResolutionStatus::DomainError);
  CHECK(predecessor(f, 999).status == ResolutionStatus::DomainError);
}

TEST_CASE("line labels around an anchor") {
  const PointSample s = make_f2();
  const Forest f = Forest::build(s);

  const SuccessionLabels ln = enumerate_line(f, kM, 0, 2);
  CHECK(ln.anchor == kM);
  CHECK(ln.complete);
  REQUIRE(ln.labels.size() == 3);
  CHECK(ln.labels.at(0) == kM);
  CHECK(ln.labels.at(1) == kP);
  CHECK(ln.labels.at(2) == kQ);

  const SuccessionLabels solo = enumerate_line(f, kQ, 0, 0);
  CHECK(solo.complete);
  CHECK(solo.labels.size() == 1);
  CHECK(solo.labels.at(0) == kQ);

  // asking past the unresolved root stops early and says so
  const SuccessionLabels open_ended = enumerate_line(f, kQ, 3, 1);
  CHECK_FALSE(open_ended.complete);
  CHECK(open_ended.labels.at(-1) == kP);
  CHECK(open_ended.labels.at(-2) == kM);
  CHECK(open_ended.labels.count(-3) == 0);
  CHECK(open_ended.labels.count(1) == 0);

  CHECK_THROWS_AS(enumerate_line(f, 999, 1, 1), DomainError);
}

TEST_CASE("truncated branches refuse a preorder answer") {
  // two-point branch whose root sits within distance 1 of the open boundary
  const Window w = open_window_1d(10.0, 0.0, 2.0);
  const PointSample s = PointSample::create(
      w, 1.0, 0, {{1, vec1(3.8), 0.5}, {2, vec1(4.4), 1.0}}, false);
  const Forest f = Forest::build(s);
  REQUIRE(f.mother_of(1) == 2);
  REQUIRE(f.branch(2).truncated);
  CHECK_THROWS_AS(preorder_oracle(f, 2), DomainError);
}

TEST_CASE("succession agrees with preorder on random periodic samples") {
  SplitRng seeds(925);
  for (int rep = 0; rep < 5; ++rep) {
    Window w;
    w.d = (rep % 2) + 2;
    for (int i = 0; i < w.sdim(); ++i) w.space_extent[i] = w.d == 2 ? 18.0 : 6.0;
    w.time_lo = 0.0;
    w.time_hi = 12.0;
    w.boundary = Boundary::Periodic;
    const PointSample s = sample_poisson(1.0, w, seeds.next());
    const Forest f = Forest::build(s);
    REQUIRE(s.size() > 10);

    for (std::uint64_t root : f.roots()) {
      const std::vector<std::uint64_t> order = preorder_oracle(f, root);

      // successor() reproduces the preorder, one hop at a time
      std::uint64_t cur = root;
      for (std::size_t k = 1; k < order.size(); ++k) {
        const Resolution nx = successor(f, cur);
        REQUIRE(nx.found());
        CHECK(nx.id == order[k]);
        cur = nx.id;
      }
      CHECK(successor(f, cur).status == ResolutionStatus::UnresolvedAtBoundary);

      // predecessor() undoes every step
      for (std::size_t k = order.size(); k-- > 1;) {
        const Resolution bk = predecessor(f, order[k]);
        REQUIRE(bk.found());
        CHECK(bk.id == order[k - 1]);
      }
      CHECK(predecessor(f, root).status == ResolutionStatus::UnresolvedAtBoundary);
    }

    // the shift identity never falsifies
    for (std::uint32_t i = 0; i < s.size(); ++i) {
      for (std::uint64_t n : {1ull, 3ull}) {
        const auto ok = check_pointshift_identity(f, s.point(i).id, n);
        if (ok.has_value()) CHECK(*ok);
      }
    }
  }
}
