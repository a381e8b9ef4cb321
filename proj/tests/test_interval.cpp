// Exact interval dynamics: tent-map evaluation and preimages, first-hit
// competitions with cycle detection, backward-orbit density, and construction
// of points realizing prescribed winner schedules.
#include <doctest.h>

#include <random>
#include <vector>

#include "odesc/interval.hpp"

using namespace odesc;

namespace {

Rational rat(long long num, long long den = 1) {
  return Rational(BigInt(num), BigInt(den));
}

IntervalHole hole_at(long long num, long long den, const Rational& c,
                     const Rational& lambda) {
  return IntervalHole{rat(num, den), RadiusSchedule::geometric(c, lambda)};
}

// The two reference holes used throughout: centers 2/5 and 2/7, radii
// (1/7) * 2^-n. Small enough that the orbit of 1/5 reaches the first hole
// (it passes through 2/5 exactly) but never the second.
std::vector<IntervalHole> reference_holes() {
  return {hole_at(2, 5, rat(1, 7), rat(1, 2)),
          hole_at(2, 7, rat(1, 7), rat(1, 2))};
}

}  // namespace

TEST_CASE("tent map evaluates exactly") {
  const auto tent = PiecewiseAffineMap::tent();
  CHECK(evaluate(tent, rat(0)) == rat(0));
  CHECK(evaluate(tent, rat(1)) == rat(0));
  CHECK(evaluate(tent, rat(1, 2)) == rat(1));
  CHECK(evaluate(tent, rat(1, 3)) == rat(2, 3));
  CHECK(evaluate(tent, rat(3, 4)) == rat(1, 2));
  CHECK(evaluate(tent, rat(2, 5)) == rat(4, 5));
  CHECK(evaluate(tent, rat(4, 5)) == rat(2, 5));
  CHECK_THROWS_AS(evaluate(tent, rat(-1, 2)), UsageError);
  CHECK_THROWS_AS(evaluate(tent, rat(3, 2)), UsageError);

  // 1 - |2x - 1| cross-check on a grid.
  for (int p = 0; p <= 40; ++p) {
    const Rational x = rat(p, 40);
    const Rational two_x_minus_1 = 2 * x - 1;
    const Rational expected =
        1 - (two_x_minus_1 < 0 ? -two_x_minus_1 : two_x_minus_1);
    CHECK(evaluate(tent, x) == expected);
  }
}

TEST_CASE("map construction rejects malformed data") {
  using V = std::vector<Rational>;
  CHECK_THROWS_AS(PiecewiseAffineMap(V{rat(0)}, V{rat(0)}), UsageError);
  CHECK_THROWS_AS(PiecewiseAffineMap(V{rat(0), rat(1)}, V{rat(0)}),
                  UsageError);
  CHECK_THROWS_AS(
      PiecewiseAffineMap(V{rat(1, 4), rat(1)}, V{rat(0), rat(0)}), UsageError);
  CHECK_THROWS_AS(
      PiecewiseAffineMap(V{rat(0), rat(1, 2)}, V{rat(0), rat(0)}), UsageError);
  CHECK_THROWS_AS(PiecewiseAffineMap(V{rat(0), rat(1, 2), rat(1, 2), rat(1)},
                                     V{rat(0), rat(1), rat(1), rat(0)}),
                  UsageError);
  CHECK_THROWS_AS(
      PiecewiseAffineMap(V{rat(0), rat(1)}, V{rat(0), rat(3, 2)}), UsageError);

  const PiecewiseAffineMap zigzag(V{rat(0), rat(1, 4), rat(3, 4), rat(1)},
                                  V{rat(1, 2), rat(0), rat(1), rat(1, 3)});
  CHECK(evaluate(zigzag, rat(0)) == rat(1, 2));
  CHECK(evaluate(zigzag, rat(1, 4)) == rat(0));
  CHECK(evaluate(zigzag, rat(3, 4)) == rat(1));
  CHECK(evaluate(zigzag, rat(1)) == rat(1, 3));
  CHECK(evaluate(zigzag, rat(1, 2)) == rat(1, 2));
}

TEST_CASE("preimages solve each branch exactly") {
  const auto tent = PiecewiseAffineMap::tent();
  CHECK(preimages(tent, rat(1, 2)) ==
        std::vector<Rational>{rat(1, 4), rat(3, 4)});
  CHECK(preimages(tent, rat(1)) == std::vector<Rational>{rat(1, 2)});
  CHECK(preimages(tent, rat(0)) == std::vector<Rational>{rat(0), rat(1)});
  CHECK(preimages(tent, rat(2, 3)) ==
        std::vector<Rational>{rat(1, 3), rat(2, 3)});
  CHECK_THROWS_AS(preimages(tent, rat(5, 4)), UsageError);

  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const long long den = 2 + static_cast<long long>(rng() % 49);
    const long long num = static_cast<long long>(rng() % (den + 1));
    const Rational y = rat(num, den);
    const auto pre = preimages(tent, y);
    CHECK(!pre.empty());
    CHECK(pre.size() <= 2);
    for (std::size_t i = 0; i < pre.size(); ++i) {
      CHECK(evaluate(tent, pre[i]) == y);
      if (i > 0) CHECK(pre[i - 1] < pre[i]);
    }
  }

  // A plateau whose height is queried has a continuum of preimages.
  const PiecewiseAffineMap plateau(
      {rat(0), rat(1, 4), rat(3, 4), rat(1)},
      {rat(0), rat(1, 2), rat(1, 2), rat(1)});
  CHECK_THROWS_AS(preimages(plateau, rat(1, 2)), UsageError);
  CHECK(preimages(plateau, rat(1, 4)) == std::vector<Rational>{rat(1, 8)});
}

TEST_CASE("first hits detect cycles within the denominator bound") {
  const auto tent = PiecewiseAffineMap::tent();

  // Orbit of 1/5: 1/5 -> 2/5 -> 4/5 -> 2/5 -> ...
  CHECK(first_hit_interval(tent, rat(1, 5),
                           OpenInterval{rat(7, 20), rat(9, 20)}, 10) ==
        HitOutcome::hit(1));
  CHECK(first_hit_interval(tent, rat(2, 5),
                           OpenInterval{rat(7, 20), rat(9, 20)}, 10) ==
        HitOutcome::hit(0));
  CHECK(first_hit_interval(tent, rat(1, 5),
                           OpenInterval{rat(9, 10), rat(19, 20)}, 2) ==
        HitOutcome::undecided());
  CHECK(first_hit_interval(tent, rat(1, 5),
                           OpenInterval{rat(9, 10), rat(19, 20)}, 3) ==
        HitOutcome::never());
  CHECK(first_hit_interval(tent, rat(1, 5),
                           OpenInterval{rat(9, 10), rat(19, 20)}, 100) ==
        HitOutcome::never());
  CHECK(first_hit_interval(tent, rat(0), OpenInterval{rat(1, 3), rat(2, 3)},
                           5) == HitOutcome::never());
  CHECK_THROWS_AS(first_hit_interval(tent, rat(2), OpenInterval{rat(0), rat(1)},
                                     5),
                  UsageError);

  // The tent map never grows denominators, so horizon q+2 always decides.
  std::mt19937_64 rng(77);
  const OpenInterval hole{rat(1, 3), rat(2, 3)};
  for (int trial = 0; trial < 60; ++trial) {
    const long long den = 2 + static_cast<long long>(rng() % 399);
    const long long num = static_cast<long long>(rng() % (den + 1));
    const auto out = first_hit_interval(
        tent, rat(num, den), hole, static_cast<std::uint64_t>(den) + 2);
    CHECK(out.kind != HitOutcome::Kind::Undecided);
  }
}

TEST_CASE("hole intervals follow the radius schedule") {
  const IntervalHole hole = hole_at(2, 5, rat(1), rat(1, 2));
  const OpenInterval b1 = hole_interval(hole, 1);
  CHECK(b1.lo == rat(-1, 10));
  CHECK(b1.hi == rat(9, 10));
  const OpenInterval b3 = hole_interval(hole, 3);
  CHECK(b3.lo == rat(11, 40));
  CHECK(b3.hi == rat(21, 40));
  CHECK(b3.contains(rat(2, 5)));
  CHECK(!b3.contains(rat(21, 40)));

  CHECK_THROWS_AS(
      hole_interval(IntervalHole{rat(0), hole.radius}, 1), UsageError);
  CHECK_THROWS_AS(
      hole_interval(IntervalHole{rat(1), hole.radius}, 1), UsageError);
}

TEST_CASE("winner selection treats NeverHits as infinity") {
  using H = HitOutcome;
  CHECK(interval_winner_of({H::hit(3), H::hit(5)}) == 1);
  CHECK(interval_winner_of({H::hit(5), H::hit(3)}) == 2);
  CHECK(interval_winner_of({H::hit(4), H::hit(4)}) == 0);
  CHECK(interval_winner_of({H::never(), H::hit(2)}) == 2);
  CHECK(interval_winner_of({H::never(), H::never()}) == 0);
  CHECK(interval_winner_of({H::hit(0)}) == 1);
  CHECK(interval_winner_of({H::never()}) == 0);
  CHECK(interval_winner_of({H::undecided(), H::hit(0)}) == 0);
  CHECK(interval_winner_of({H::hit(5), H::hit(3), H::hit(3), H::hit(2)}) == 4);
  CHECK_THROWS_AS(interval_winner_of({}), UsageError);
}

TEST_CASE("winner trace separates close centers at small radii") {
  const auto tent = PiecewiseAffineMap::tent();
  const auto holes = reference_holes();
  const auto trace = interval_winner_trace(tent, holes, rat(1, 5), 3, 50);
  REQUIRE(trace.rows.size() == 3);
  for (const auto& row : trace.rows) {
    CHECK(!row.indeterminate);
    CHECK(!row.degenerate);
    CHECK(row.winner == 1);
    CHECK(row.outcomes[0] == HitOutcome::hit(1));
    CHECK(row.outcomes[1] == HitOutcome::never());
  }
  // At scale 1 the radii (1/14) are just wide enough that the holes overlap;
  // from scale 2 on they are disjoint.
  CHECK(trace.rows[0].overlap);
  CHECK(!trace.rows[1].overlap);
  CHECK(!trace.rows[2].overlap);

  const auto stats = interval_indecisiveness_stats(trace);
  CHECK(stats.wins == std::vector<std::uint64_t>{3, 0});
  CHECK(stats.undecided == 0);
  CHECK(stats.switch_count == 0);
  CHECK(!stats.h_indecisive(1));
}

TEST_CASE("wide radii flip the same competition") {
  // With radii 2^-n instead, the point 1/5 sits inside both holes at scales
  // 1 and 2 (ties) and inside only the second at scale 3, which it then wins.
  const auto tent = PiecewiseAffineMap::tent();
  const std::vector<IntervalHole> holes = {hole_at(2, 5, rat(1), rat(1, 2)),
                                           hole_at(2, 7, rat(1), rat(1, 2))};
  const auto trace = interval_winner_trace(tent, holes, rat(1, 5), 3, 50);
  REQUIRE(trace.rows.size() == 3);
  CHECK(trace.rows[0].winner == 0);
  CHECK(trace.rows[0].outcomes[0] == HitOutcome::hit(0));
  CHECK(trace.rows[0].outcomes[1] == HitOutcome::hit(0));
  CHECK(trace.rows[1].winner == 0);
  CHECK(trace.rows[2].winner == 2);
  CHECK(trace.rows[2].outcomes[0] == HitOutcome::hit(1));
  CHECK(trace.rows[2].outcomes[1] == HitOutcome::hit(0));

  const auto stats = interval_indecisiveness_stats(trace);
  CHECK(stats.wins == std::vector<std::uint64_t>{0, 1});
  CHECK(stats.undecided == 2);
  CHECK(stats.switch_count == 0);
}

TEST_CASE("trace validates its hole system") {
  const auto tent = PiecewiseAffineMap::tent();
  CHECK_THROWS_AS(interval_winner_trace(tent, {}, rat(1, 5), 3, 50),
                  UsageError);
  const std::vector<IntervalHole> dup = {hole_at(2, 5, rat(1, 7), rat(1, 2)),
                                         hole_at(2, 5, rat(1, 9), rat(1, 2))};
  CHECK_THROWS_AS(interval_winner_trace(tent, dup, rat(1, 5), 3, 50),
                  UsageError);
}

TEST_CASE("indeterminate scales are excluded from statistics") {
  const auto tent = PiecewiseAffineMap::tent();
  const auto holes = reference_holes();

  // Horizon 0 leaves every orbit undecided outside the holes.
  const auto blind = interval_winner_trace(tent, holes, rat(1, 5), 3, 0);
  for (const auto& row : blind.rows) {
    CHECK(row.indeterminate);
    CHECK(row.winner == 0);
  }
  const auto stats = interval_indecisiveness_stats(blind);
  CHECK(stats.wins == std::vector<std::uint64_t>{0, 0});
  CHECK(stats.undecided == 0);
  CHECK(stats.switch_count == 0);

  // Horizon 1 decides the first hole (hit at step 1) but not the second:
  // the row is still indeterminate and awards no winner.
  const auto partial = interval_winner_trace(tent, holes, rat(1, 5), 1, 1);
  REQUIRE(partial.rows.size() == 1);
  CHECK(partial.rows[0].outcomes[0] == HitOutcome::hit(1));
  CHECK(partial.rows[0].outcomes[1] == HitOutcome::undecided());
  CHECK(partial.rows[0].indeterminate);
  CHECK(partial.rows[0].winner == 0);
}

TEST_CASE("degenerate scales count wins but never switches") {
  IntervalWinnerTrace trace;
  auto row = [](std::size_t winner, bool degenerate, bool indeterminate) {
    IntervalScaleRow r;
    r.winner = winner;
    r.degenerate = degenerate;
    r.indeterminate = indeterminate;
    r.outcomes.resize(2);
    return r;
  };
  trace.rows = {row(1, false, false), row(1, true, false),
                row(2, false, false), row(2, false, true),
                row(1, false, false), row(0, false, false)};
  const auto stats = interval_indecisiveness_stats(trace);
  CHECK(stats.wins == std::vector<std::uint64_t>{3, 1});
  CHECK(stats.undecided == 1);
  CHECK(stats.degenerate == 1);
  CHECK(stats.switch_count == 2);
  CHECK(stats.h_indecisive(1));
  CHECK(!stats.h_indecisive(2));
}

TEST_CASE("backward orbits of the tent map become dense") {
  const auto tent = PiecewiseAffineMap::tent();
  CHECK(backward_gap(tent, rat(1, 2), 0) == rat(1, 2));
  CHECK(backward_gap(tent, rat(1, 2), 1) == rat(1, 2));
  CHECK(backward_gap(tent, rat(1, 2), 2) == rat(1, 4));
  CHECK(backward_gap(tent, rat(2, 5), 0) == rat(3, 5));
  CHECK_THROWS_AS(backward_gap(tent, rat(0), 3), UsageError);
  CHECK_THROWS_AS(backward_gap(tent, rat(1), 3), UsageError);

  for (const Rational& y : {rat(1, 2), rat(1, 3), rat(2, 5)}) {
    for (std::size_t d = 0; d <= 12; ++d) {
      const Rational bound = Rational(2) / Rational(BigInt(1) << d);
      CHECK(backward_gap(tent, y, d) <= bound);
    }
  }
}

TEST_CASE("construct realizes a one-entry schedule") {
  const auto tent = PiecewiseAffineMap::tent();
  const auto holes = reference_holes();
  const auto res = construct_indecisive_interval(tent, holes, {1});
  REQUIRE(res.success);
  REQUIRE(res.point.has_value());
  CHECK(res.scales == std::vector<std::size_t>{1});
  CHECK(*res.point == rat(29, 70));
  CHECK(res.reason.empty());

  const auto trace = interval_winner_trace(tent, holes, *res.point, 1, 200);
  REQUIRE(trace.rows.size() == 1);
  CHECK(trace.rows[0].winner == 1);

  // 1/5 is an independent witness for the same one-entry schedule.
  const auto alt = interval_winner_trace(tent, holes, rat(1, 5), 1, 200);
  CHECK(alt.rows[0].winner == 1);
}

TEST_CASE("construct realizes a two-entry switching schedule") {
  const auto tent = PiecewiseAffineMap::tent();
  const auto holes = reference_holes();
  const auto res = construct_indecisive_interval(tent, holes, {1, 2});
  REQUIRE(res.success);
  REQUIRE(res.point.has_value());
  CHECK(res.scales == std::vector<std::size_t>{1, 2});
  CHECK(*res.point == rat(489, 1120));

  // Horizon beyond the denominator decides every outcome exactly.
  const auto trace = interval_winner_trace(tent, holes, *res.point, 2, 1200);
  REQUIRE(trace.rows.size() == 2);
  CHECK(!trace.rows[0].indeterminate);
  CHECK(!trace.rows[1].indeterminate);
  CHECK(trace.rows[0].winner == 1);
  CHECK(trace.rows[1].winner == 2);
  CHECK(trace.rows[1].outcomes[1] == HitOutcome::hit(2));

  const auto stats = interval_indecisiveness_stats(trace);
  CHECK(stats.wins == std::vector<std::uint64_t>{1, 1});
  CHECK(stats.h_indecisive(1));
  CHECK(stats.switch_count == 1);
}

TEST_CASE("construct skips scales where a hole fills the space") {
  const auto tent = PiecewiseAffineMap::tent();
  const std::vector<IntervalHole> holes = {hole_at(2, 5, rat(4), rat(1, 2)),
                                           hole_at(2, 7, rat(4), rat(1, 2))};
  // Radii 4 * 2^-n cover all of [0,1] at scales 1 and 2.
  const auto res = construct_indecisive_interval(tent, holes, {1});
  REQUIRE(res.success);
  CHECK(res.scales == std::vector<std::size_t>{3});
  CHECK(*res.point == rat(59, 70));
}

TEST_CASE("construct reports structurally coupled centers") {
  const auto tent = PiecewiseAffineMap::tent();
  const std::vector<IntervalHole> holes = {hole_at(2, 5, rat(1, 7), rat(1, 2)),
                                           hole_at(4, 5, rat(1, 7), rat(1, 2))};
  const auto res = construct_indecisive_interval(tent, holes, {1, 2});
  CHECK(!res.success);
  CHECK(!res.point.has_value());
  CHECK(res.reason.rfind("degenerate-centers", 0) == 0);
}

TEST_CASE("construct reports exhausted budgets") {
  const auto tent = PiecewiseAffineMap::tent();
  const auto holes = reference_holes();

  ConstructIntervalOptions no_scales;
  no_scales.max_scale = 0;
  const auto r1 = construct_indecisive_interval(tent, holes, {1}, no_scales);
  CHECK(!r1.success);
  CHECK(r1.reason.rfind("search-budget-exceeded", 0) == 0);

  ConstructIntervalOptions no_nodes;
  no_nodes.max_nodes = 0;
  const auto r2 = construct_indecisive_interval(tent, holes, {1}, no_nodes);
  CHECK(!r2.success);
  CHECK(r2.reason.rfind("search-budget-exceeded", 0) == 0);
}

TEST_CASE("construct validates its input") {
  const auto tent = PiecewiseAffineMap::tent();
  const auto holes = reference_holes();
  CHECK_THROWS_AS(construct_indecisive_interval(tent, holes, {}), UsageError);
  CHECK_THROWS_AS(construct_indecisive_interval(tent, holes, {0}), UsageError);
  CHECK_THROWS_AS(construct_indecisive_interval(tent, holes, {3}), UsageError);
  CHECK_THROWS_AS(construct_indecisive_interval(tent, {}, {1}), UsageError);
  const std::vector<IntervalHole> bad_center = {
      IntervalHole{rat(0), RadiusSchedule::geometric(rat(1, 7), rat(1, 2))}};
  CHECK_THROWS_AS(construct_indecisive_interval(tent, bad_center, {1}),
                  UsageError);
}

TEST_CASE("construct is deterministic and honors random schedules") {
  const auto tent = PiecewiseAffineMap::tent();
  // Candidate centers 2/q for odd q: their tent orbits keep denominator q,
  // so orbits for different q never collide and the precheck always passes.
  const std::vector<Rational> centers = {rat(2, 5), rat(2, 7), rat(2, 9),
                                         rat(2, 11), rat(2, 13)};
  std::mt19937_64 rng(424242);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::size_t> picks;
    const std::size_t n_holes = 2 + rng() % 2;
    while (picks.size() < n_holes) {
      const std::size_t c = rng() % centers.size();
      bool fresh = true;
      for (std::size_t p : picks) fresh = fresh && p != c;
      if (fresh) picks.push_back(c);
    }
    std::vector<IntervalHole> holes;
    for (std::size_t p : picks) {
      holes.push_back(IntervalHole{
          centers[p], RadiusSchedule::geometric(rat(1, 8), rat(1, 2))});
    }
    std::vector<std::size_t> schedule;
    const std::size_t len = 1 + rng() % 3;
    while (schedule.size() < len) schedule.push_back(1 + rng() % holes.size());

    const auto res = construct_indecisive_interval(tent, holes, schedule);
    REQUIRE(res.success);
    REQUIRE(res.point.has_value());
    REQUIRE(res.scales.size() == schedule.size());
    for (std::size_t k = 1; k < res.scales.size(); ++k) {
      CHECK(res.scales[k - 1] < res.scales[k]);
    }
    // The public hit-time machinery confirms each committed entry.
    for (std::size_t k = 0; k < schedule.size(); ++k) {
      const std::size_t want = schedule[k];
      const auto target =
          first_hit_interval(tent, *res.point,
                             hole_interval(holes[want - 1], res.scales[k]),
                             500);
      REQUIRE(target.kind == HitOutcome::Kind::Hit);
      for (std::size_t j = 1; j <= holes.size(); ++j) {
        if (j == want) continue;
        const auto rival = first_hit_interval(
            tent, *res.point, hole_interval(holes[j - 1], res.scales[k]),
            target.steps);
        CHECK(rival.kind != HitOutcome::Kind::Hit);
      }
    }

    const auto again = construct_indecisive_interval(tent, holes, schedule);
    REQUIRE(again.success);
    CHECK(*again.point == *res.point);
    CHECK(again.scales == res.scales);
  }
}
