// Exact interval dynamics on [0,1]: piecewise-affine maps (tent map builtin),
// rational orbits with cycle detection, hole competitions, backward-orbit
// density, and construction of points realizing winner schedules.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "odesc/escape.hpp"
#include "odesc/numeric.hpp"

namespace odesc {

// Continuous piecewise-affine self-map of [0,1], stored as breakpoints
// 0 = x_0 < ... < x_m = 1 and node values v_i = f(x_i) in [0,1]; piece i is
// the segment from (x_i, v_i) to (x_{i+1}, v_{i+1}). Continuity is inherent
// in the representation.
class PiecewiseAffineMap {
 public:
  PiecewiseAffineMap(std::vector<Rational> breakpoints,
                     std::vector<Rational> values);
  // T(x) = 1 - |2x - 1|: breakpoints (0, 1/2, 1), values (0, 1, 0).
  static PiecewiseAffineMap tent();

  const std::vector<Rational>& breakpoints() const { return breakpoints_; }
  const std::vector<Rational>& values() const { return values_; }

 private:
  std::vector<Rational> breakpoints_;
  std::vector<Rational> values_;
};

Rational evaluate(const PiecewiseAffineMap& map, const Rational& x);

// All solutions of evaluate(map, x) = y, deduplicated and sorted. A constant
// piece whose value equals y has a continuum of solutions and is reported as
// a usage error (the tent map has none).
std::vector<Rational> preimages(const PiecewiseAffineMap& map,
                                const Rational& y);

// Open interval (lo, hi); empty when lo >= hi.
struct OpenInterval {
  Rational lo, hi;
  bool empty() const { return lo >= hi; }
  bool contains(const Rational& x) const { return lo < x && x < hi; }
};

struct HitOutcome {
  enum class Kind { Hit, NeverHits, Undecided };
  Kind kind = Kind::Undecided;
  std::uint64_t steps = 0;  // valid for Hit

  static HitOutcome hit(std::uint64_t k) { return {Kind::Hit, k}; }
  static HitOutcome never() { return {Kind::NeverHits, 0}; }
  static HitOutcome undecided() { return {Kind::Undecided, 0}; }
  bool operator==(const HitOutcome& o) const {
    return kind == o.kind && (kind != Kind::Hit || steps == o.steps);
  }
};

std::string to_string(const HitOutcome& h);

// First k with map^k(x) in the hole. Rational tent orbits never grow their
// denominator, so a repeated state (NeverHits) is always detected within
// denominator + 2 steps; Undecided can only occur when the horizon cuts the
// orbit before a cycle closes.
HitOutcome first_hit_interval(const PiecewiseAffineMap& map, const Rational& x,
                              const OpenInterval& hole, std::uint64_t horizon);

struct IntervalHole {
  Rational center;  // in (0,1)
  RadiusSchedule radius;
};

// Open hole of hole i at scale n, clipped to [0,1] implicitly by membership.
OpenInterval hole_interval(const IntervalHole& hole, std::size_t n);

struct IntervalScaleRow {
  std::size_t scale = 0;
  std::vector<HitOutcome> outcomes;
  std::size_t winner = 0;     // 1-based strict minimizer, 0 when none
  bool overlap = false;       // some pair of holes intersects
  bool degenerate = false;    // some hole covers all of [0,1]
  bool indeterminate = false; // some outcome is Undecided
};

struct IntervalWinnerTrace {
  std::vector<IntervalScaleRow> rows;
};

// Strict minimizer treating NeverHits as +infinity; 0 when tied, when no
// hole is ever hit, or when any outcome is Undecided.
std::size_t interval_winner_of(const std::vector<HitOutcome>& outcomes);

IntervalWinnerTrace interval_winner_trace(const PiecewiseAffineMap& map,
                                          const std::vector<IntervalHole>& holes,
                                          const Rational& x, std::size_t n_max,
                                          std::uint64_t horizon);

// Indeterminate scales are excluded from all statistics; degenerate scales
// count wins but are excluded from the switch subsequence.
IndecisivenessStats interval_indecisiveness_stats(
    const IntervalWinnerTrace& trace);

// Largest gap between consecutive d-th preimages of y (with the endpoints of
// [0,1] included as gap boundaries). For the tent map this is at most 2^(1-d).
Rational backward_gap(const PiecewiseAffineMap& map, const Rational& y,
                      std::size_t d);

struct ConstructIntervalOptions {
  std::uint64_t max_steps = 24;     // forward steps searched per scale
  std::size_t max_scale = 64;       // scan horizon for realizing one entry
  std::uint64_t orbit_horizon = 256;  // center-collision precheck length
  std::uint64_t max_nodes = 1 << 20;  // branch-tree budget across the search
};

struct ConstructIntervalResult {
  bool success = false;
  std::optional<Rational> point;
  std::vector<std::size_t> scales;  // scale realizing each schedule entry
  std::string reason;               // "degenerate-centers: ..." or
                                    // "search-budget-exceeded: ..."
};

// Builds a rational x whose winner sequence realizes `schedule` at strictly
// increasing non-degenerate scales. Keeps an open interval of valid starts;
// for each entry searches scales and step counts m, splitting [0,1] into the
// monotone branches of map^m, pulling the open target hole back through a
// branch and removing the closed competing holes pulled back through every
// orbit prefix. Verified via first_hit_interval before returning.
ConstructIntervalResult construct_indecisive_interval(
    const PiecewiseAffineMap& map, const std::vector<IntervalHole>& holes,
    const std::vector<std::size_t>& schedule,
    const ConstructIntervalOptions& opts = {});

}  // namespace odesc
