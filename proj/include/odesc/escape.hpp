// Competing shrinking holes on an adding machine.
//
// A hole is a metric ball around a fixed center whose radius shrinks with a
// scale index n = 1, 2, ... Every ball is a cylinder, so at each scale the
// competition "which hole does the orbit of x enter first" is decided in
// closed form from residues. The winner may switch as n grows; this module
// measures that (winner traces, switch counts, H-indecisiveness) and
// constructs points whose winner sequence realizes a prescribed schedule.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "odesc/odometer.hpp"

namespace odesc {

// Hole radius as a function of the scale index n >= 1. Always positive and
// nonincreasing, with limit zero.
class RadiusSchedule {
 public:
  enum class Kind { Geometric, Harmonic, ExplicitList };

  // c * lambda^n with c > 0 and 0 < lambda < 1.
  static RadiusSchedule geometric(const Rational& c, const Rational& lambda);
  // c / n with c > 0.
  static RadiusSchedule harmonic(const Rational& c);
  // Listed radii for n = 1..k (positive, nonincreasing), then the last entry
  // decays geometrically: entries.back() * tail_lambda^(n-k).
  static RadiusSchedule explicit_list(std::vector<Rational> entries,
                                      const Rational& tail_lambda);

  Rational at(std::size_t n) const;
  std::string to_string() const;

  Kind kind() const { return kind_; }
  const Rational& coefficient() const { return coefficient_; }
  const Rational& lambda() const { return lambda_; }
  const std::vector<Rational>& entries() const { return entries_; }

 private:
  RadiusSchedule() = default;
  Kind kind_ = Kind::Geometric;
  Rational coefficient_;           // geometric / harmonic
  Rational lambda_;                // geometric decay, or explicit tail decay
  std::vector<Rational> entries_;  // explicit list
};

struct Hole {
  AdicPoint center;
  RadiusSchedule radius;
};

struct HoleSystem {
  RadixSpec spec;
  std::vector<Hole> holes;  // reported 1-based
};

// First-hit times of every hole at one scale, plus the pairwise-overlap flag.
struct HitVector {
  std::vector<BigInt> taus;
  bool overlap = false;
};

// Everything measured at one scale.
struct ScaleRow {
  std::size_t scale = 0;
  std::vector<std::size_t> depths;  // cylinder depth of each hole
  std::vector<BigInt> taus;         // first-hit time of each hole
  std::size_t winner = 0;           // 1-based strict minimizer, 0 on a tie
  bool overlap = false;             // some pair of hole cylinders intersects
  bool degenerate = false;          // some hole covers the whole space
};

struct WinnerTrace {
  std::vector<ScaleRow> rows;  // scales 1..n_max
};

struct IndecisivenessStats {
  std::vector<std::uint64_t> wins;  // wins[i] = #scales hole i+1 won
  std::uint64_t undecided = 0;      // scales with no strict winner
  std::uint64_t degenerate = 0;     // scales where some hole fills the space
  // Winner changes along the decided subsequence; degenerate scales are
  // excluded because a space-filling hole wins vacuously.
  std::uint64_t switch_count = 0;

  // Every hole won at least h scales.
  bool h_indecisive(std::uint64_t h) const {
    if (wins.empty()) return false;
    for (std::uint64_t w : wins) {
      if (w < h) return false;
    }
    return true;
  }
};

HitVector hit_vector(const HoleSystem& system, const AdicPoint& x,
                     std::size_t scale);
// Index (1-based) of the strict unique minimum, or 0 when tied. A single
// entry always wins: the competing minimum over no holes is +infinity.
std::size_t winner_of(const std::vector<BigInt>& taus);
ScaleRow scale_row(const HoleSystem& system, const AdicPoint& x,
                   std::size_t scale);
WinnerTrace winner_trace(const HoleSystem& system, const AdicPoint& x,
                         std::size_t n_max);
IndecisivenessStats indecisiveness_stats(const WinnerTrace& trace);

// Nullopt when the system is generic; otherwise a description of the defect
// (no holes, centers sharing an orbit, centers indistinguishable). Centers on
// one orbit make the competition trivial: one hole's hit time determines the
// others up to a shift, so winner schedules are not freely realizable.
std::optional<std::string> validate_system(const HoleSystem& system);

struct ConstructOptions {
  std::size_t max_depth = 64;        // deepest residue constraint allowed
  std::uint64_t max_offset = 16384;  // candidate residues tried per scale
  std::size_t max_scale = 4096;      // scan horizon for realizing one entry
};

struct ConstructResult {
  bool success = false;
  std::optional<AdicPoint> point;   // finite digits, zero tail
  std::vector<std::size_t> scales;  // scale realizing each schedule entry
  std::string reason;               // on failure: "degenerate-system: ..."
                                    // or "search-budget-exceeded: ..."
};

// Builds a point whose winner sequence realizes `schedule` (1-based hole
// indices) at a strictly increasing sequence of non-degenerate scales.
// Greedy nested-cylinder search: keep a committed residue r mod m_L; for each
// entry try candidate extensions r + t*m_L (breadth over the offset t first),
// then deeper scales, and commit the first match. Every committed entry stays
// valid because later refinements fix the residue at all shallower depths.
ConstructResult construct_indecisive(const HoleSystem& system,
                                     const std::vector<std::size_t>& schedule,
                                     const ConstructOptions& opts = {});

struct TrialResult {
  std::uint64_t trial = 0;
  std::vector<std::uint64_t> wins;
  std::uint64_t undecided = 0;
  std::uint64_t switch_count = 0;
};

struct SampleReport {
  std::vector<TrialResult> trials;
  // per_hole_win_histogram[i][w] = number of trials where hole i+1 won
  // exactly w scales.
  std::vector<std::vector<std::uint64_t>> per_hole_win_histogram;
  std::vector<std::uint64_t> switch_histogram;  // index = switch count
  std::vector<double> h_indecisive_fraction;    // H = 1, 2, 3
};

// Runs winner traces over points sampled from per-trial derived seeds. The
// result is a pure function of (system, n_max, trials, seed); the thread
// count only splits the work, never the arithmetic or the reduction order.
SampleReport sample_genericity(const HoleSystem& system, std::size_t n_max,
                               std::uint64_t trials, std::uint64_t seed,
                               unsigned threads = 1);

}  // namespace odesc
