// Finite-stage interval models of adding machines: each stage partitions a
// sparse Cantor-like subset of [0,1] into equal-width labeled intervals, the
// stage map translates interval r onto interval r+1 (mod stage size), and
// deeper stages nest inside shallower ones with coherent labels.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "odesc/numeric.hpp"
#include "odesc/radix.hpp"

namespace odesc {

struct StageInterval {
  std::uint64_t label = 0;
  Rational lo, hi;
};

class SolenoidalModel {
 public:
  // Raw constructor, no validation; verify_solenoid_structure is the check.
  static SolenoidalModel from_stages(
      std::vector<std::vector<StageInterval>> stages);

  std::size_t depth() const { return stages_.size(); }

  // Stage s (1-based), stored in label order: stage(s)[r].label == r for
  // models produced by build_solenoid.
  const std::vector<StageInterval>& stage(std::size_t s) const;

  // Label of the stage-s interval containing x (endpoints included), or
  // nullopt when x falls in a gap.
  std::optional<std::uint64_t> itinerary(const Rational& x,
                                         std::size_t s) const;

  // Translation carrying the stage-s interval containing x onto the interval
  // labeled (label + 1) mod stage size. Throws when x lies in no interval.
  Rational stage_map(std::size_t s, const Rational& x) const;

 private:
  std::vector<std::vector<StageInterval>> stages_;
  // Per stage: interval indices sorted by left endpoint, for containment
  // lookup by binary search.
  std::vector<std::vector<std::size_t>> by_position_;
};

// Stage-by-stage construction driven by a radix sequence: the single interval
// [0,1] is repeatedly refined, each parent of width w and label r splitting
// into c = radix children of width w/(2c-1) at every second slot, the child
// in slot t labeled r + t * (parent stage size).
SolenoidalModel build_solenoid(const RadixSpec& spec, std::size_t depth);

// Checks every structural invariant: per stage, labels are a permutation of
// 0..m-1, intervals sit inside [0,1], have equal positive width, and are
// pairwise disjoint; across stages, sizes divide and each interval nests in
// the previous-stage interval labeled by its residue.
bool verify_solenoid_structure(const SolenoidalModel& model);

}  // namespace odesc
