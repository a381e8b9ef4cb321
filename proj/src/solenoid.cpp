#include "odesc/solenoid.hpp"

#include <algorithm>

namespace odesc {

namespace {

std::vector<std::vector<std::size_t>> position_index(
    const std::vector<std::vector<StageInterval>>& stages) {
  std::vector<std::vector<std::size_t>> by_position;
  by_position.reserve(stages.size());
  for (const auto& stage : stages) {
    std::vector<std::size_t> order(stage.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return stage[a].lo < stage[b].lo;
    });
    by_position.push_back(std::move(order));
  }
  return by_position;
}

}  // namespace

SolenoidalModel SolenoidalModel::from_stages(
    std::vector<std::vector<StageInterval>> stages) {
  SolenoidalModel model;
  model.stages_ = std::move(stages);
  model.by_position_ = position_index(model.stages_);
  return model;
}

const std::vector<StageInterval>& SolenoidalModel::stage(std::size_t s) const {
  if (s < 1 || s > stages_.size()) {
    throw UsageError("stage " + std::to_string(s) + " is out of range [1, " +
                     std::to_string(stages_.size()) + "]");
  }
  return stages_[s - 1];
}

std::optional<std::uint64_t> SolenoidalModel::itinerary(const Rational& x,
                                                        std::size_t s) const {
  const auto& intervals = stage(s);
  const auto& order = by_position_[s - 1];
  // Last interval (in position order) whose left endpoint is <= x.
  std::size_t lo = 0, hi = order.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (intervals[order[mid]].lo <= x) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo == 0) return std::nullopt;
  const StageInterval& cand = intervals[order[lo - 1]];
  if (x <= cand.hi) return cand.label;
  return std::nullopt;
}

Rational SolenoidalModel::stage_map(std::size_t s, const Rational& x) const {
  const auto label = itinerary(x, s);
  if (!label) {
    throw UsageError("point " + rational_to_string(x) +
                     " lies in no stage-" + std::to_string(s) + " interval");
  }
  const auto& intervals = stage(s);
  const StageInterval* cur = nullptr;
  const StageInterval* next = nullptr;
  const std::uint64_t succ = (*label + 1) % intervals.size();
  for (const StageInterval& iv : intervals) {
    if (iv.label == *label) cur = &iv;
    if (iv.label == succ) next = &iv;
  }
  if (!cur || !next) {
    throw UsageError("stage " + std::to_string(s) +
                     " lacks a successor for label " + std::to_string(*label));
  }
  return x + (next->lo - cur->lo);
}

SolenoidalModel build_solenoid(const RadixSpec& spec, std::size_t depth) {
  if (spec.modulus(depth) > BigInt(1) << 22) {
    throw UsageError("solenoid stage " + std::to_string(depth) +
                     " would have more than 2^22 intervals");
  }
  std::vector<std::vector<StageInterval>> stages;
  stages.reserve(depth);
  std::vector<StageInterval> prev = {
      StageInterval{0, Rational(0), Rational(1)}};
  for (std::size_t s = 1; s <= depth; ++s) {
    const int c = spec.radix_at(s);
    const std::uint64_t m_prev = prev.size();
    std::vector<StageInterval> cur(m_prev * static_cast<std::uint64_t>(c));
    for (const StageInterval& parent : prev) {
      const Rational w = (parent.hi - parent.lo) / (2 * c - 1);
      for (int t = 0; t < c; ++t) {
        const std::uint64_t label =
            parent.label + static_cast<std::uint64_t>(t) * m_prev;
        const Rational lo = parent.lo + 2 * t * w;
        cur[label] = StageInterval{label, lo, lo + w};
      }
    }
    stages.push_back(cur);
    prev = std::move(cur);
  }
  return SolenoidalModel::from_stages(std::move(stages));
}

bool verify_solenoid_structure(const SolenoidalModel& model) {
  for (std::size_t s = 1; s <= model.depth(); ++s) {
    const auto& intervals = model.stage(s);
    const std::size_t m = intervals.size();
    if (m == 0) return false;

    std::vector<bool> seen(m, false);
    for (const StageInterval& iv : intervals) {
      if (iv.label >= m || seen[iv.label]) return false;
      seen[iv.label] = true;
      if (iv.lo < 0 || iv.hi > 1 || iv.lo >= iv.hi) return false;
    }

    const Rational width = intervals.front().hi - intervals.front().lo;
    for (const StageInterval& iv : intervals) {
      if (iv.hi - iv.lo != width) return false;
    }

    std::vector<const StageInterval*> ordered;
    ordered.reserve(m);
    for (const StageInterval& iv : intervals) ordered.push_back(&iv);
    std::sort(ordered.begin(), ordered.end(),
              [](const StageInterval* a, const StageInterval* b) {
                return a->lo < b->lo;
              });
    for (std::size_t i = 0; i + 1 < m; ++i) {
      if (ordered[i]->hi >= ordered[i + 1]->lo) return false;
    }

    if (s >= 2) {
      const auto& coarse = model.stage(s - 1);
      const std::size_t m_prev = coarse.size();
      if (m % m_prev != 0) return false;
      for (const StageInterval& iv : intervals) {
        const std::uint64_t want = iv.label % m_prev;
        const StageInterval* parent = nullptr;
        for (const StageInterval& cand : coarse) {
          if (cand.label == want) {
            parent = &cand;
            break;
          }
        }
        if (!parent || iv.lo < parent->lo || iv.hi > parent->hi) return false;
      }
    }
  }
  return true;
}

}  // namespace odesc
