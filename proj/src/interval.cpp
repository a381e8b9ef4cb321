#include "odesc/interval.hpp"

#include <algorithm>
#include <set>

namespace odesc {

namespace {

// x -> a*x + b, one monotone (or constant) branch of an iterated map.
struct Aff {
  Rational a, b;
};

Rational apply(const Aff& f, const Rational& x) { return f.a * x + f.b; }

// Remove a closed interval [lo, hi] from a union of open intervals.
void subtract_closed(std::vector<OpenInterval>& pieces, const Rational& lo,
                     const Rational& hi) {
  std::vector<OpenInterval> out;
  out.reserve(pieces.size() + 1);
  for (const OpenInterval& p : pieces) {
    if (hi <= p.lo || lo >= p.hi) {
      out.push_back(p);
      continue;
    }
    OpenInterval left{p.lo, std::min(p.hi, lo)};
    OpenInterval right{std::max(p.lo, hi), p.hi};
    if (!left.empty()) out.push_back(left);
    if (!right.empty()) out.push_back(right);
  }
  pieces = std::move(out);
}

void check_unit_interval(const Rational& x, const char* what) {
  if (x < 0 || x > 1) {
    throw UsageError(std::string(what) + " " + rational_to_string(x) +
                     " lies outside [0,1]");
  }
}

}  // namespace

PiecewiseAffineMap::PiecewiseAffineMap(std::vector<Rational> breakpoints,
                                       std::vector<Rational> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.size() < 2 || values_.size() != breakpoints_.size()) {
    throw UsageError("piecewise map needs matching breakpoints and values");
  }
  if (breakpoints_.front() != 0 || breakpoints_.back() != 1) {
    throw UsageError("breakpoints must start at 0 and end at 1");
  }
  for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
    if (breakpoints_[i] <= breakpoints_[i - 1]) {
      throw UsageError("breakpoints must increase strictly");
    }
  }
  for (const Rational& v : values_) check_unit_interval(v, "map value");
}

PiecewiseAffineMap PiecewiseAffineMap::tent() {
  return PiecewiseAffineMap({Rational(0), Rational(1, 2), Rational(1)},
                            {Rational(0), Rational(1), Rational(0)});
}

Rational evaluate(const PiecewiseAffineMap& map, const Rational& x) {
  check_unit_interval(x, "point");
  const auto& bp = map.breakpoints();
  const auto& val = map.values();
  std::size_t piece = 0;
  while (piece + 2 < bp.size() && x > bp[piece + 1]) ++piece;
  const Rational& x0 = bp[piece];
  const Rational& x1 = bp[piece + 1];
  return val[piece] + (x - x0) * (val[piece + 1] - val[piece]) / (x1 - x0);
}

std::vector<Rational> preimages(const PiecewiseAffineMap& map,
                                const Rational& y) {
  check_unit_interval(y, "value");
  const auto& bp = map.breakpoints();
  const auto& val = map.values();
  std::set<Rational> found;
  for (std::size_t piece = 0; piece + 1 < bp.size(); ++piece) {
    const Rational& v0 = val[piece];
    const Rational& v1 = val[piece + 1];
    if (v0 == v1) {
      if (y == v0) {
        throw UsageError(
            "preimage set is a whole interval on a constant piece");
      }
      continue;
    }
    const Rational x =
        bp[piece] + (y - v0) * (bp[piece + 1] - bp[piece]) / (v1 - v0);
    if (x >= bp[piece] && x <= bp[piece + 1]) found.insert(x);
  }
  return {found.begin(), found.end()};
}

std::string to_string(const HitOutcome& h) {
  switch (h.kind) {
    case HitOutcome::Kind::Hit:
      return "hit(" + std::to_string(h.steps) + ")";
    case HitOutcome::Kind::NeverHits:
      return "never";
    case HitOutcome::Kind::Undecided:
      return "undecided";
  }
  return "undecided";
}

HitOutcome first_hit_interval(const PiecewiseAffineMap& map, const Rational& x,
                              const OpenInterval& hole,
                              std::uint64_t horizon) {
  check_unit_interval(x, "point");
  std::set<Rational> visited;
  Rational cur = x;
  for (std::uint64_t k = 0;; ++k) {
    if (hole.contains(cur)) return HitOutcome::hit(k);
    if (!visited.insert(cur).second) return HitOutcome::never();
    if (k == horizon) return HitOutcome::undecided();
    cur = evaluate(map, cur);
  }
}

OpenInterval hole_interval(const IntervalHole& hole, std::size_t n) {
  if (hole.center <= 0 || hole.center >= 1) {
    throw UsageError("hole center " + rational_to_string(hole.center) +
                     " must lie strictly inside (0,1)");
  }
  const Rational rho = hole.radius.at(n);
  return OpenInterval{hole.center - rho, hole.center + rho};
}

std::size_t interval_winner_of(const std::vector<HitOutcome>& outcomes) {
  if (outcomes.empty()) {
    throw UsageError("interval_winner_of needs at least one outcome");
  }
  bool have_best = false;
  std::size_t best = 0;
  bool unique = false;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    switch (outcomes[i].kind) {
      case HitOutcome::Kind::Undecided:
        return 0;
      case HitOutcome::Kind::NeverHits:
        continue;  // +infinity never beats or ties a finite time
      case HitOutcome::Kind::Hit:
        break;
    }
    if (!have_best || outcomes[i].steps < outcomes[best].steps) {
      best = i;
      have_best = true;
      unique = true;
    } else if (outcomes[i].steps == outcomes[best].steps) {
      unique = false;
    }
  }
  return have_best && unique ? best + 1 : 0;
}

IntervalWinnerTrace interval_winner_trace(const PiecewiseAffineMap& map,
                                          const std::vector<IntervalHole>& holes,
                                          const Rational& x, std::size_t n_max,
                                          std::uint64_t horizon) {
  if (holes.empty()) throw UsageError("hole system is empty");
  for (std::size_t i = 0; i < holes.size(); ++i) {
    for (std::size_t j = i + 1; j < holes.size(); ++j) {
      if (holes[i].center == holes[j].center) {
        throw UsageError("holes " + std::to_string(i + 1) + " and " +
                         std::to_string(j + 1) + " share their center");
      }
    }
  }
  IntervalWinnerTrace trace;
  trace.rows.reserve(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) {
    IntervalScaleRow row;
    row.scale = n;
    std::vector<OpenInterval> intervals;
    intervals.reserve(holes.size());
    for (const IntervalHole& hole : holes) {
      intervals.push_back(hole_interval(hole, n));
      if (intervals.back().lo < 0 && intervals.back().hi > 1) {
        row.degenerate = true;
      }
      row.outcomes.push_back(
          first_hit_interval(map, x, intervals.back(), horizon));
      if (row.outcomes.back().kind == HitOutcome::Kind::Undecided) {
        row.indeterminate = true;
      }
    }
    for (std::size_t i = 0; i < intervals.size() && !row.overlap; ++i) {
      for (std::size_t j = i + 1; j < intervals.size(); ++j) {
        if (std::max(intervals[i].lo, intervals[j].lo) <
            std::min(intervals[i].hi, intervals[j].hi)) {
          row.overlap = true;
          break;
        }
      }
    }
    row.winner = row.indeterminate ? 0 : interval_winner_of(row.outcomes);
    trace.rows.push_back(std::move(row));
  }
  return trace;
}

IndecisivenessStats interval_indecisiveness_stats(
    const IntervalWinnerTrace& trace) {
  IndecisivenessStats stats;
  if (trace.rows.empty()) return stats;
  stats.wins.assign(trace.rows.front().outcomes.size(), 0);
  std::size_t last = 0;
  for (const IntervalScaleRow& row : trace.rows) {
    if (row.indeterminate) continue;  // unknowable scales carry no statistics
    if (row.winner == 0) {
      ++stats.undecided;
      if (row.degenerate) ++stats.degenerate;
      continue;
    }
    ++stats.wins[row.winner - 1];
    if (row.degenerate) {
      ++stats.degenerate;
      continue;
    }
    if (last != 0 && row.winner != last) ++stats.switch_count;
    last = row.winner;
  }
  return stats;
}

Rational backward_gap(const PiecewiseAffineMap& map, const Rational& y,
                      std::size_t d) {
  if (y <= 0 || y >= 1) {
    throw UsageError("backward_gap needs y strictly inside (0,1)");
  }
  std::set<Rational> level = {y};
  for (std::size_t step = 0; step < d; ++step) {
    std::set<Rational> next;
    for (const Rational& p : level) {
      for (const Rational& q : preimages(map, p)) next.insert(q);
    }
    level = std::move(next);
    if (level.empty()) {
      throw UsageError("value has no preimages at depth " +
                       std::to_string(step + 1));
    }
  }
  Rational best = *level.begin();  // gap to 0
  Rational prev = *level.begin();
  for (auto it = std::next(level.begin()); it != level.end(); ++it) {
    best = std::max(best, Rational(*it - prev));
    prev = *it;
  }
  best = std::max(best, Rational(Rational(1) - prev));
  return best;
}

namespace {

// One (scale, step-count) attempt: walk the monotone branches of map^m over
// the current window, pull the open target hole back through the branch, and
// remove every closed competing hole pulled back through each orbit prefix.
struct BranchSearch {
  const PiecewiseAffineMap& map;
  OpenInterval target;
  std::vector<OpenInterval> competitors;  // treated as closed intervals
  std::uint64_t leaf_depth = 0;
  std::uint64_t* nodes = nullptr;
  std::uint64_t max_nodes = 0;
  bool budget_blown = false;
  std::optional<OpenInterval> found;

  void run(const OpenInterval& domain, std::vector<Aff>& path) {
    if (found || budget_blown) return;
    if (++*nodes > max_nodes) {
      budget_blown = true;
      return;
    }
    const Aff& cur = path.back();
    if (path.size() - 1 == leaf_depth) {
      leaf(domain, path);
      return;
    }
    const auto& bp = map.breakpoints();
    const auto& val = map.values();
    if (cur.a == 0) {
      // The whole domain sits on one value; advance it through the map.
      Aff next{Rational(0), evaluate(map, cur.b)};
      path.push_back(next);
      run(domain, path);
      path.pop_back();
      return;
    }
    OpenInterval image{apply(cur, domain.lo), apply(cur, domain.hi)};
    if (image.lo > image.hi) std::swap(image.lo, image.hi);
    // Split the image at interior breakpoints so the next application is
    // affine on each child; breakpoint preimages are single points and are
    // dropped (the search only ever needs open sets).
    std::vector<Rational> cuts = {image.lo};
    for (std::size_t i = 1; i + 1 < bp.size(); ++i) {
      if (bp[i] > image.lo && bp[i] < image.hi) cuts.push_back(bp[i]);
    }
    cuts.push_back(image.hi);
    for (std::size_t c = 0; c + 1 < cuts.size() && !found && !budget_blown;
         ++c) {
      const OpenInterval sub{cuts[c], cuts[c + 1]};
      if (sub.empty()) continue;
      const Rational mid = (sub.lo + sub.hi) / 2;
      std::size_t piece = 0;
      while (piece + 2 < bp.size() && mid > bp[piece + 1]) ++piece;
      const Rational slope =
          (val[piece + 1] - val[piece]) / (bp[piece + 1] - bp[piece]);
      const Aff piece_aff{slope, val[piece] - slope * bp[piece]};
      Rational dlo = (sub.lo - cur.b) / cur.a;
      Rational dhi = (sub.hi - cur.b) / cur.a;
      if (dlo > dhi) std::swap(dlo, dhi);
      const OpenInterval child{std::max(dlo, domain.lo),
                               std::min(dhi, domain.hi)};
      if (child.empty()) continue;
      path.push_back(Aff{piece_aff.a * cur.a, piece_aff.a * cur.b + piece_aff.b});
      run(child, path);
      path.pop_back();
    }
  }

  void leaf(const OpenInterval& domain, const std::vector<Aff>& path) {
    const Aff& last = path.back();
    std::vector<OpenInterval> pieces;
    if (last.a == 0) {
      if (target.contains(last.b)) pieces.push_back(domain);
    } else {
      Rational u = (target.lo - last.b) / last.a;
      Rational v = (target.hi - last.b) / last.a;
      if (u > v) std::swap(u, v);
      const OpenInterval j{std::max(u, domain.lo), std::min(v, domain.hi)};
      if (!j.empty()) pieces.push_back(j);
    }
    for (std::size_t h = 0; h < path.size() && !pieces.empty(); ++h) {
      for (const OpenInterval& comp : competitors) {
        const Aff& ah = path[h];
        if (ah.a == 0) {
          if (comp.lo <= ah.b && ah.b <= comp.hi) pieces.clear();
        } else {
          Rational u = (comp.lo - ah.b) / ah.a;
          Rational v = (comp.hi - ah.b) / ah.a;
          if (u > v) std::swap(u, v);
          subtract_closed(pieces, u, v);
        }
        if (pieces.empty()) break;
      }
    }
    if (pieces.empty()) return;
    const OpenInterval* best = &pieces.front();
    for (const OpenInterval& p : pieces) {
      if (p.hi - p.lo > best->hi - best->lo) best = &p;
    }
    found = *best;
  }
};

}  // namespace

ConstructIntervalResult construct_indecisive_interval(
    const PiecewiseAffineMap& map, const std::vector<IntervalHole>& holes,
    const std::vector<std::size_t>& schedule,
    const ConstructIntervalOptions& opts) {
  if (schedule.empty()) {
    throw UsageError("construct_indecisive_interval needs a nonempty schedule");
  }
  if (holes.empty()) throw UsageError("hole system is empty");
  for (std::size_t w : schedule) {
    if (w < 1 || w > holes.size()) {
      throw UsageError("schedule entry " + std::to_string(w) +
                       " is not a hole index in [1, " +
                       std::to_string(holes.size()) + "]");
    }
  }
  for (const IntervalHole& hole : holes) {
    (void)hole_interval(hole, 1);  // validates the center
  }

  ConstructIntervalResult res;

  // Degenerate centers: one center reaching another's exact position makes
  // hit times structurally coupled, as in the adding-machine case.
  for (std::size_t i = 0; i < holes.size(); ++i) {
    for (std::size_t j = 0; j < holes.size(); ++j) {
      if (i == j) continue;
      Rational z = holes[i].center;
      for (std::uint64_t h = 0; h <= opts.orbit_horizon; ++h) {
        if (z == holes[j].center) {
          res.reason = "degenerate-centers: iterate " + std::to_string(h) +
                       " of center " + std::to_string(i + 1) +
                       " equals center " + std::to_string(j + 1);
          return res;
        }
        z = evaluate(map, z);
      }
    }
  }

  OpenInterval window{Rational(0), Rational(1)};
  std::size_t prev_scale = 0;
  std::uint64_t nodes = 0;
  std::vector<std::uint64_t> committed_steps;

  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const std::size_t want = schedule[k];
    bool committed = false;
    for (std::size_t n = prev_scale + 1; n <= opts.max_scale && !committed;
         ++n) {
      std::vector<OpenInterval> at_scale;
      at_scale.reserve(holes.size());
      bool degenerate = false;
      for (const IntervalHole& hole : holes) {
        at_scale.push_back(hole_interval(hole, n));
        if (at_scale.back().lo < 0 && at_scale.back().hi > 1) degenerate = true;
      }
      if (degenerate) continue;

      for (std::uint64_t m = 0; m <= opts.max_steps && !committed; ++m) {
        BranchSearch search{map,
                            at_scale[want - 1],
                            {},
                            m,
                            &nodes,
                            opts.max_nodes,
                            false,
                            std::nullopt};
        for (std::size_t j = 0; j < holes.size(); ++j) {
          if (j != want - 1) search.competitors.push_back(at_scale[j]);
        }
        std::vector<Aff> path = {Aff{Rational(1), Rational(0)}};
        search.run(window, path);
        if (search.budget_blown) {
          res.reason = "search-budget-exceeded: branch budget of " +
                       std::to_string(opts.max_nodes) +
                       " nodes exhausted at scale " + std::to_string(n);
          res.scales.clear();
          return res;
        }
        if (search.found) {
          window = *search.found;
          prev_scale = n;
          res.scales.push_back(n);
          committed_steps.push_back(m);
          committed = true;
        }
      }
    }
    if (!committed) {
      res.reason = "search-budget-exceeded: no scale in (" +
                   std::to_string(prev_scale) + ", " +
                   std::to_string(opts.max_scale) +
                   "] realizes schedule entry " + std::to_string(k + 1) +
                   " (hole " + std::to_string(want) + ")";
      res.scales.clear();
      return res;
    }
  }

  const Rational x = (window.lo + window.hi) / 2;

  // Re-verify every committed entry against the public hit-time machinery.
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const std::size_t n = res.scales[k];
    const std::size_t want = schedule[k];
    const auto tau =
        first_hit_interval(map, x, hole_interval(holes[want - 1], n),
                           committed_steps[k]);
    bool ok = tau.kind == HitOutcome::Kind::Hit;
    for (std::size_t j = 0; ok && j < holes.size(); ++j) {
      if (j == want - 1) continue;
      const auto rival =
          first_hit_interval(map, x, hole_interval(holes[j], n), tau.steps);
      ok = rival.kind != HitOutcome::Kind::Hit;
    }
    if (!ok) {
      res.reason = "internal error: committed schedule entry " +
                   std::to_string(k + 1) + " failed re-verification";
      res.scales.clear();
      return res;
    }
  }

  res.success = true;
  res.point = x;
  return res;
}

}  // namespace odesc
