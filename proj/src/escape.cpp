#include "odesc/escape.hpp"

#include <algorithm>
#include <iostream>
#include <thread>

namespace odesc {

namespace {

Rational rational_pow(const Rational& q, std::size_t e) {
  using boost::multiprecision::pow;
  return Rational(pow(numerator(q), static_cast<unsigned>(e)),
                  pow(denominator(q), static_cast<unsigned>(e)));
}

void check_scale_index(std::size_t n) {
  if (n == 0) throw UsageError("scale indices are 1-based");
}

std::vector<Cylinder> holes_at_scale(const HoleSystem& system,
                                     std::size_t scale) {
  if (system.holes.empty()) throw UsageError("hole system is empty");
  std::vector<Cylinder> cylinders;
  cylinders.reserve(system.holes.size());
  for (const Hole& hole : system.holes) {
    cylinders.push_back(ball_to_cylinder(hole.center, hole.radius.at(scale)));
  }
  return cylinders;
}

bool any_pair_intersects(const std::vector<Cylinder>& cylinders) {
  for (std::size_t i = 0; i < cylinders.size(); ++i) {
    for (std::size_t j = i + 1; j < cylinders.size(); ++j) {
      if (cylinders_intersect(cylinders[i], cylinders[j])) return true;
    }
  }
  return false;
}

}  // namespace

RadiusSchedule RadiusSchedule::geometric(const Rational& c,
                                         const Rational& lambda) {
  if (c <= 0) throw UsageError("geometric schedule needs c > 0");
  if (lambda <= 0 || lambda >= 1) {
    throw UsageError("geometric schedule needs 0 < lambda < 1");
  }
  RadiusSchedule s;
  s.kind_ = Kind::Geometric;
  s.coefficient_ = c;
  s.lambda_ = lambda;
  return s;
}

RadiusSchedule RadiusSchedule::harmonic(const Rational& c) {
  if (c <= 0) throw UsageError("harmonic schedule needs c > 0");
  RadiusSchedule s;
  s.kind_ = Kind::Harmonic;
  s.coefficient_ = c;
  return s;
}

RadiusSchedule RadiusSchedule::explicit_list(std::vector<Rational> entries,
                                             const Rational& tail_lambda) {
  if (entries.empty()) {
    throw UsageError("explicit schedule needs at least one radius");
  }
  if (tail_lambda <= 0 || tail_lambda >= 1) {
    throw UsageError("explicit schedule needs 0 < tail_lambda < 1");
  }
  bool strict = true;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i] <= 0) throw UsageError("explicit radii must be positive");
    if (i > 0) {
      if (entries[i] > entries[i - 1]) {
        throw UsageError("explicit radii must be nonincreasing");
      }
      if (entries[i] == entries[i - 1]) strict = false;
    }
  }
  if (!strict && log_level() >= 1) {
    std::cerr << "[odesc] warning: explicit radius list is not strictly "
                 "decreasing; repeated radii share a cylinder depth\n";
  }
  RadiusSchedule s;
  s.kind_ = Kind::ExplicitList;
  s.entries_ = std::move(entries);
  s.lambda_ = tail_lambda;
  return s;
}

Rational RadiusSchedule::at(std::size_t n) const {
  check_scale_index(n);
  switch (kind_) {
    case Kind::Geometric:
      return coefficient_ * rational_pow(lambda_, n);
    case Kind::Harmonic:
      return coefficient_ / n;
    case Kind::ExplicitList:
      break;
  }
  if (n <= entries_.size()) return entries_[n - 1];
  return entries_.back() * rational_pow(lambda_, n - entries_.size());
}

std::string RadiusSchedule::to_string() const {
  switch (kind_) {
    case Kind::Geometric:
      return "geometric(c=" + rational_to_string(coefficient_) +
             ", lambda=" + rational_to_string(lambda_) + ")";
    case Kind::Harmonic:
      return "harmonic(c=" + rational_to_string(coefficient_) + ")";
    case Kind::ExplicitList:
      break;
  }
  std::string out = "explicit([";
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i > 0) out += ", ";
    out += rational_to_string(entries_[i]);
  }
  return out + "], tail_lambda=" + rational_to_string(lambda_) + ")";
}

HitVector hit_vector(const HoleSystem& system, const AdicPoint& x,
                     std::size_t scale) {
  check_scale_index(scale);
  const auto cylinders = holes_at_scale(system, scale);
  HitVector out;
  out.taus.reserve(cylinders.size());
  for (const Cylinder& c : cylinders) out.taus.push_back(first_hit(x, c));
  out.overlap = any_pair_intersects(cylinders);
  return out;
}

std::size_t winner_of(const std::vector<BigInt>& taus) {
  if (taus.empty()) throw UsageError("winner_of needs at least one hit time");
  std::size_t best = 0;
  bool unique = true;
  for (std::size_t i = 1; i < taus.size(); ++i) {
    if (taus[i] < taus[best]) {
      best = i;
      unique = true;
    } else if (taus[i] == taus[best]) {
      unique = false;
    }
  }
  return unique ? best + 1 : 0;
}

ScaleRow scale_row(const HoleSystem& system, const AdicPoint& x,
                   std::size_t scale) {
  check_scale_index(scale);
  const auto cylinders = holes_at_scale(system, scale);
  ScaleRow row;
  row.scale = scale;
  row.depths.reserve(cylinders.size());
  row.taus.reserve(cylinders.size());
  for (const Cylinder& c : cylinders) {
    row.depths.push_back(c.depth);
    row.taus.push_back(first_hit(x, c));
    if (c.depth == 0) row.degenerate = true;
  }
  row.overlap = any_pair_intersects(cylinders);
  row.winner = winner_of(row.taus);
  return row;
}

WinnerTrace winner_trace(const HoleSystem& system, const AdicPoint& x,
                         std::size_t n_max) {
  WinnerTrace trace;
  trace.rows.reserve(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) {
    trace.rows.push_back(scale_row(system, x, n));
  }
  return trace;
}

IndecisivenessStats indecisiveness_stats(const WinnerTrace& trace) {
  IndecisivenessStats stats;
  if (trace.rows.empty()) return stats;
  stats.wins.assign(trace.rows.front().taus.size(), 0);
  std::size_t last = 0;
  for (const ScaleRow& row : trace.rows) {
    if (row.winner == 0) {
      ++stats.undecided;
      if (row.degenerate) ++stats.degenerate;
      continue;
    }
    ++stats.wins[row.winner - 1];
    if (row.degenerate) {
      // A space-filling hole wins vacuously: counted as a win, but the
      // decided subsequence used for switches skips the scale.
      ++stats.degenerate;
      continue;
    }
    if (last != 0 && row.winner != last) ++stats.switch_count;
    last = row.winner;
  }
  return stats;
}

std::optional<std::string> validate_system(const HoleSystem& system) {
  if (system.holes.empty()) return "hole system is empty";
  for (std::size_t i = 0; i < system.holes.size(); ++i) {
    if (system.holes[i].center.spec() != system.spec) {
      return "center " + std::to_string(i + 1) +
             " uses a different radix spec than the system";
    }
  }
  constexpr std::size_t kDepthCap = 256;
  for (std::size_t i = 0; i < system.holes.size(); ++i) {
    for (std::size_t j = i + 1; j < system.holes.size(); ++j) {
      const AdicPoint& a = system.holes[i].center;
      const AdicPoint& b = system.holes[j].center;
      if (a.is_exact() && b.is_exact()) {
        if (const auto offset = same_orbit(a, b)) {
          return "centers " + std::to_string(i + 1) + " and " +
                 std::to_string(j + 1) + " share an orbit (offset " +
                 offset->str() + ")";
        }
      } else {
        // At least one sampled center: distinctness is checkable only to a
        // depth cap.
        const auto d = distance(a, b, kDepthCap);
        if (d.kind != UltraDistance::Kind::PowerOfHalf) {
          return "centers " + std::to_string(i + 1) + " and " +
                 std::to_string(j + 1) + " are indistinguishable to depth " +
                 std::to_string(kDepthCap);
        }
      }
    }
  }
  return std::nullopt;
}

ConstructResult construct_indecisive(const HoleSystem& system,
                                     const std::vector<std::size_t>& schedule,
                                     const ConstructOptions& opts) {
  ConstructResult res;
  if (auto problem = validate_system(system)) {
    res.reason = "degenerate-system: " + *problem;
    return res;
  }
  if (schedule.empty()) {
    throw UsageError("construct_indecisive needs a nonempty schedule");
  }
  const std::size_t n_holes = system.holes.size();
  for (std::size_t w : schedule) {
    if (w < 1 || w > n_holes) {
      throw UsageError("schedule entry " + std::to_string(w) +
                       " is not a hole index in [1, " +
                       std::to_string(n_holes) + "]");
    }
  }
  const RadixSpec& spec = system.spec;

  // Committed constraint: the result is congruent to r mod m_depth. Each
  // schedule entry's hit times depend only on residues at depths folded
  // into `depth` when the entry was committed, so later refinements (which
  // extend r at deeper moduli) never invalidate earlier entries.
  BigInt r = 0;
  std::size_t depth = 0;
  std::size_t prev_scale = 0;

  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const std::size_t want = schedule[k];
    bool committed = false;
    for (std::size_t n = prev_scale + 1; n <= opts.max_scale && !committed;
         ++n) {
      std::vector<std::size_t> depths(n_holes);
      std::size_t deepest = 0;
      bool degenerate = false;
      for (std::size_t i = 0; i < n_holes; ++i) {
        depths[i] = radius_to_depth(system.holes[i].radius.at(n));
        if (depths[i] == 0) degenerate = true;
        deepest = std::max(deepest, depths[i]);
      }
      // A space-filling hole would win vacuously; only commit entries at
      // scales where every hole is a proper ball.
      if (degenerate) continue;
      const std::size_t new_depth = std::max(deepest, depth);
      if (new_depth > opts.max_depth) {
        res.reason = "search-budget-exceeded: scale " + std::to_string(n) +
                     " needs depth " + std::to_string(new_depth) +
                     " > max_depth " + std::to_string(opts.max_depth);
        return res;
      }
      const BigInt step = spec.modulus(depth);
      const BigInt bound = spec.modulus(new_depth);
      std::vector<BigInt> hole_mod(n_holes), hole_res(n_holes);
      for (std::size_t i = 0; i < n_holes; ++i) {
        hole_mod[i] = spec.modulus(depths[i]);
        hole_res[i] = system.holes[i].center.residue(depths[i]);
      }
      BigInt cand = r;
      std::vector<BigInt> taus(n_holes);
      for (std::uint64_t t = 0; t < opts.max_offset && cand < bound;
           ++t, cand += step) {
        for (std::size_t i = 0; i < n_holes; ++i) {
          taus[i] = floor_mod(hole_res[i] - cand, hole_mod[i]);
        }
        if (winner_of(taus) == want) {
          r = cand;
          depth = new_depth;
          prev_scale = n;
          res.scales.push_back(n);
          committed = true;
          break;
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

  // Materialize and re-verify through the public trace machinery.
  AdicPoint x = AdicPoint::from_residue(spec, r, depth);
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const ScaleRow row = scale_row(system, x, res.scales[k]);
    if (row.winner != schedule[k] || row.degenerate) {
      res.reason = "internal error: committed schedule entry " +
                   std::to_string(k + 1) + " failed re-verification";
      res.scales.clear();
      return res;
    }
  }
  res.success = true;
  res.point = std::move(x);
  return res;
}

SampleReport sample_genericity(const HoleSystem& system, std::size_t n_max,
                               std::uint64_t trials, std::uint64_t seed,
                               unsigned threads) {
  if (system.holes.empty()) throw UsageError("hole system is empty");
  const std::size_t n_holes = system.holes.size();
  std::vector<TrialResult> rows(trials);

  auto run_range = [&](unsigned tid, unsigned stride) {
    for (std::uint64_t t = tid; t < trials; t += stride) {
      const AdicPoint x =
          AdicPoint::sampled(system.spec, derive_seed(seed, t));
      const auto stats = indecisiveness_stats(winner_trace(system, x, n_max));
      TrialResult& out = rows[t];
      out.trial = t;
      out.wins = stats.wins;
      out.wins.resize(n_holes, 0);
      out.undecided = stats.undecided;
      out.switch_count = stats.switch_count;
    }
  };

  const unsigned worker_count = std::max(1u, threads);
  if (worker_count == 1 || trials <= 1) {
    run_range(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(worker_count);
    for (unsigned tid = 0; tid < worker_count; ++tid) {
      pool.emplace_back(run_range, tid, worker_count);
    }
    for (auto& th : pool) th.join();
  }

  SampleReport report;
  if (trials > 0) {
    std::uint64_t max_switch = 0;
    std::uint64_t max_wins = 0;
    for (const auto& tr : rows) {
      max_switch = std::max(max_switch, tr.switch_count);
      for (std::uint64_t w : tr.wins) max_wins = std::max(max_wins, w);
    }
    report.switch_histogram.assign(max_switch + 1, 0);
    report.per_hole_win_histogram.assign(
        n_holes, std::vector<std::uint64_t>(max_wins + 1, 0));
    for (const auto& tr : rows) {
      ++report.switch_histogram[tr.switch_count];
      for (std::size_t i = 0; i < n_holes; ++i) {
        ++report.per_hole_win_histogram[i][tr.wins[i]];
      }
    }
  }
  for (std::uint64_t h = 1; h <= 3; ++h) {
    std::uint64_t count = 0;
    for (const auto& tr : rows) {
      bool all = true;
      for (std::uint64_t w : tr.wins) all = all && w >= h;
      if (all) ++count;
    }
    report.h_indecisive_fraction.push_back(
        trials == 0 ? 0.0
                    : static_cast<double>(count) / static_cast<double>(trials));
  }
  report.trials = std::move(rows);
  return report;
}

}  // namespace odesc
