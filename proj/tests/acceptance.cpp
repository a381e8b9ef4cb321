// Acceptance gate: ten end-to-end criteria, one [PASS]/[FAIL] line each.
// Exit code is the number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <utility>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "odesc/classify.hpp"
#include "odesc/cli.hpp"
#include "odesc/escape.hpp"
#include "odesc/interval.hpp"
#include "odesc/odometer.hpp"
#include "odesc/solenoid.hpp"

using namespace odesc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<RadixSpec> spec_pool() {
  return {RadixSpec::constant(2),
          RadixSpec::constant(3),
          RadixSpec::constant(10),
          RadixSpec::eventually_periodic({}, {2, 3}),
          RadixSpec::eventually_periodic({2, 3}, {4}),
          RadixSpec::eventually_periodic({5}, {2, 3}),
          RadixSpec::factorial(),
          RadixSpec::nth_prime()};
}

// Deepest L >= 1 whose modulus stays within the limit.
std::size_t depth_for_modulus(const RadixSpec& spec, const BigInt& limit) {
  std::size_t depth = 1;
  while (spec.modulus(depth + 1) <= limit) ++depth;
  return depth;
}

BigInt random_below(std::mt19937_64& rng, const BigInt& bound) {
  const std::uint64_t raw = rng();
  return BigInt(raw) % bound;
}

// Criterion 1: closed-form first hits equal the digit-increment oracle on
// 1,000 randomized (spec, point, cylinder) cases with modulus up to 10^5.
bool oracle_equivalence(std::string& note) {
  const auto start = Clock::now();
  const auto pool = spec_pool();
  std::mt19937_64 rng(10001);
  for (int trial = 0; trial < 1000; ++trial) {
    const RadixSpec& spec = pool[rng() % pool.size()];
    BigInt limit = 10;
    for (int k = static_cast<int>(rng() % 5); k > 0; --k) limit *= 10;
    const std::size_t depth = depth_for_modulus(spec, limit);
    const BigInt m = spec.modulus(depth);

    AdicPoint x = (rng() % 5 == 0)
                      ? AdicPoint::sampled(spec, rng())
                      : AdicPoint::from_residue(spec, random_below(rng, m),
                                                depth);
    const Cylinder target{spec, depth, random_below(rng, m)};
    const BigInt fast = first_hit(x, target);
    const auto brute =
        first_hit_bruteforce(x, target, m.convert_to<std::uint64_t>());
    if (!brute || *brute != fast) {
      note = "mismatch at trial " + std::to_string(trial);
      return false;
    }
  }
  const double elapsed = seconds_since(start);
  note = "1000 cases in " + std::to_string(elapsed) + "s";
  return elapsed < 10.0;
}

// Criterion 2: the adding machine is an exact isometry on 1,000 random
// pairs, and cyclic partitions verify exhaustively for depths up to 6.
bool isometry_and_partitions(std::string& note) {
  const std::vector<RadixSpec> specs = {
      RadixSpec::constant(2), RadixSpec::eventually_periodic({}, {2, 3}),
      RadixSpec::constant(10), RadixSpec::eventually_periodic({2, 3}, {4})};
  for (const RadixSpec& spec : specs) {
    for (std::size_t depth = 0; depth <= 6; ++depth) {
      if (!verify_cyclic_partition(spec, depth)) {
        note = "cyclic partition failed for " + spec.to_string() +
               " at depth " + std::to_string(depth);
        return false;
      }
    }
  }
  std::mt19937_64 rng(10002);
  for (int trial = 0; trial < 1000; ++trial) {
    const RadixSpec& spec = specs[rng() % specs.size()];
    const std::size_t depth = 1 + rng() % 20;
    const BigInt m = spec.modulus(depth);
    AdicPoint x = AdicPoint::from_residue(spec, random_below(rng, m), depth);
    AdicPoint y = (rng() % 10 == 0)
                      ? x
                      : AdicPoint::from_residue(spec, random_below(rng, m),
                                                depth);
    const UltraDistance before = distance(x, y);
    const UltraDistance after = distance(translate(x, 1), translate(y, 1));
    if (before.kind != after.kind || before.exponent != after.exponent) {
      note = "distance changed under the map at trial " +
             std::to_string(trial);
      return false;
    }
  }
  note = "4 specs x depths 0..6 exhaustive; 1000 exact pairs";
  return true;
}

// Criterion 3: the first m_L iterates visit every depth-L cylinder exactly
// once, for moduli up to 4096, by honest iteration.
bool equidistribution(std::string& note) {
  const auto pool = spec_pool();
  std::mt19937_64 rng(10003);
  for (const RadixSpec& spec : pool) {
    const std::size_t depth = depth_for_modulus(spec, 4096);
    const std::uint64_t m = spec.modulus(depth).convert_to<std::uint64_t>();
    for (int rep = 0; rep < 2; ++rep) {
      // Both starts are exact: a random integer point and an all-ones tail
      // (valid because every radix is at least 2).
      AdicPoint x =
          rep == 0 ? AdicPoint::parse(spec, "digits:|1")
                   : AdicPoint::from_residue(
                         spec, random_below(rng, spec.modulus(depth)), depth);
      std::vector<std::uint64_t> visits(m, 0);
      for (std::uint64_t step = 0; step < m; ++step) {
        ++visits[x.residue(depth).convert_to<std::uint64_t>()];
        x = translate(x, 1);
      }
      for (std::uint64_t r = 0; r < m; ++r) {
        if (visits[r] != 1) {
          note = spec.to_string() + " missed residue " + std::to_string(r) +
                 " at depth " + std::to_string(depth);
          return false;
        }
      }
    }
  }
  note = "8 specs, moduli up to 4096, two starts each";
  return true;
}

// Criterion 4: the worked two-hole dyadic trace, cross-checked against the
// brute-force oracle.
bool worked_trace(std::string& note) {
  const RadixSpec spec = RadixSpec::constant(2);
  HoleSystem system{spec, {}};
  const RadiusSchedule rho =
      RadiusSchedule::geometric(Rational(1), Rational(1, 2));
  system.holes.push_back(Hole{AdicPoint::zero(spec), rho});
  system.holes.push_back(
      Hole{AdicPoint::parse(spec, "digits:|1,0"), rho});
  const AdicPoint x = AdicPoint::from_residue(spec, BigInt(9), 6);

  const WinnerTrace trace = winner_trace(system, x, 6);
  const std::vector<std::size_t> expected = {2, 2, 2, 1, 2, 2};
  for (std::size_t n = 0; n < 6; ++n) {
    if (trace.rows[n].winner != expected[n]) {
      note = "winner at scale " + std::to_string(n + 1) + " is " +
             std::to_string(trace.rows[n].winner);
      return false;
    }
    for (std::size_t i = 0; i < 2; ++i) {
      const Cylinder cyl{spec, trace.rows[n].depths[i],
                         system.holes[i].center.residue(
                             trace.rows[n].depths[i])};
      const auto brute = first_hit_bruteforce(x, cyl, 1 << 10);
      if (!brute || *brute != trace.rows[n].taus[i]) {
        note = "brute-force mismatch at scale " + std::to_string(n + 1);
        return false;
      }
    }
  }
  if (indecisiveness_stats(trace).switch_count != 2) {
    note = "switch count is not 2";
    return false;
  }
  note = "winners 2,2,2,1,2,2 with switch count 2, oracle-confirmed";
  return true;
}

// Criterion 5: 20 randomized generic systems; the constructor succeeds and
// its witness's verified winner sequence matches the schedule, < 1 s/case.
bool constructor_soundness(std::string& note) {
  const RadixSpec spec = RadixSpec::eventually_periodic({}, {2, 3});
  std::mt19937_64 rng(10005);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    HoleSystem system{spec, {}};
    const std::size_t n_holes = 2 + rng() % 3;  // N <= 4
    // Distinct period-2 digit tails put the centers on pairwise distinct
    // orbits; the max tail (1,2) is excluded because it lies on the orbit
    // of the integers, as does (0,0). Prefix lengths stay even so tails
    // align with the alternating radices 2,3.
    const std::vector<std::pair<int, int>> tails = {
        {0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}};
    for (int attempt = 0;; ++attempt) {
      if (attempt > 200) {
        note = "could not sample a generic system";
        return false;
      }
      system.holes.clear();
      std::vector<std::size_t> tail_order = {0, 1, 2, 3, 4};
      std::shuffle(tail_order.begin(), tail_order.end(), rng);
      for (std::size_t i = 0; i < n_holes; ++i) {
        std::vector<int> prefix;
        const std::size_t len = 2 * (rng() % 2);
        for (std::size_t d = 1; d <= len; ++d) {
          prefix.push_back(static_cast<int>(
              rng() % static_cast<std::uint64_t>(spec.radix_at(d))));
        }
        std::ostringstream text;
        text << "digits:";
        for (std::size_t d = 0; d < prefix.size(); ++d) {
          text << (d ? "," : "") << prefix[d];
        }
        const auto& tail = tails[tail_order[i]];
        text << "|" << tail.first << "," << tail.second;
        system.holes.push_back(
            Hole{AdicPoint::parse(spec, text.str()),
                 RadiusSchedule::geometric(Rational(1), Rational(1, 2))});
      }
      if (!validate_system(system)) break;
    }
    std::vector<std::size_t> schedule;
    const std::size_t len = 1 + rng() % 8;
    while (schedule.size() < len) schedule.push_back(1 + rng() % n_holes);

    const auto start = Clock::now();
    const ConstructResult res = construct_indecisive(system, schedule);
    const double elapsed = seconds_since(start);
    worst = std::max(worst, elapsed);
    if (elapsed >= 1.0) {
      note = "construction took " + std::to_string(elapsed) + "s";
      return false;
    }
    if (!res.success) {
      note = "construction failed: " + res.reason;
      return false;
    }
    for (std::size_t k = 0; k < schedule.size(); ++k) {
      const ScaleRow row = scale_row(system, *res.point, res.scales[k]);
      if (row.winner != schedule[k]) {
        note = "schedule entry " + std::to_string(k + 1) +
               " not realized at scale " + std::to_string(res.scales[k]);
        return false;
      }
    }
  }
  note = "20 systems, worst case " + std::to_string(worst) + "s";
  return true;
}

// Criterion 6: the conjugacy classifier's reference table.
bool classifier_table(std::string& note) {
  const auto two = RadixSpec::constant(2);
  const auto three = RadixSpec::constant(3);
  const auto four = RadixSpec::constant(4);
  const auto six = RadixSpec::constant(6);
  const auto two_three = RadixSpec::eventually_periodic({}, {2, 3});
  const auto pre2_per3 = RadixSpec::eventually_periodic({2}, {3});

  if (!conjugacy(two, four).conjugate) {
    note = "2 vs 4 should be conjugate";
    return false;
  }
  const auto r23 = conjugacy(two, three);
  if (r23.conjugate || r23.witness_prime != 2) {
    note = "2 vs 3 should differ at prime 2";
    return false;
  }
  if (!conjugacy(two_three, six).conjugate) {
    note = "2,3 vs 6 should be conjugate";
    return false;
  }
  if (conjugacy(pre2_per3, six).conjugate) {
    note = "pre-2 period-3 vs 6 should not be conjugate";
    return false;
  }
  if (!is_infinity_adic(RadixSpec::factorial())) {
    note = "factorial should be infinity-adic";
    return false;
  }
  for (const RadixSpec& spec :
       {two, three, four, six, two_three, pre2_per3,
        RadixSpec::eventually_periodic({2, 3}, {4})}) {
    if (is_infinity_adic(spec)) {
      note = spec.to_string() + " must not be infinity-adic";
      return false;
    }
  }
  note = "reference table exact";
  return true;
}

// Criterion 7: tent backward-orbit density, exact rational comparison.
bool backward_density(std::string& note) {
  const auto tent = PiecewiseAffineMap::tent();
  for (const Rational& y :
       {Rational(1, 2), Rational(1, 3), Rational(2, 5)}) {
    for (std::size_t d = 0; d <= 16; ++d) {
      const Rational bound = Rational(2) / Rational(BigInt(1) << d);
      if (backward_gap(tent, y, d) > bound) {
        note = "gap bound violated at depth " + std::to_string(d);
        return false;
      }
    }
  }
  note = "three centers, depths 0..16, gap <= 2^(1-d)";
  return true;
}

// Criterion 8: tent first hits always decide within q + 2 iterations.
bool decision_completeness(std::string& note) {
  const auto tent = PiecewiseAffineMap::tent();
  std::mt19937_64 rng(10008);
  for (int trial = 0; trial < 500; ++trial) {
    const std::uint64_t q = 2 + rng() % 9999;
    const std::uint64_t p = rng() % (q + 1);
    const Rational x = Rational(BigInt(p), BigInt(q));
    const std::uint64_t a = rng() % 1000;
    const std::uint64_t b = a + 1 + rng() % (1000 - a);
    const OpenInterval hole{Rational(BigInt(a), BigInt(1000)),
                            Rational(BigInt(b), BigInt(1000))};
    const HitOutcome out = first_hit_interval(tent, x, hole, q + 2);
    if (out.kind == HitOutcome::Kind::Undecided) {
      note = "undecided orbit with denominator " + std::to_string(q);
      return false;
    }
  }
  note = "500 rational orbits, horizon q+2, all decided";
  return true;
}

// Criterion 9: the doubling solenoid to stage 10 verifies, and the stage
// maps advance itineraries by exactly one on 1,000 points per stage.
bool solenoid_structure(std::string& note) {
  const SolenoidalModel model = build_solenoid(RadixSpec::constant(2), 10);
  if (!verify_solenoid_structure(model)) {
    note = "structure verification failed";
    return false;
  }
  std::mt19937_64 rng(10009);
  for (std::size_t s = 1; s <= 10; ++s) {
    const auto& intervals = model.stage(s);
    const std::uint64_t m = intervals.size();
    for (int i = 0; i < 1000; ++i) {
      const StageInterval& iv = intervals[rng() % m];
      const Rational offset(BigInt(rng() % 1000), BigInt(1000));
      const Rational x = iv.lo + offset * (iv.hi - iv.lo);
      const auto before = model.itinerary(x, s);
      const auto after = model.itinerary(model.stage_map(s, x), s);
      if (!before || !after || *after != (*before + 1) % m) {
        note = "semiconjugacy failed at stage " + std::to_string(s);
        return false;
      }
    }
  }
  note = "stage 10 (1024 intervals) verified; 1000 points per stage";
  return true;
}

// Criterion 10: the sample subcommand's CSV is byte-identical across runs
// and thread counts for a fixed seed.
bool sample_determinism(std::string& note) {
  const char* cfg_path = "acceptance_sample_cfg.json";
  {
    std::ofstream cfg(cfg_path, std::ios::binary);
    cfg << R"({
      "action": "sample",
      "system": {
        "kind": "odometer",
        "spec": "2,3|4",
        "holes": [
          {"center": "digits:|0",
           "schedule": {"kind": "geometric", "coefficient": "1",
                        "lambda": "1/2"}},
          {"center": "digits:|1,0,2",
           "schedule": {"kind": "harmonic", "coefficient": "1"}}
        ]
      },
      "n_max": 6,
      "trials": 64,
      "seed": 2718
    })";
  }
  const auto run_sample = [&](const char* threads, const char* out) {
    const char* argv[] = {"odesc",     "sample", "--config", cfg_path,
                          "--threads", threads,  "--out",    out};
    return run_cli(8, argv);
  };
  if (run_sample("1", "acceptance_sample_1.csv") != 0 ||
      run_sample("4", "acceptance_sample_4.csv") != 0 ||
      run_sample("1", "acceptance_sample_r.csv") != 0) {
    note = "sample run failed";
    return false;
  }
  const auto slurp = [](const char* path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
  };
  const std::string one = slurp("acceptance_sample_1.csv");
  if (one.empty() || one != slurp("acceptance_sample_4.csv") ||
      one != slurp("acceptance_sample_r.csv")) {
    note = "CSV bytes differ across runs or thread counts";
    return false;
  }
  note = "64 trials, threads 1 vs 4, three runs byte-identical";
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    const char* label;
    bool (*check)(std::string&);
  };
  const Criterion criteria[] = {
      {"oracle equivalence of first-hit routes", oracle_equivalence},
      {"isometry and cyclic partitions", isometry_and_partitions},
      {"equidistribution of cylinder visits", equidistribution},
      {"worked two-hole trace reproduction", worked_trace},
      {"constructor soundness on random systems", constructor_soundness},
      {"conjugacy classifier table", classifier_table},
      {"tent backward-orbit density", backward_density},
      {"tent decision completeness", decision_completeness},
      {"solenoid structure and semiconjugacy", solenoid_structure},
      {"sample determinism across threads", sample_determinism},
  };
  int failures = 0;
  int number = 0;
  for (const Criterion& c : criteria) {
    ++number;
    std::string note;
    bool ok = false;
    try {
      ok = c.check(note);
    } catch (const std::exception& e) {
      note = std::string("exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << number << ". " << c.label
              << " (" << note << ")\n";
  }
  return failures;
}
