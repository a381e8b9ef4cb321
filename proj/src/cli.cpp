#include "odesc/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "odesc/classify.hpp"
#include "odesc/config.hpp"
#include "odesc/escape.hpp"
#include "odesc/interval.hpp"
#include "odesc/odometer.hpp"
#include "odesc/solenoid.hpp"

namespace odesc {

namespace {

using nlohmann::json;

void emit(const std::optional<std::string>& out, const std::string& text) {
  if (out && !out->empty()) {
    std::ofstream file(*out, std::ios::binary);
    if (!file) throw UsageError("cannot open output file '" + *out + "'");
    file << text;
  } else {
    std::cout << text;
  }
}

const SystemConfig& require_system(const ExperimentConfig& cfg) {
  if (!cfg.system) throw UsageError("config needs a 'system' section");
  return *cfg.system;
}

RadixSpec spec_of(const SystemConfig& sys) {
  if (!sys.spec) {
    throw UsageError("system.spec is required for kind '" + sys.kind + "'");
  }
  return RadixSpec::parse(*sys.spec);
}

HoleSystem hole_system_of(const SystemConfig& sys) {
  const RadixSpec spec = spec_of(sys);
  HoleSystem system{spec, {}};
  for (const HoleConfig& hole : sys.holes) {
    system.holes.push_back(
        Hole{AdicPoint::parse(spec, hole.center), hole.schedule});
  }
  return system;
}

PiecewiseAffineMap map_of(const SystemConfig& sys) {
  if (sys.map) return PiecewiseAffineMap(sys.map->breakpoints, sys.map->values);
  return PiecewiseAffineMap::tent();
}

std::vector<IntervalHole> interval_holes_of(const SystemConfig& sys) {
  std::vector<IntervalHole> holes;
  for (const HoleConfig& hole : sys.holes) {
    holes.push_back(IntervalHole{parse_rational(hole.center), hole.schedule});
  }
  return holes;
}

std::string odometer_trace_csv(const WinnerTrace& trace, std::size_t holes) {
  std::ostringstream csv;
  csv << "n";
  for (std::size_t i = 1; i <= holes; ++i) csv << ",L_" << i;
  for (std::size_t i = 1; i <= holes; ++i) csv << ",tau_" << i;
  csv << ",winner,overlap\n";
  for (const ScaleRow& row : trace.rows) {
    csv << row.scale;
    for (std::size_t d : row.depths) csv << "," << d;
    for (const BigInt& tau : row.taus) csv << "," << tau;
    csv << "," << row.winner << "," << (row.overlap ? 1 : 0) << "\n";
  }
  return csv.str();
}

std::string interval_trace_csv(const IntervalWinnerTrace& trace,
                               std::size_t holes) {
  std::ostringstream csv;
  csv << "n";
  for (std::size_t i = 1; i <= holes; ++i) csv << ",tau_" << i;
  csv << ",winner,overlap,degenerate,indeterminate\n";
  for (const IntervalScaleRow& row : trace.rows) {
    csv << row.scale;
    for (const HitOutcome& out : row.outcomes) {
      switch (out.kind) {
        case HitOutcome::Kind::Hit:
          csv << "," << out.steps;
          break;
        case HitOutcome::Kind::NeverHits:
          csv << ",inf";
          break;
        case HitOutcome::Kind::Undecided:
          csv << ",undecided";
          break;
      }
    }
    csv << "," << row.winner << "," << (row.overlap ? 1 : 0) << ","
        << (row.degenerate ? 1 : 0) << "," << (row.indeterminate ? 1 : 0)
        << "\n";
  }
  return csv.str();
}

std::string sample_csv(const SampleReport& report, std::size_t holes) {
  std::ostringstream csv;
  csv << "trial";
  for (std::size_t i = 1; i <= holes; ++i) csv << ",wins_" << i;
  csv << ",undecided,switches\n";
  for (const TrialResult& trial : report.trials) {
    csv << trial.trial;
    for (std::uint64_t w : trial.wins) csv << "," << w;
    csv << "," << trial.undecided << "," << trial.switch_count << "\n";
  }
  return csv.str();
}

json stats_json(const IndecisivenessStats& stats) {
  json j;
  j["wins"] = stats.wins;
  j["undecided"] = stats.undecided;
  j["degenerate"] = stats.degenerate;
  j["switch_count"] = stats.switch_count;
  for (std::uint64_t h = 1; h <= 3; ++h) {
    j["h_indecisive"].push_back(stats.h_indecisive(h));
  }
  return j;
}

std::size_t require_n_max(const ExperimentConfig& cfg) {
  if (!cfg.n_max) throw UsageError("'n_max' is required for this action");
  return *cfg.n_max;
}

int do_simulate(const ExperimentConfig& cfg) {
  const SystemConfig& sys = require_system(cfg);
  if (!cfg.point) throw UsageError("'point' is required for simulate");
  const std::size_t n_max = require_n_max(cfg);
  if (sys.kind == "odometer") {
    const HoleSystem system = hole_system_of(sys);
    const AdicPoint x = AdicPoint::parse(system.spec, *cfg.point);
    const WinnerTrace trace = winner_trace(system, x, n_max);
    emit(cfg.out, odometer_trace_csv(trace, system.holes.size()));
    if (log_level() >= 1) {
      std::cerr << stats_json(indecisiveness_stats(trace)).dump(2) << "\n";
    }
    return 0;
  }
  if (sys.kind == "tent") {
    const PiecewiseAffineMap map = map_of(sys);
    const std::vector<IntervalHole> holes = interval_holes_of(sys);
    const Rational x = parse_rational(*cfg.point);
    const std::uint64_t horizon = cfg.horizon.value_or(1000);
    const IntervalWinnerTrace trace =
        interval_winner_trace(map, holes, x, n_max, horizon);
    emit(cfg.out, interval_trace_csv(trace, holes.size()));
    if (log_level() >= 1) {
      std::cerr << stats_json(interval_indecisiveness_stats(trace)).dump(2)
                << "\n";
    }
    return 0;
  }
  throw UsageError("simulate supports system kinds odometer and tent");
}

int do_construct(const ExperimentConfig& cfg) {
  const SystemConfig& sys = require_system(cfg);
  if (cfg.schedule.empty()) {
    throw UsageError("'schedule' is required for construct");
  }
  json result;
  bool success = false;
  std::string reason;
  if (sys.kind == "odometer") {
    const HoleSystem system = hole_system_of(sys);
    const ConstructResult res = construct_indecisive(system, cfg.schedule);
    success = res.success;
    reason = res.reason;
    result["success"] = res.success;
    if (res.point) result["point"] = res.point->to_string();
    result["scales"] = res.scales;
    if (!res.reason.empty()) result["reason"] = res.reason;
  } else if (sys.kind == "tent") {
    const PiecewiseAffineMap map = map_of(sys);
    const std::vector<IntervalHole> holes = interval_holes_of(sys);
    const ConstructIntervalResult res =
        construct_indecisive_interval(map, holes, cfg.schedule);
    success = res.success;
    reason = res.reason;
    result["success"] = res.success;
    if (res.point) result["point"] = rational_to_string(*res.point);
    result["scales"] = res.scales;
    if (!res.reason.empty()) result["reason"] = res.reason;
  } else {
    throw UsageError("construct supports system kinds odometer and tent");
  }
  emit(cfg.out, result.dump(2) + "\n");
  if (!success) {
    std::cerr << "construct failed: " << reason << "\n";
    return 3;
  }
  return 0;
}

int do_classify(const ExperimentConfig& cfg) {
  if (cfg.specs.size() != 2) {
    throw UsageError("classify needs exactly two radix specs");
  }
  const RadixSpec a = RadixSpec::parse(cfg.specs[0]);
  const RadixSpec b = RadixSpec::parse(cfg.specs[1]);
  const ConjugacyResult res = conjugacy(a, b);
  std::ostringstream text;
  text << "A: " << ConjugacyInvariant::of(a).to_string() << "\n";
  text << "B: " << ConjugacyInvariant::of(b).to_string() << "\n";
  if (res.conjugate) {
    text << "conjugate\n";
  } else {
    text << "not-conjugate (witness prime " << *res.witness_prime << ")\n";
  }
  emit(cfg.out, text.str());
  return res.conjugate ? 0 : 1;
}

int do_sample(const ExperimentConfig& cfg) {
  const SystemConfig& sys = require_system(cfg);
  if (sys.kind != "odometer") {
    throw UsageError("sample supports system kind odometer");
  }
  if (!cfg.trials) throw UsageError("'trials' is required for sample");
  if (!cfg.seed) throw UsageError("'seed' is required for sample");
  const std::size_t n_max = require_n_max(cfg);
  const HoleSystem system = hole_system_of(sys);
  const SampleReport report = sample_genericity(
      system, n_max, *cfg.trials, *cfg.seed, cfg.threads.value_or(1));
  emit(cfg.out, sample_csv(report, system.holes.size()));
  if (log_level() >= 1) {
    json summary;
    summary["per_hole_win_histogram"] = report.per_hole_win_histogram;
    summary["switch_histogram"] = report.switch_histogram;
    summary["h_indecisive_fraction"] = report.h_indecisive_fraction;
    std::cerr << summary.dump(2) << "\n";
  }
  return 0;
}

int do_verify(const ExperimentConfig& cfg) {
  const SystemConfig& sys = require_system(cfg);
  if (sys.kind == "odometer") {
    if (!sys.holes.empty()) {
      const HoleSystem system = hole_system_of(sys);
      if (const auto defect = validate_system(system)) {
        emit(cfg.out, "failed: " + *defect + "\n");
        return 1;
      }
      emit(cfg.out, "verified: hole system is generic\n");
      return 0;
    }
    if (!cfg.depth) {
      throw UsageError("'depth' is required to verify a cyclic partition");
    }
    const RadixSpec spec = spec_of(sys);
    if (verify_cyclic_partition(spec, *cfg.depth)) {
      emit(cfg.out, "verified: cyclic partition at depth " +
                        std::to_string(*cfg.depth) + "\n");
      return 0;
    }
    emit(cfg.out, "failed: cyclic partition at depth " +
                      std::to_string(*cfg.depth) + "\n");
    return 1;
  }
  if (sys.kind == "solenoid") {
    if (!cfg.depth) {
      throw UsageError("'depth' is required to verify a solenoid model");
    }
    const SolenoidalModel model = build_solenoid(spec_of(sys), *cfg.depth);
    if (verify_solenoid_structure(model)) {
      emit(cfg.out, "verified: solenoid structure to stage " +
                        std::to_string(*cfg.depth) + "\n");
      return 0;
    }
    emit(cfg.out, "failed: solenoid structure to stage " +
                      std::to_string(*cfg.depth) + "\n");
    return 1;
  }
  throw UsageError("verify supports system kinds odometer and solenoid");
}

int do_solenoid(const ExperimentConfig& cfg) {
  const SystemConfig& sys = require_system(cfg);
  if (sys.kind != "solenoid") {
    throw UsageError("the solenoid action needs system kind solenoid");
  }
  if (!cfg.depth) throw UsageError("'depth' is required for solenoid");
  const SolenoidalModel model = build_solenoid(spec_of(sys), *cfg.depth);
  if (!verify_solenoid_structure(model)) {
    std::cerr << "solenoid structure check failed\n";
    return 1;
  }
  std::ostringstream csv;
  csv << "label,left,right\n";
  if (*cfg.depth > 0) {
    for (const StageInterval& iv : model.stage(*cfg.depth)) {
      csv << iv.label << "," << rational_to_string(iv.lo) << ","
          << rational_to_string(iv.hi) << "\n";
    }
  }
  emit(cfg.out, csv.str());
  return 0;
}

int dispatch(const ExperimentConfig& cfg) {
  if (cfg.action == "simulate") return do_simulate(cfg);
  if (cfg.action == "construct") return do_construct(cfg);
  if (cfg.action == "classify") return do_classify(cfg);
  if (cfg.action == "sample") return do_sample(cfg);
  if (cfg.action == "verify") return do_verify(cfg);
  if (cfg.action == "solenoid-check") return do_solenoid(cfg);
  throw UsageError("unknown action '" + cfg.action + "'");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{
      "odesc: exact open dynamical systems on adding machines and interval "
      "maps.\n\n"
      "CSV columns\n"
      "  simulate (odometer): n, L_i (cylinder depth of hole i at scale n),\n"
      "    tau_i (first-hit time of hole i), winner (1-based, 0 = no strict\n"
      "    winner), overlap (0/1: some pair of holes intersects).\n"
      "  simulate (tent): n, tau_i (steps, 'inf' = never, 'undecided'),\n"
      "    winner, overlap, degenerate (0/1: a hole covers [0,1]),\n"
      "    indeterminate (0/1: some outcome undecided at the horizon).\n"
      "  sample: trial, wins_i (scales hole i won), undecided (tied scales),\n"
      "    switches (winner changes).\n"
      "  solenoid: label, left, right (deepest-stage intervals, exact\n"
      "    rationals).\n\n"
      "Exit codes: 0 success; 1 semantic negative (not conjugate, failed\n"
      "verification, non-generic system); 2 usage error; 3 search failure.\n"
      "Environment: ODESC_LOG=0|1|2 sets diagnostic verbosity.\n"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  std::string spec_text;
  std::string spec_a;
  std::string spec_b;
  std::uint64_t seed = 0;
  std::uint64_t horizon = 0;
  std::uint64_t trials = 0;
  std::size_t n_max = 0;
  std::size_t depth = 0;
  unsigned threads = 0;
  bool solenoid_kind = false;

  const auto add_common = [&](CLI::App* cmd, bool config_required) {
    auto* config_opt = cmd->add_option("--config", config_path,
                                       "JSON experiment config file");
    if (config_required) config_opt->required();
    cmd->add_option("--out", out, "Output file (default: stdout)");
    return config_opt;
  };

  auto* sim = app.add_subcommand(
      "simulate", "Winner-trace CSV for a hole system and a start point");
  add_common(sim, true);
  auto* sim_n = sim->add_option("--n-max", n_max, "Scales 1..n_max");
  auto* sim_h =
      sim->add_option("--horizon", horizon, "Orbit horizon (interval maps)");

  auto* con = app.add_subcommand(
      "construct", "Build a point realizing a hole-winning schedule");
  add_common(con, true);

  auto* cls = app.add_subcommand(
      "classify", "Decide topological conjugacy of two adding machines");
  cls->add_option("spec_a", spec_a,
                  "First radix spec: '2', '2,3|4', 'factorial', 'primes'");
  cls->add_option("spec_b", spec_b, "Second radix spec");
  add_common(cls, false);

  auto* smp = app.add_subcommand(
      "sample", "Winner statistics over seeded random points, CSV per trial");
  add_common(smp, true);
  auto* smp_n = smp->add_option("--n-max", n_max, "Scales 1..n_max");
  auto* smp_seed = smp->add_option("--seed", seed, "Base sampling seed");
  auto* smp_trials = smp->add_option("--trials", trials, "Number of trials");
  auto* smp_threads =
      smp->add_option("--threads", threads,
                      "Worker threads (never changes the output)");

  auto* ver = app.add_subcommand(
      "verify", "Check cyclic partitions, hole genericity, or solenoid "
      "structure");
  add_common(ver, false);
  ver->add_option("--spec", spec_text, "Radix spec to verify");
  auto* ver_depth = ver->add_option("--depth", depth, "Depth / stage count");
  ver->add_flag("--solenoid", solenoid_kind,
                "Verify solenoid structure instead of a cyclic partition");

  auto* sol = app.add_subcommand(
      "solenoid", "Build a solenoid model and dump its deepest stage as CSV");
  add_common(sol, false);
  sol->add_option("--spec", spec_text, "Radix spec driving the construction");
  auto* sol_depth = sol->add_option("--depth", depth, "Stage count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ExperimentConfig cfg;
    std::string expected_action;
    if (app.got_subcommand(sim)) expected_action = "simulate";
    if (app.got_subcommand(con)) expected_action = "construct";
    if (app.got_subcommand(cls)) expected_action = "classify";
    if (app.got_subcommand(smp)) expected_action = "sample";
    if (app.got_subcommand(ver)) expected_action = "verify";
    if (app.got_subcommand(sol)) expected_action = "solenoid-check";

    if (!config_path.empty()) {
      cfg = load_config(config_path);
      if (cfg.action != expected_action) {
        throw UsageError("config action '" + cfg.action +
                         "' does not match subcommand '" + expected_action +
                         "'");
      }
    } else {
      cfg.action = expected_action;
    }

    // Flags override config values.
    if (!out.empty()) cfg.out = out;
    if (sim_n->count() || smp_n->count()) cfg.n_max = n_max;
    if (sim_h->count()) cfg.horizon = horizon;
    if (smp_seed->count()) cfg.seed = seed;
    if (smp_trials->count()) cfg.trials = trials;
    if (smp_threads->count()) cfg.threads = threads;
    if (ver_depth->count() || sol_depth->count()) cfg.depth = depth;

    if (app.got_subcommand(cls) && config_path.empty()) {
      if (spec_a.empty() || spec_b.empty()) {
        throw UsageError("classify needs two radix specs or --config");
      }
      cfg.specs = {spec_a, spec_b};
    }
    if ((app.got_subcommand(ver) || app.got_subcommand(sol)) &&
        config_path.empty()) {
      if (spec_text.empty()) {
        throw UsageError("--spec is required without --config");
      }
      SystemConfig sys;
      sys.kind = (app.got_subcommand(sol) || solenoid_kind) ? "solenoid"
                                                            : "odometer";
      sys.spec = spec_text;
      cfg.system = std::move(sys);
    }

    return dispatch(cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace odesc
