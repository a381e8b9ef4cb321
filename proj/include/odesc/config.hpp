// JSON experiment configuration: declarative descriptions of a system
// (adding machine, tent-style interval map, or solenoid model), its holes,
// and the action to run, with lossless round-tripping and parse errors that
// name the offending JSON path.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "odesc/escape.hpp"
#include "odesc/numeric.hpp"

namespace odesc {

bool schedules_equal(const RadiusSchedule& a, const RadiusSchedule& b);

// One hole: a center (adding-machine point text such as "digits:1,0|0" or a
// rational such as "2/5", depending on the system kind) plus its radius
// schedule.
struct HoleConfig {
  std::string center;
  RadiusSchedule schedule;

  friend bool operator==(const HoleConfig& a, const HoleConfig& b) {
    return a.center == b.center && schedules_equal(a.schedule, b.schedule);
  }
};

// Piecewise-affine map given by breakpoints and node values (rationals).
struct MapConfig {
  std::vector<Rational> breakpoints;
  std::vector<Rational> values;

  friend bool operator==(const MapConfig& a, const MapConfig& b) {
    return a.breakpoints == b.breakpoints && a.values == b.values;
  }
};

struct SystemConfig {
  std::string kind;                 // "odometer" | "tent" | "solenoid"
  std::optional<std::string> spec;  // radix spec text (odometer, solenoid)
  std::optional<MapConfig> map;     // interval map override; default tent
  std::vector<HoleConfig> holes;

  friend bool operator==(const SystemConfig& a, const SystemConfig& b) {
    return a.kind == b.kind && a.spec == b.spec && a.map == b.map &&
           a.holes == b.holes;
  }
};

struct ExperimentConfig {
  std::string action;  // simulate | construct | classify | sample | verify |
                       // solenoid-check
  std::optional<SystemConfig> system;
  std::optional<std::string> point;
  std::optional<std::size_t> n_max;
  std::optional<std::uint64_t> horizon;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::size_t> depth;
  std::vector<std::size_t> schedule;  // 1-based hole indices (construct)
  std::vector<std::string> specs;     // radix spec pair (classify)
  std::optional<std::string> out;

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);
};

// Strict parse: unknown keys, wrong types, malformed rationals, and missing
// required fields all throw UsageError naming the JSON path.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);

// Reads and parses a config file; I/O and JSON syntax errors become
// UsageError with the file name in the message.
ExperimentConfig load_config(const std::string& path);

nlohmann::json schedule_to_json(const RadiusSchedule& schedule);
RadiusSchedule schedule_from_json(const nlohmann::json& doc,
                                  const std::string& path);

}  // namespace odesc
