#include "odesc/config.hpp"

#include <fstream>
#include <sstream>

namespace odesc {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw UsageError("config field '" + path + "': " + why);
}

const json& member(const json& j, const std::string& path,
                   const std::string& key) {
  if (!j.is_object()) fail(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(join(path, key), "missing");
  return *it;
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

std::uint64_t as_uint(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) fail(path, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

Rational as_rational(const json& j, const std::string& path) {
  try {
    return parse_rational(as_string(j, path));
  } catch (const UsageError& e) {
    fail(path, e.what());
  }
}

void reject_unknown_keys(const json& j, const std::string& path,
                         std::initializer_list<const char*> known) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) fail(join(path, key), "unknown key");
  }
}

}  // namespace

bool schedules_equal(const RadiusSchedule& a, const RadiusSchedule& b) {
  return a.kind() == b.kind() && a.coefficient() == b.coefficient() &&
         a.lambda() == b.lambda() && a.entries() == b.entries();
}

json schedule_to_json(const RadiusSchedule& schedule) {
  json j;
  switch (schedule.kind()) {
    case RadiusSchedule::Kind::Geometric:
      j["kind"] = "geometric";
      j["coefficient"] = rational_to_string(schedule.coefficient());
      j["lambda"] = rational_to_string(schedule.lambda());
      break;
    case RadiusSchedule::Kind::Harmonic:
      j["kind"] = "harmonic";
      j["coefficient"] = rational_to_string(schedule.coefficient());
      break;
    case RadiusSchedule::Kind::ExplicitList: {
      j["kind"] = "explicit";
      json entries = json::array();
      for (const Rational& r : schedule.entries()) {
        entries.push_back(rational_to_string(r));
      }
      j["entries"] = std::move(entries);
      j["tail_lambda"] = rational_to_string(schedule.lambda());
      break;
    }
  }
  return j;
}

RadiusSchedule schedule_from_json(const json& doc, const std::string& path) {
  const std::string kind = as_string(member(doc, path, "kind"),
                                     join(path, "kind"));
  if (kind == "geometric") {
    reject_unknown_keys(doc, path, {"kind", "coefficient", "lambda"});
    return RadiusSchedule::geometric(
        as_rational(member(doc, path, "coefficient"),
                    join(path, "coefficient")),
        as_rational(member(doc, path, "lambda"), join(path, "lambda")));
  }
  if (kind == "harmonic") {
    reject_unknown_keys(doc, path, {"kind", "coefficient"});
    return RadiusSchedule::harmonic(as_rational(
        member(doc, path, "coefficient"), join(path, "coefficient")));
  }
  if (kind == "explicit") {
    reject_unknown_keys(doc, path, {"kind", "entries", "tail_lambda"});
    const json& entries = member(doc, path, "entries");
    if (!entries.is_array()) fail(join(path, "entries"), "expected an array");
    std::vector<Rational> list;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      list.push_back(as_rational(
          entries[i], join(path, "entries[" + std::to_string(i) + "]")));
    }
    return RadiusSchedule::explicit_list(
        std::move(list), as_rational(member(doc, path, "tail_lambda"),
                                     join(path, "tail_lambda")));
  }
  fail(join(path, "kind"),
       "expected one of geometric, harmonic, explicit; got '" + kind + "'");
}

namespace {

SystemConfig system_from_json(const json& doc, const std::string& path) {
  reject_unknown_keys(doc, path, {"kind", "spec", "map", "holes"});
  SystemConfig sys;
  sys.kind = as_string(member(doc, path, "kind"), join(path, "kind"));
  if (sys.kind != "odometer" && sys.kind != "tent" && sys.kind != "solenoid") {
    fail(join(path, "kind"),
         "expected one of odometer, tent, solenoid; got '" + sys.kind + "'");
  }
  if (doc.contains("spec")) {
    sys.spec = as_string(doc["spec"], join(path, "spec"));
  }
  if (doc.contains("map")) {
    const json& m = doc["map"];
    const std::string mpath = join(path, "map");
    reject_unknown_keys(m, mpath, {"breakpoints", "values"});
    MapConfig map;
    const json& bp = member(m, mpath, "breakpoints");
    const json& val = member(m, mpath, "values");
    if (!bp.is_array()) fail(join(mpath, "breakpoints"), "expected an array");
    if (!val.is_array()) fail(join(mpath, "values"), "expected an array");
    for (std::size_t i = 0; i < bp.size(); ++i) {
      map.breakpoints.push_back(as_rational(
          bp[i], join(mpath, "breakpoints[" + std::to_string(i) + "]")));
    }
    for (std::size_t i = 0; i < val.size(); ++i) {
      map.values.push_back(as_rational(
          val[i], join(mpath, "values[" + std::to_string(i) + "]")));
    }
    sys.map = std::move(map);
  }
  if (doc.contains("holes")) {
    const json& holes = doc["holes"];
    if (!holes.is_array()) fail(join(path, "holes"), "expected an array");
    for (std::size_t i = 0; i < holes.size(); ++i) {
      const std::string hpath = join(path, "holes[" + std::to_string(i) + "]");
      reject_unknown_keys(holes[i], hpath, {"center", "schedule"});
      sys.holes.push_back(HoleConfig{
          as_string(member(holes[i], hpath, "center"), join(hpath, "center")),
          schedule_from_json(member(holes[i], hpath, "schedule"),
                             join(hpath, "schedule"))});
    }
  }
  return sys;
}

json system_to_json(const SystemConfig& sys) {
  json j;
  j["kind"] = sys.kind;
  if (sys.spec) j["spec"] = *sys.spec;
  if (sys.map) {
    json bp = json::array();
    json val = json::array();
    for (const Rational& r : sys.map->breakpoints) {
      bp.push_back(rational_to_string(r));
    }
    for (const Rational& r : sys.map->values) {
      val.push_back(rational_to_string(r));
    }
    j["map"] = {{"breakpoints", std::move(bp)}, {"values", std::move(val)}};
  }
  if (!sys.holes.empty()) {
    json holes = json::array();
    for (const HoleConfig& hole : sys.holes) {
      holes.push_back({{"center", hole.center},
                       {"schedule", schedule_to_json(hole.schedule)}});
    }
    j["holes"] = std::move(holes);
  }
  return j;
}

}  // namespace

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.action == b.action && a.system == b.system && a.point == b.point &&
         a.n_max == b.n_max && a.horizon == b.horizon &&
         a.trials == b.trials && a.seed == b.seed && a.threads == b.threads &&
         a.depth == b.depth && a.schedule == b.schedule &&
         a.specs == b.specs && a.out == b.out;
}

ExperimentConfig config_from_json(const json& doc) {
  reject_unknown_keys(doc, "",
                      {"action", "system", "point", "n_max", "horizon",
                       "trials", "seed", "threads", "depth", "schedule",
                       "specs", "out"});
  ExperimentConfig cfg;
  cfg.action = as_string(member(doc, "", "action"), "action");
  const bool known_action =
      cfg.action == "simulate" || cfg.action == "construct" ||
      cfg.action == "classify" || cfg.action == "sample" ||
      cfg.action == "verify" || cfg.action == "solenoid-check";
  if (!known_action) {
    fail("action", "unknown action '" + cfg.action + "'");
  }
  if (doc.contains("system")) {
    cfg.system = system_from_json(doc["system"], "system");
  }
  if (doc.contains("point")) cfg.point = as_string(doc["point"], "point");
  if (doc.contains("n_max")) {
    cfg.n_max = static_cast<std::size_t>(as_uint(doc["n_max"], "n_max"));
  }
  if (doc.contains("horizon")) cfg.horizon = as_uint(doc["horizon"], "horizon");
  if (doc.contains("trials")) cfg.trials = as_uint(doc["trials"], "trials");
  if (doc.contains("seed")) cfg.seed = as_uint(doc["seed"], "seed");
  if (doc.contains("threads")) {
    cfg.threads = static_cast<unsigned>(as_uint(doc["threads"], "threads"));
  }
  if (doc.contains("depth")) {
    cfg.depth = static_cast<std::size_t>(as_uint(doc["depth"], "depth"));
  }
  if (doc.contains("schedule")) {
    const json& sched = doc["schedule"];
    if (!sched.is_array()) fail("schedule", "expected an array");
    for (std::size_t i = 0; i < sched.size(); ++i) {
      cfg.schedule.push_back(static_cast<std::size_t>(
          as_uint(sched[i], "schedule[" + std::to_string(i) + "]")));
    }
  }
  if (doc.contains("specs")) {
    const json& specs = doc["specs"];
    if (!specs.is_array()) fail("specs", "expected an array");
    for (std::size_t i = 0; i < specs.size(); ++i) {
      cfg.specs.push_back(
          as_string(specs[i], "specs[" + std::to_string(i) + "]"));
    }
  }
  if (doc.contains("out")) cfg.out = as_string(doc["out"], "out");
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["action"] = cfg.action;
  if (cfg.system) j["system"] = system_to_json(*cfg.system);
  if (cfg.point) j["point"] = *cfg.point;
  if (cfg.n_max) j["n_max"] = *cfg.n_max;
  if (cfg.horizon) j["horizon"] = *cfg.horizon;
  if (cfg.trials) j["trials"] = *cfg.trials;
  if (cfg.seed) j["seed"] = *cfg.seed;
  if (cfg.threads) j["threads"] = *cfg.threads;
  if (cfg.depth) j["depth"] = *cfg.depth;
  if (!cfg.schedule.empty()) j["schedule"] = cfg.schedule;
  if (!cfg.specs.empty()) j["specs"] = cfg.specs;
  if (cfg.out) j["out"] = *cfg.out;
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw UsageError("config file '" + path + "' is not valid JSON: " +
                     e.what());
  }
  try {
    return config_from_json(doc);
  } catch (const UsageError& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
}

}  // namespace odesc
