#include "nfmusic/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace nfmusic::config {

namespace {

void check_keys(const Json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) {
    throw ConfigError(std::string(where) + ": expected an object");
  }
  const std::set<std::string_view> ok(allowed);
  for (const auto& [key, value] : j.items()) {
    if (!ok.contains(key)) {
      throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
void read(const Json& j, std::string_view key, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) {
    return;
  }
  try {
    out = it->template get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("key '" + std::string(key) + "' has the wrong type");
  }
}

double snr_from_json(const Json& v) {
  if (v.is_number()) {
    return v.get<double>();
  }
  if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "+inf")) {
    return std::numeric_limits<double>::infinity();
  }
  throw ConfigError("snr_db entries must be numbers or \"inf\"");
}

Json snr_to_json(double snr) {
  if (std::isinf(snr) && snr > 0) {
    return "inf";
  }
  return snr;
}

double parse_number(std::string_view text) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    if (text == "inf" || text == "+inf") {
      return std::numeric_limits<double>::infinity();
    }
    throw ConfigError("not a number: '" + std::string(text) + "'");
  }
  return out;
}

}  // namespace

Scenario preset(std::string_view name) {
  if (name == "paper") {
    return Scenario::paper();
  }
  if (name == "desk") {
    return Scenario::desk();
  }
  throw ConfigError("unknown preset '" + std::string(name) + "' (expected paper or desk)");
}

Json scenario_to_json(const Scenario& s) {
  Json targets{{"policy", s.policy == TargetPolicy::Fixed ? "fixed" : "random"},
               {"fixed", Json::array()}};
  for (const TargetSpec& t : s.fixed_targets) {
    targets["fixed"].push_back(Json{{"u", t.direction}, {"r", t.range}});
  }
  Json snr = Json::array();
  for (const double v : s.snr_db) {
    snr.push_back(snr_to_json(v));
  }
  Json modes = Json::array();
  for (const Mode m : s.modes) {
    modes.push_back(std::string(mode_name(m)));
  }
  return Json{
      {"name", s.name},
      {"array",
       {{"n_antennas", s.array.n_antennas},
        {"carrier_hz", s.array.carrier_hz},
        {"element_spacing_m", s.array.element_spacing_m}}},
      {"bandwidth_hz", s.bandwidth_hz},
      {"subcarriers", s.subcarriers},
      {"rf_chains", s.rf_chains},
      {"snapshots", s.snapshots},
      {"n_targets", s.n_targets},
      {"targets", targets},
      {"snr_db", snr},
      {"trials", s.trials},
      {"seed", s.seed},
      {"grid",
       {{"step_u", s.grid_step_u},
        {"step_r", s.grid_step_r},
        {"min_r", s.grid_min_r},
        {"max_r", s.grid_max_r ? Json(*s.grid_max_r) : Json(nullptr)}}},
      {"modes", modes},
      {"clamp", s.clamp},
  };
}

Scenario scenario_from_json(const Json& j) {
  check_keys(j, "scenario",
             {"preset", "name", "array", "bandwidth_hz", "subcarriers", "rf_chains", "snapshots",
              "n_targets", "targets", "snr_db", "trials", "seed", "grid", "modes", "clamp"});
  Scenario s;
  if (j.contains("preset")) {
    if (!j["preset"].is_string()) {
      throw ConfigError("preset must be a string");
    }
    s = preset(j["preset"].get<std::string>());
  }
  read(j, "name", s.name);
  if (j.contains("array")) {
    const Json& a = j["array"];
    check_keys(a, "array", {"n_antennas", "carrier_hz", "element_spacing_m"});
    const double old_carrier = s.array.carrier_hz;
    read(a, "n_antennas", s.array.n_antennas);
    read(a, "carrier_hz", s.array.carrier_hz);
    if (a.contains("element_spacing_m")) {
      read(a, "element_spacing_m", s.array.element_spacing_m);
    } else if (s.array.carrier_hz != old_carrier || s.array.element_spacing_m == 0.0) {
      s.array.element_spacing_m = s.array.carrier_hz > 0 ? s.array.wavelength() / 2.0 : 0.0;
    }
  }
  read(j, "bandwidth_hz", s.bandwidth_hz);
  read(j, "subcarriers", s.subcarriers);
  read(j, "rf_chains", s.rf_chains);
  read(j, "snapshots", s.snapshots);
  read(j, "n_targets", s.n_targets);
  if (j.contains("targets")) {
    const Json& t = j["targets"];
    check_keys(t, "targets", {"policy", "fixed"});
    if (t.contains("policy")) {
      const std::string policy = t["policy"].is_string() ? t["policy"].get<std::string>() : "";
      if (policy == "fixed") {
        s.policy = TargetPolicy::Fixed;
      } else if (policy == "random") {
        s.policy = TargetPolicy::Random;
      } else {
        throw ConfigError("targets.policy must be \"fixed\" or \"random\"");
      }
    }
    if (t.contains("fixed")) {
      if (!t["fixed"].is_array()) {
        throw ConfigError("targets.fixed must be an array");
      }
      s.fixed_targets.clear();
      for (const Json& e : t["fixed"]) {
        check_keys(e, "targets.fixed[]", {"u", "r"});
        TargetSpec spec;
        read(e, "u", spec.direction);
        read(e, "r", spec.range);
        s.fixed_targets.push_back(spec);
      }
    }
  }
  if (j.contains("snr_db")) {
    const Json& v = j["snr_db"];
    s.snr_db.clear();
    if (v.is_array()) {
      for (const Json& e : v) {
        s.snr_db.push_back(snr_from_json(e));
      }
    } else {
      s.snr_db.push_back(snr_from_json(v));
    }
  }
  read(j, "trials", s.trials);
  read(j, "seed", s.seed);
  if (j.contains("grid")) {
    const Json& g = j["grid"];
    check_keys(g, "grid", {"step_u", "step_r", "min_r", "max_r"});
    read(g, "step_u", s.grid_step_u);
    read(g, "step_r", s.grid_step_r);
    read(g, "min_r", s.grid_min_r);
    if (g.contains("max_r")) {
      if (g["max_r"].is_null()) {
        s.grid_max_r.reset();
      } else {
        double v = 0.0;
        read(g, "max_r", v);
        s.grid_max_r = v;
      }
    }
  }
  if (j.contains("modes")) {
    if (!j["modes"].is_array()) {
      throw ConfigError("modes must be an array");
    }
    s.modes.clear();
    for (const Json& e : j["modes"]) {
      if (!e.is_string()) {
        throw ConfigError("modes entries must be strings");
      }
      if (e.get<std::string>() == "all") {
        s.modes = all_modes();
        break;
      }
      s.modes.push_back(parse_mode(e.get<std::string>()));
    }
  }
  read(j, "clamp", s.clamp);
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open scenario file '" + path + "'");
  }
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("scenario file '" + path + "' is not valid JSON: " + e.what());
  }
  if (doc.is_object() && doc.contains("scenario") && doc.contains("tool")) {
    return scenario_from_json(doc["scenario"]);
  }
  return scenario_from_json(doc);
}

void apply_override(Json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override must look like key=value: '" + std::string(assignment) + "'");
  }
  const std::string path(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  Json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(key)) {
      throw ConfigError("unknown override key '" + path + "'");
    }
    node = &(*node)[key];
    if (dot == std::string::npos) {
      break;
    }
    start = dot + 1;
  }
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) {
    value = text;
  }
  *node = value;
}

std::vector<double> parse_snr_range(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = text.find(':', start);
    parts.push_back(text.substr(start, colon == std::string_view::npos ? std::string_view::npos
                                                                       : colon - start));
    if (colon == std::string_view::npos) {
      break;
    }
    start = colon + 1;
  }
  if (parts.size() == 1) {
    return {parse_number(parts[0])};
  }
  if (parts.size() != 3) {
    throw ConfigError("SNR range must be start:step:stop");
  }
  const double first = parse_number(parts[0]);
  const double step = parse_number(parts[1]);
  const double last = parse_number(parts[2]);
  if (!std::isfinite(first) || !std::isfinite(step) || !std::isfinite(last) || !(step > 0.0) ||
      last < first) {
    throw ConfigError("SNR range needs finite start <= stop and a positive step");
  }
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((last - first) / step + 1e-9)) + 1;
  for (long i = 0; i < count; ++i) {
    out.push_back(first + static_cast<double>(i) * step);
  }
  return out;
}

}  // namespace nfmusic::config
