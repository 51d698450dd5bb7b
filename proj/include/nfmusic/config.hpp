#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nfmusic/bench.hpp"
#include "nfmusic/io.hpp"

namespace nfmusic::config {

using io::Json;

// "paper" or "desk"; throws ConfigError otherwise.
Scenario preset(std::string_view name);

// Full, self-describing scenario document. +inf SNR is written as "inf".
Json scenario_to_json(const Scenario& s);

// Strict: unknown keys are rejected. An optional "preset" key selects the
// base; every other key overrides it. Missing keys keep the base value.
Scenario scenario_from_json(const Json& j);

// Accepts either a scenario document or a run manifest (uses its "scenario").
Scenario load_scenario_file(const std::string& path);

// Applies "a.b.c=value" to the document. The value is parsed as JSON when it
// parses, otherwise taken as a string. The path must already exist.
void apply_override(Json& doc, std::string_view assignment);

// "start:step:stop" in dB (inclusive stop), or a single value.
std::vector<double> parse_snr_range(std::string_view text);

}  // namespace nfmusic::config
