// nf_music: simulate, estimate and benchmark wideband near-field MUSIC.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nfmusic/bench.hpp"
#include "nfmusic/config.hpp"
#include "nfmusic/io.hpp"
#include "nfmusic/parallel.hpp"
#include "nfmusic/validate.hpp"

#ifndef NFMUSIC_VERSION
#define NFMUSIC_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using nfmusic::io::Json;

namespace {

enum ExitCode { kOk = 0, kRuntime = 1, kConfig = 2, kIdentifiability = 3 };

struct Options {
  std::string preset = "desk";
  std::string scenario_path;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> modes;
  std::string snr;
  std::optional<int> trials;
  std::optional<double> grid_step_u;
  std::optional<double> grid_step_r;
  std::optional<double> bandwidth;
  std::optional<int> subcarriers;
  std::vector<std::string> overrides;
  std::string dump = "none";
  bool refine = false;
  double gain_u0 = std::sin(nfmusic::kPi / 4.0);
  double gain_r0 = 10.0;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--preset", o.preset, "Base preset: desk or paper")->capture_default_str();
  cmd->add_option("--scenario", o.scenario_path, "Scenario JSON (or a run manifest)");
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--mode", o.modes, "Estimator modes (comma separated) or all")->delimiter(',');
  cmd->add_option("--snr", o.snr, "SNR in dB: value or start:step:stop");
  cmd->add_option("--trials", o.trials, "Monte Carlo trials per SNR point")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--grid-step-u", o.grid_step_u, "Direction grid step")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--grid-step-r", o.grid_step_r, "Range grid step (m)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--bandwidth", o.bandwidth, "Bandwidth (Hz)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--subcarriers", o.subcarriers, "Number of subcarriers")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--set", o.overrides, "Scenario override key.path=value (repeatable)");
}

nfmusic::Scenario build_scenario(const Options& o) {
  namespace cfg = nfmusic::config;
  nfmusic::Scenario base = o.scenario_path.empty() ? cfg::preset(o.preset)
                                                   : cfg::load_scenario_file(o.scenario_path);
  Json doc = cfg::scenario_to_json(base);
  if (o.seed) {
    doc["seed"] = *o.seed;
  }
  if (!o.modes.empty()) {
    doc["modes"] = o.modes;
  }
  if (!o.snr.empty()) {
    Json snr = Json::array();
    for (const double v : cfg::parse_snr_range(o.snr)) {
      snr.push_back(std::isinf(v) ? Json("inf") : Json(v));
    }
    doc["snr_db"] = snr;
  }
  if (o.trials) {
    doc["trials"] = *o.trials;
  }
  if (o.grid_step_u) {
    doc["grid"]["step_u"] = *o.grid_step_u;
  }
  if (o.grid_step_r) {
    doc["grid"]["step_r"] = *o.grid_step_r;
  }
  if (o.bandwidth) {
    doc["bandwidth_hz"] = *o.bandwidth;
  }
  if (o.subcarriers) {
    doc["subcarriers"] = *o.subcarriers;
  }
  for (const std::string& kv : o.overrides) {
    cfg::apply_override(doc, kv);
  }
  return cfg::scenario_from_json(doc);
}

fs::path ensure_out(const Options& o) {
  const fs::path dir(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw nfmusic::ConfigError("cannot create output directory '" + o.out + "': " + ec.message());
  }
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw nfmusic::Error("cannot write '" + path.string() + "'");
  }
  return out;
}

void write_manifest(const fs::path& dir, const std::string& command, const nfmusic::Scenario& s,
                    const Json& run, const std::vector<std::string>& outputs) {
  Json m{{"tool", "nf_music"},
         {"version", NFMUSIC_VERSION},
         {"command", command},
         {"scenario", nfmusic::config::scenario_to_json(s)},
         {"run", run},
         {"outputs", outputs}};
  open_out(dir / "manifest.json") << m.dump(2) << '\n';
}

int cmd_spectrum(const Options& o) {
  nfmusic::Scenario s = build_scenario(o);
  // one realisation at the highest listed SNR
  const double snr = *std::max_element(s.snr_db.begin(), s.snr_db.end());
  s.snr_db = {snr};
  s.validate();
  const fs::path dir = ensure_out(o);
  const nfmusic::TrialScene scene = nfmusic::simulate_scene(s, snr, 0);
  const nfmusic::SearchGrid search = s.search_grid();
  nfmusic::SpectrumOptions opts;
  opts.clamp = s.clamp;

  std::vector<std::string> outputs;
  Json estimates = Json::array();
  for (const nfmusic::Mode mode : s.modes) {
    const nfmusic::SpectrumGrid spectrum = nfmusic::combined_spectrum(
        scene.subspaces, scene.bank, s.array, scene.band, search, mode, opts);
    nfmusic::Estimates est = nfmusic::find_peaks(spectrum, s.n_targets);
    if (o.refine) {
      nfmusic::refine_peaks(spectrum, est);
    }
    const std::string file = "spectrum_" + std::string(nfmusic::mode_name(mode)) + ".csv";
    auto out = open_out(dir / file);
    nfmusic::io::write_spectrum_csv(out, spectrum);
    outputs.push_back(file);
    for (const Json& rec : nfmusic::io::estimates_to_json(est)) {
      estimates.push_back(rec);
    }
    for (const nfmusic::Peak& p : est.peaks) {
      std::cout << nfmusic::mode_name(mode) << ": u = " << nfmusic::io::format_double(p.direction)
                << ", r = " << (p.range ? nfmusic::io::format_double(*p.range) : "NA")
                << (est.degraded ? " (degraded)" : "") << '\n';
    }
  }
  open_out(dir / "estimates.json") << estimates.dump(2) << '\n';
  outputs.push_back("estimates.json");

  if (o.dump == "json") {
    open_out(dir / "observations.json") << nfmusic::io::observations_to_json(scene.observations).dump()
                                        << '\n';
    outputs.push_back("observations.json");
  } else if (o.dump == "binary") {
    auto out = open_out(dir / "observations.bin");
    nfmusic::io::write_observations_binary(out, scene.observations);
    outputs.push_back("observations.bin");
  }

  Json truths = Json::array();
  for (const nfmusic::TargetSpec& t : scene.truths) {
    truths.push_back(Json{{"u", t.direction}, {"r", t.range}});
  }
  write_manifest(dir, "spectrum", s,
                 Json{{"trial_index", 0},
                      {"snr_db", std::isinf(snr) ? Json("inf") : Json(snr)},
                      {"truths", truths},
                      {"outside_visible", scene.observations.outside_visible},
                      {"refine", o.refine}},
                 outputs);
  return kOk;
}

int cmd_sweep(const Options& o) {
  const nfmusic::Scenario s = build_scenario(o);
  s.validate();
  const fs::path dir = ensure_out(o);
  const nfmusic::SweepCurve curve = nfmusic::snr_sweep(s, [&](const nfmusic::TrialResult& t) {
    std::clog << "snr " << nfmusic::io::format_double(t.snr_db) << " dB, trial "
              << t.trial_index + 1 << '/' << s.trials << '\r' << std::flush;
  });
  std::clog << '\n';
  auto out = open_out(dir / "sweep.csv");
  nfmusic::write_sweep_csv(out, curve);
  out.close();
  nfmusic::write_sweep_csv(std::cout, curve);
  write_manifest(dir, "sweep", s, Json::object(), {"sweep.csv"});
  return kOk;
}

int cmd_gain(const Options& o) {
  const nfmusic::Scenario s = build_scenario(o);
  const fs::path dir = ensure_out(o);
  const nfmusic::GainScan scan = nfmusic::array_gain_scan(o.gain_u0, o.gain_r0, s);
  auto out = open_out(dir / "gain.csv");
  nfmusic::write_gain_csv(out, scan);
  std::printf("%4s %14s %12s %12s\n", "m", "f_hz", "argmax_u", "eta_u0");
  const nfmusic::WidebandGrid band = s.band();
  for (std::size_t m = 0; m < scan.argmax_direction.size(); ++m) {
    std::printf("%4zu %14.6e %12.4f %12.4f\n", m + 1, band.frequencies[m],
                scan.argmax_direction[m], scan.predicted_direction[m]);
  }
  write_manifest(dir, "gain", s, Json{{"u0", o.gain_u0}, {"r0", o.gain_r0}}, {"gain.csv"});
  return kOk;
}

int cmd_validate(const Options& o) {
  const nfmusic::Scenario s = build_scenario(o);
  const std::vector<nfmusic::CheckRow> rows = nfmusic::run_checks(s);
  bool identifiable = true;
  for (const nfmusic::CheckRow& r : rows) {
    std::printf("%-22s %-16s %s\n", r.name.c_str(), std::string(nfmusic::status_label(r.status)).c_str(),
                r.detail.c_str());
    if (r.name == "identifiability" && r.status == nfmusic::CheckStatus::Fail) {
      identifiable = false;
    }
  }
  if (!identifiable) {
    return kIdentifiability;
  }
  return nfmusic::all_passed(rows) ? kOk : kRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  nfmusic::apply_thread_cap();
  CLI::App app{"Wideband near-field MUSIC with beam-squint correction"};
  app.require_subcommand(1);
  Options o;

  CLI::App* spectrum = app.add_subcommand("spectrum", "One simulation and spectrum per mode");
  add_common(spectrum, o);
  spectrum->add_option("--dump-observations", o.dump, "Also dump Y_m: none, json or binary")
      ->check(CLI::IsMember({"none", "json", "binary"}))
      ->capture_default_str();
  spectrum->add_flag("--refine", o.refine, "Parabolic refinement of the reported peaks");
  CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo RMSE versus SNR");
  add_common(sweep, o);
  CLI::App* validate = app.add_subcommand("validate", "Run the invariant checks");
  add_common(validate, o);
  CLI::App* gain = app.add_subcommand("gain", "Per-subcarrier array-gain scan");
  add_common(gain, o);
  gain->add_option("--u0", o.gain_u0, "Target directional sine")->capture_default_str();
  gain->add_option("--r0", o.gain_r0, "Target range (m)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*spectrum) {
      return cmd_spectrum(o);
    }
    if (*sweep) {
      return cmd_sweep(o);
    }
    if (*gain) {
      return cmd_gain(o);
    }
    return cmd_validate(o);
  } catch (const nfmusic::IdentifiabilityError& e) {
    std::cerr << "identifiability error: " << e.what() << '\n';
    return kIdentifiability;
  } catch (const nfmusic::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}
