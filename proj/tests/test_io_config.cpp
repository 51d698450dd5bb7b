#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "nfmusic/bench.hpp"
#include "nfmusic/config.hpp"
#include "nfmusic/io.hpp"
#include "nfmusic/validate.hpp"

using namespace nfmusic;
using io::Json;

TEST_CASE("steering json round trip") {
  const ArrayConfig cfg = ArrayConfig::half_wavelength(16, 300e9);
  const SteeringVector a = nearfield_steering(0.3, 2.0, 300e9, cfg);
  const Json j = io::steering_to_json(a);
  CHECK(j["entries"].size() == 16);
  CHECK(j["entries"][0].size() == 2);
  const CVector back = io::steering_from_json(Json::parse(j.dump()));
  CHECK((back - a.entries).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("spectrum csv") {
  SpectrumGrid g;
  g.directions = {-0.5, 0.5};
  g.ranges = {1.0, 2.0};
  g.values = {1.0, 2.0, 3.0, 4.0};
  std::ostringstream os;
  io::write_spectrum_csv(os, g);
  CHECK(os.str() == "u,r,P\n-0.5,1,1\n-0.5,2,2\n0.5,1,3\n0.5,2,4\n");

  SpectrumGrid d;
  d.mode = Mode::FFNoCal;
  d.directions = {0.0};
  d.values = {7.5};
  std::ostringstream od;
  io::write_spectrum_csv(od, d);
  CHECK(od.str() == "u,r,P\n0,NA,7.5\n");
}

TEST_CASE("estimates json") {
  Estimates e;
  e.mode = Mode::FFNoCal;
  Peak p;
  p.direction = 0.25;
  p.value = 9.0;
  e.peaks.push_back(p);
  const Json j = io::estimates_to_json(e);
  CHECK(j[0]["u"] == 0.25);
  CHECK(j[0]["r"].is_null());
  CHECK(j[0]["value"] == 9.0);
  CHECK(j[0]["mode"] == "ff-nocal");
}

TEST_CASE("observation dumps round trip") {
  Scenario s = Scenario::desk();
  s.array = ArrayConfig::half_wavelength(16, 300e9);
  s.subcarriers = 3;
  s.snapshots = 5;
  s.grid_max_r = 1.0;
  s.fixed_targets = {{0.3, 0.2}};
  const TrialScene scene = simulate_scene(s, 10.0, 0);
  const ObservationSet& obs = scene.observations;

  std::stringstream bin;
  io::write_observations_binary(bin, obs);
  CHECK(bin.str().size() == 8 + 12 + 8 + 3u * 16u * 5u * 16u);
  const ObservationSet b = io::read_observations_binary(bin);
  REQUIRE(b.subcarriers() == 3);
  CHECK(b.noise_power == obs.noise_power);
  for (int m = 0; m < 3; ++m) {
    CHECK(b.stacked[m] == obs.stacked[m]);
  }

  const ObservationSet j = io::observations_from_json(Json::parse(io::observations_to_json(obs).dump()));
  for (int m = 0; m < 3; ++m) {
    CHECK(j.stacked[m] == obs.stacked[m]);
  }

  std::stringstream junk("not a dump");
  CHECK_THROWS_AS(io::read_observations_binary(junk), ConfigError);
}

TEST_CASE("scenario json") {
  const Scenario d = Scenario::desk();
  const Scenario back = config::scenario_from_json(Json::parse(config::scenario_to_json(d).dump()));
  CHECK(config::scenario_to_json(back) == config::scenario_to_json(d));
  CHECK(back.fixed_targets[0].direction == d.fixed_targets[0].direction);

  Scenario inf = d;
  inf.snr_db = {std::numeric_limits<double>::infinity(), 10.0};
  const Json ji = config::scenario_to_json(inf);
  CHECK(ji["snr_db"][0] == "inf");
  CHECK(std::isinf(config::scenario_from_json(ji).snr_db[0]));

  const Scenario partial = config::scenario_from_json(Json{{"preset", "paper"}, {"trials", 3}});
  CHECK(partial.subcarriers == 32);
  CHECK(partial.trials == 3);

  CHECK_THROWS_AS(config::scenario_from_json(Json{{"colour", 1}}), ConfigError);
  CHECK_THROWS_AS(config::scenario_from_json(Json{{"grid", {{"stepu", 0.1}}}}), ConfigError);
  CHECK_THROWS_AS(config::scenario_from_json(Json{{"trials", "many"}}), ConfigError);
  CHECK_THROWS_AS(config::scenario_from_json(Json{{"preset", "huge"}}), ConfigError);
  CHECK_THROWS_AS(config::scenario_from_json(Json{{"modes", {"proposed", "esprit"}}}), ConfigError);
  CHECK(config::scenario_from_json(Json{{"modes", {"all"}}}).modes.size() == 5);
}

TEST_CASE("overrides") {
  Json doc = config::scenario_to_json(Scenario::desk());
  config::apply_override(doc, "grid.step_u=0.004");
  config::apply_override(doc, "array.n_antennas=64");
  config::apply_override(doc, "name=trial-run");
  const Scenario s = config::scenario_from_json(doc);
  CHECK(s.grid_step_u == 0.004);
  CHECK(s.array.n_antennas == 64);
  CHECK(s.name == "trial-run");
  CHECK_THROWS_AS(config::apply_override(doc, "grid.nope=1"), ConfigError);
  CHECK_THROWS_AS(config::apply_override(doc, "novalue"), ConfigError);
}

TEST_CASE("snr ranges") {
  const auto r = config::parse_snr_range("-10:5:30");
  CHECK(r.size() == 9);
  CHECK(r.front() == -10.0);
  CHECK(r.back() == 30.0);
  CHECK(config::parse_snr_range("20") == std::vector<double>{20.0});
  CHECK(std::isinf(config::parse_snr_range("inf")[0]));
  CHECK_THROWS_AS(config::parse_snr_range("0:0:10"), ConfigError);
  CHECK_THROWS_AS(config::parse_snr_range("10:5:0"), ConfigError);
  CHECK_THROWS_AS(config::parse_snr_range("a:b"), ConfigError);
}

TEST_CASE("scenario files") {
  CHECK_THROWS_WITH_AS(config::load_scenario_file("/definitely/not/here.json"),
                       doctest::Contains("/definitely/not/here.json"), ConfigError);
  const auto path = std::filesystem::temp_directory_path() / "nfmusic_manifest_test.json";
  {
    std::ofstream out(path);
    out << Json{{"tool", "nf_music"}, {"scenario", {{"preset", "desk"}, {"seed", 99}}}}.dump();
  }
  CHECK(config::load_scenario_file(path.string()).seed == 99);
  std::filesystem::remove(path);
}

TEST_CASE("validation checks") {
  const auto rows = run_checks(Scenario::desk());
  CHECK(all_passed(rows));

  Scenario k = Scenario::desk();
  k.n_targets = 128;
  CHECK_FALSE(all_passed(run_checks(k)));

  Scenario flat = Scenario::desk();
  flat.bandwidth_hz = 0.0;
  const auto fr = run_checks(flat);
  CHECK(all_passed(fr));
  int degenerate = 0;
  for (const CheckRow& r : fr) {
    degenerate += r.status == CheckStatus::DegeneratePass;
  }
  CHECK(degenerate >= 1);

  bool reconciled = false;
  for (const CheckRow& r : rows) {
    if (r.name == "fraunhofer distance") {
      reconciled = r.detail.find("32.51") != std::string::npos && r.detail.find("32.7") != std::string::npos;
    }
  }
  CHECK(reconciled);
}
