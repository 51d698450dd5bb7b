#include "nfmusic/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "nfmusic/rng.hpp"
#include "nfmusic/scene.hpp"
#include "nfmusic/subspace.hpp"

namespace nfmusic {

namespace {

constexpr double kRadToDeg = 180.0 / kPi;
constexpr std::size_t kMaxAssignTargets = 6;

std::string fmt_double(double x) {
  if (std::isnan(x)) {
    return "NA";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::vector<double> default_snr_list() {
  std::vector<double> out;
  for (int s = -10; s <= 30; s += 5) {
    out.push_back(s);
  }
  return out;
}

}  // namespace

Scenario Scenario::paper() {
  Scenario s;
  s.name = "paper";
  s.array = ArrayConfig::half_wavelength(128, 300e9);
  s.bandwidth_hz = 30e9;
  s.subcarriers = 32;
  s.rf_chains = 8;
  s.snapshots = 500;
  s.n_targets = 2;
  s.policy = TargetPolicy::Random;
  s.snr_db = default_snr_list();
  s.trials = 500;
  s.seed = 1;
  s.modes = all_modes();
  return s;
}

Scenario Scenario::desk() {
  Scenario s = paper();
  s.name = "desk";
  s.subcarriers = 8;
  s.snapshots = 200;
  s.n_targets = 1;
  s.policy = TargetPolicy::Fixed;
  s.fixed_targets = {{std::sin(kPi / 4.0), 5.0}};
  s.trials = 50;
  return s;
}

WidebandGrid Scenario::band() const {
  return WidebandGrid::make(subcarriers, bandwidth_hz, array.carrier_hz);
}

SearchGrid Scenario::search_grid() const {
  return SearchGrid::uniform(grid_step_u, grid_min_r, grid_max_r.value_or(fraunhofer()),
                             grid_step_r);
}

double Scenario::transmit_power() const {
  const double mn = static_cast<double>(subcarriers) * array.n_antennas;
  return mn * mn;
}

void Scenario::validate() const {
  array.validate();
  if (subcarriers < 1) {
    throw ConfigError("need at least one subcarrier");
  }
  (void)band();
  if (rf_chains < 1 || array.n_antennas % rf_chains != 0) {
    throw ConfigError("rf_chains must divide n_antennas");
  }
  if (snapshots < 1) {
    throw ConfigError("need at least one snapshot");
  }
  if (n_targets < 1) {
    throw ConfigError("need at least one target");
  }
  if (array.n_antennas - n_targets < 1) {
    throw IdentifiabilityError("N - K must be >= 1 (N = " + std::to_string(array.n_antennas) +
                               ", K = " + std::to_string(n_targets) + ")");
  }
  if (snapshots < n_targets) {
    throw IdentifiabilityError("need T >= K snapshots");
  }
  if (static_cast<std::size_t>(n_targets) > kMaxAssignTargets) {
    throw ConfigError("estimate assignment supports at most 6 targets");
  }
  if (policy == TargetPolicy::Fixed) {
    if (fixed_targets.size() != static_cast<std::size_t>(n_targets)) {
      throw ConfigError("fixed target list must hold exactly K entries");
    }
    for (const TargetSpec& t : fixed_targets) {
      if (!(std::abs(t.direction) < 1.0) || !(t.range > 0.0)) {
        throw ConfigError("fixed targets need |u| < 1 and r > 0");
      }
    }
  }
  if (snr_db.empty()) {
    throw ConfigError("SNR list is empty");
  }
  for (const double snr : snr_db) {
    if (std::isnan(snr) || snr == -std::numeric_limits<double>::infinity()) {
      throw ConfigError("SNR values must be numbers or +inf");
    }
  }
  if (trials < 0) {
    throw ConfigError("trial count must be non-negative");
  }
  if (modes.empty()) {
    throw ConfigError("no estimator modes selected");
  }
  if (!(clamp > 0.0)) {
    throw ConfigError("clamp must be positive");
  }
  search_grid().validate();
}

double noise_power_for_snr(double snr_db) {
  if (snr_db == std::numeric_limits<double>::infinity()) {
    return 0.0;
  }
  return std::pow(10.0, -snr_db / 10.0);
}

std::vector<TargetSpec> draw_targets(const Scenario& s, std::size_t trial_index) {
  if (s.policy == TargetPolicy::Fixed) {
    return s.fixed_targets;
  }
  Engine eng(derive_seed(s.seed, {static_cast<std::uint64_t>(Stream::Targets), trial_index}));
  std::uniform_real_distribution<double> angle(-0.5 * kPi, 0.5 * kPi);
  const double d_f = s.fraunhofer();
  std::uniform_real_distribution<double> range(0.3 * d_f, 0.9 * d_f);

  std::vector<TargetSpec> out;
  while (out.size() < static_cast<std::size_t>(s.n_targets)) {
    TargetSpec t{std::sin(angle(eng)), range(eng)};
    if (!(std::abs(t.direction) < 1.0)) {
      continue;
    }
    // pairs within 3 grid cells are below the grid's resolution
    const bool crowded = std::any_of(out.begin(), out.end(), [&](const TargetSpec& o) {
      return std::abs(o.direction - t.direction) < 3.0 * s.grid_step_u &&
             std::abs(o.range - t.range) < 3.0 * s.grid_step_r;
    });
    if (!crowded) {
      out.push_back(t);
    }
  }
  return out;
}

double direction_error_deg(double estimate, double truth) {
  const double e = std::clamp(estimate, -1.0, 1.0);
  return std::abs(std::asin(e) - std::asin(truth)) * kRadToDeg;
}

std::vector<std::size_t> assign_estimates(std::span<const TargetSpec> truths,
                                          std::span<const Peak> peaks) {
  if (truths.size() != peaks.size()) {
    throw DimensionError("estimate count " + std::to_string(peaks.size()) +
                         " differs from truth count " + std::to_string(truths.size()));
  }
  if (truths.size() > kMaxAssignTargets) {
    throw ConfigError("estimate assignment supports at most 6 targets");
  }
  std::vector<std::size_t> perm(truths.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<std::size_t> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t k = 0; k < truths.size(); ++k) {
      const double e = direction_error_deg(peaks[perm[k]].direction, truths[k].direction);
      cost += e * e;
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

TrialScene simulate_scene(const Scenario& s, double snr_db, std::size_t trial_index) {
  s.validate();
  const ArrayConfig& cfg = s.array;
  const std::uint64_t trial_seed =
      derive_seed(s.seed, {static_cast<std::uint64_t>(Stream::Trial), trial_index});
  std::vector<TargetSpec> truths = draw_targets(s, trial_index);
  std::vector<Target> targets;
  for (const TargetSpec& t : truths) {
    targets.push_back(Target{t.direction, t.range, {}});
  }
  targets = attach_reflections(targets,
                               reflection_coefficients(s.n_targets, s.subcarriers, trial_seed));
  WidebandGrid band = s.band();
  const ProbeSignal probe = generate_probe(cfg, band, s.transmit_power(), s.snapshots, trial_seed);
  CombinerBank bank = random_combiner(cfg, s.rf_chains, trial_seed);
  ObservationSet obs =
      synthesize_echo(targets, probe, bank, cfg, band, noise_power_for_snr(snr_db), trial_seed);
  std::vector<SubspacePair> subspaces = decompose_observations(obs, s.n_targets);
  return TrialScene{std::move(truths), std::move(band), std::move(bank), std::move(obs),
                    std::move(subspaces)};
}

TrialResult run_trial(const Scenario& s, double snr_db, std::size_t trial_index) {
  const TrialScene scene = simulate_scene(s, snr_db, trial_index);
  const ArrayConfig& cfg = s.array;
  const WidebandGrid& band = scene.band;
  const CombinerBank& bank = scene.bank;
  const std::vector<SubspacePair>& subspaces = scene.subspaces;
  const SearchGrid search = s.search_grid();

  TrialResult res;
  res.trial_index = trial_index;
  res.snr_db = snr_db;
  res.truths = scene.truths;
  res.outside_visible = scene.observations.outside_visible;

  for (std::size_t a = 0; a < res.truths.size(); ++a) {
    for (std::size_t b = a + 1; b < res.truths.size(); ++b) {
      if (std::abs(res.truths[a].direction - res.truths[b].direction) < s.grid_step_u &&
          std::abs(res.truths[a].range - res.truths[b].range) < s.grid_step_r) {
        res.degraded = true;
      }
    }
  }

  SpectrumOptions opts;
  opts.clamp = s.clamp;
  for (const Mode mode : s.modes) {
    const auto start = std::chrono::steady_clock::now();
    ModeOutcome out;
    out.mode = mode;
    const SpectrumGrid spectrum = combined_spectrum(subspaces, bank, cfg, band, search, mode, opts);
    out.estimates = find_peaks(spectrum, s.n_targets);
    const auto assign = assign_estimates(res.truths, out.estimates.peaks);
    for (std::size_t k = 0; k < res.truths.size(); ++k) {
      const Peak& p = out.estimates.peaks[assign[k]];
      out.direction_error_deg.push_back(direction_error_deg(p.direction, res.truths[k].direction));
      if (p.range) {
        out.range_error_m.emplace_back(std::abs(*p.range - res.truths[k].range));
      } else {
        out.range_error_m.emplace_back(std::nullopt);
      }
    }
    res.degraded = res.degraded || out.estimates.degraded;
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    res.outcomes.push_back(std::move(out));
  }
  return res;
}

std::vector<RmseResult> rmse(std::span<const TrialResult> trials) {
  if (trials.empty()) {
    throw ConfigError("rmse needs at least one trial");
  }
  struct Acc {
    Mode mode;
    double theta_sq = 0.0;
    double range_sq = 0.0;
    std::size_t terms = 0;
    std::size_t range_terms = 0;
    std::size_t trials = 0;
  };
  std::vector<Acc> acc;
  for (const TrialResult& t : trials) {
    for (const ModeOutcome& o : t.outcomes) {
      auto it = std::find_if(acc.begin(), acc.end(), [&](const Acc& a) { return a.mode == o.mode; });
      if (it == acc.end()) {
        acc.push_back(Acc{o.mode});
        it = std::prev(acc.end());
      }
      const auto assign = assign_estimates(t.truths, o.estimates.peaks);
      for (std::size_t k = 0; k < t.truths.size(); ++k) {
        const Peak& p = o.estimates.peaks[assign[k]];
        const double e = direction_error_deg(p.direction, t.truths[k].direction);
        it->theta_sq += e * e;
        ++it->terms;
        if (p.range) {
          const double er = *p.range - t.truths[k].range;
          it->range_sq += er * er;
          ++it->range_terms;
        }
      }
      ++it->trials;
    }
  }
  std::vector<RmseResult> out;
  for (const Acc& a : acc) {
    RmseResult r;
    r.mode = a.mode;
    r.trials = a.trials;
    r.theta_deg = a.terms ? std::sqrt(a.theta_sq / static_cast<double>(a.terms)) : 0.0;
    if (a.range_terms > 0) {
      r.range_m = std::sqrt(a.range_sq / static_cast<double>(a.range_terms));
    }
    out.push_back(r);
  }
  return out;
}

SweepCurve snr_sweep(const Scenario& s, const TrialCallback& on_trial) {
  s.validate();
  SweepCurve curve;
  for (const double snr : s.snr_db) {
    if (s.trials == 0) {
      std::clog << "warning: SNR point " << fmt_double(snr) << " dB has no trials; skipped\n";
      continue;
    }
    std::vector<TrialResult> results;
    results.reserve(static_cast<std::size_t>(s.trials));
    for (int i = 0; i < s.trials; ++i) {
      results.push_back(run_trial(s, snr, static_cast<std::size_t>(i)));
      if (on_trial) {
        on_trial(results.back());
      }
    }
    for (const RmseResult& r : rmse(results)) {
      curve.points.push_back(SweepPoint{snr, r.mode, r.theta_deg, r.range_m, r.trials});
    }
  }
  return curve;
}

void write_sweep_csv(std::ostream& os, const SweepCurve& curve) {
  os << "snr_db,mode,rmse_theta_deg,rmse_range_m,n_trials\n";
  for (const SweepPoint& p : curve.points) {
    os << fmt_double(p.snr_db) << ',' << mode_name(p.mode) << ',' << fmt_double(p.rmse_theta_deg)
       << ',' << (p.rmse_range_m ? fmt_double(*p.rmse_range_m) : std::string("NA")) << ','
       << p.trials << '\n';
  }
}

GainScan array_gain_scan(double u0, double r0, const Scenario& s) {
  if (!(std::abs(u0) < 1.0)) {
    throw DomainError("array gain scan needs |u0| < 1");
  }
  const ArrayConfig& cfg = s.array;
  cfg.validate();
  const WidebandGrid band = s.band();
  const std::vector<double> dirs = SearchGrid::uniform(s.grid_step_u, 1.0, 1.0, 1.0).directions;
  const CVector ref = nearfield_steering(u0, r0, cfg.carrier_hz, cfg).entries;

  GainScan scan;
  scan.rows.reserve(dirs.size() * static_cast<std::size_t>(band.size()));
  for (int m = 0; m < band.size(); ++m) {
    const double eta = band.ratios[static_cast<std::size_t>(m)];
    const double f_m = band.frequencies[static_cast<std::size_t>(m)];
    const SquintedLocation loc = squint_map(u0, r0, eta);
    double best = -1.0;
    double best_u = dirs.front();
    for (const double u : dirs) {
      const double g = array_gain(ref, nearfield_steering(u, loc.range, f_m, cfg).entries);
      scan.rows.push_back(GainRow{m + 1, f_m, u, g});
      if (g > best) {
        best = g;
        best_u = u;
      }
    }
    scan.argmax_direction.push_back(best_u);
    scan.predicted_direction.push_back(loc.direction);
  }
  return scan;
}

void write_gain_csv(std::ostream& os, const GainScan& scan) {
  os << "m,f_hz,u,gain\n";
  for (const GainRow& r : scan.rows) {
    os << r.subcarrier << ',' << fmt_double(r.frequency_hz) << ',' << fmt_double(r.direction) << ','
       << fmt_double(r.gain) << '\n';
  }
}

}  // namespace nfmusic
