#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nfmusic/array_model.hpp"
#include "nfmusic/estimator.hpp"

namespace nfmusic {

struct TargetSpec {
  double direction = 0.0;  // u
  double range = 0.0;      // meters
};

enum class TargetPolicy { Fixed, Random };

struct Scenario {
  std::string name = "custom";
  ArrayConfig array;
  double bandwidth_hz = 0.0;
  int subcarriers = 1;
  int rf_chains = 1;
  int snapshots = 1;
  int n_targets = 1;
  TargetPolicy policy = TargetPolicy::Random;
  std::vector<TargetSpec> fixed_targets;
  std::vector<double> snr_db;
  int trials = 1;
  std::uint64_t seed = 1;
  double grid_step_u = 0.002;
  double grid_step_r = 0.1;
  double grid_min_r = 0.5;
  std::optional<double> grid_max_r;  // defaults to the Fraunhofer distance
  std::vector<Mode> modes;
  double clamp = kDefaultClamp;

  // f_c = 300 GHz, B = 30 GHz, M = 32, N = 128, N_RF = 8, T = 500, K = 2, 500 trials.
  static Scenario paper();
  // Desk-scale: M = 8, T = 200, K = 1 at (sin 45 deg, 5 m), 50 trials.
  static Scenario desk();

  WidebandGrid band() const;
  SearchGrid search_grid() const;
  double fraunhofer() const { return fraunhofer_distance(array); }
  // rho = P_r / (M^2 N^2) = 1
  double transmit_power() const;

  // Throws ConfigError / IdentifiabilityError.
  void validate() const;
};

// sigma^2 = rho 10^(-SNR / 10) with rho = 1; +inf dB gives a noiseless scene.
double noise_power_for_snr(double snr_db);

std::vector<TargetSpec> draw_targets(const Scenario& s, std::size_t trial_index);

// |asin(u_hat) - asin(u)| in degrees.
double direction_error_deg(double estimate, double truth);

// For each truth, the index of its estimate under the permutation minimising
// the total squared direction error. Exhaustive; K <= 6.
std::vector<std::size_t> assign_estimates(std::span<const TargetSpec> truths,
                                          std::span<const Peak> peaks);

struct ModeOutcome {
  Mode mode = Mode::ProposedBSC;
  Estimates estimates;
  std::vector<double> direction_error_deg;  // per truth, after assignment
  std::vector<std::optional<double>> range_error_m;
  double seconds = 0.0;
};

struct TrialResult {
  std::size_t trial_index = 0;
  double snr_db = 0.0;
  std::vector<TargetSpec> truths;
  std::vector<ModeOutcome> outcomes;  // scenario mode order
  bool degraded = false;              // unresolvable truths or a degraded peak search
  bool outside_visible = false;
};

// Everything a trial feeds to the estimators.
struct TrialScene {
  std::vector<TargetSpec> truths;
  WidebandGrid band;
  CombinerBank bank;
  ObservationSet observations;
  std::vector<SubspacePair> subspaces;
};

TrialScene simulate_scene(const Scenario& s, double snr_db, std::size_t trial_index);

// Seeds everything from (seed, trial_index): the same trial index sees the same
// targets, combiner, probe and noise shape at every SNR.
TrialResult run_trial(const Scenario& s, double snr_db, std::size_t trial_index);

struct RmseResult {
  Mode mode = Mode::ProposedBSC;
  double theta_deg = 0.0;
  std::optional<double> range_m;
  std::size_t trials = 0;
};

// One entry per mode present in the trials, in first-seen order.
std::vector<RmseResult> rmse(std::span<const TrialResult> trials);

struct SweepPoint {
  double snr_db = 0.0;
  Mode mode = Mode::ProposedBSC;
  double rmse_theta_deg = 0.0;
  std::optional<double> rmse_range_m;
  std::size_t trials = 0;
};

struct SweepCurve {
  std::vector<SweepPoint> points;
};

using TrialCallback = std::function<void(const TrialResult&)>;

SweepCurve snr_sweep(const Scenario& s, const TrialCallback& on_trial = {});

// snr_db,mode,rmse_theta_deg,rmse_range_m,n_trials
void write_sweep_csv(std::ostream& os, const SweepCurve& curve);

struct GainRow {
  int subcarrier = 0;  // 1-based
  double frequency_hz = 0.0;
  double direction = 0.0;
  double gain = 0.0;
};

struct GainScan {
  std::vector<GainRow> rows;
  std::vector<double> argmax_direction;     // per subcarrier
  std::vector<double> predicted_direction;  // eta_m u0
};

// Gain |a(u0, r0; f_c)^H a(u, rbar_m; f_m)| over the scenario's direction grid.
GainScan array_gain_scan(double u0, double r0, const Scenario& s);

// m,f_hz,u,gain
void write_gain_csv(std::ostream& os, const GainScan& scan);

}  // namespace nfmusic
