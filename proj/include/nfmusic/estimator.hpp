#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nfmusic/array_model.hpp"
#include "nfmusic/scene.hpp"
#include "nfmusic/subspace.hpp"
#include "nfmusic/types.hpp"

namespace nfmusic {

enum class Mode {
  ProposedBSC,  // corrected noise subspace diag(tau)^H W U^N, nominal steering
  NFNoCal,      // near-field steering at f_c against W U^N
  FFNoCal,      // planar-wave steering at f_c, direction only
  NFCalOracle,  // near-field steering at the known squinted location
  FFCalOracle,  // planar-wave steering at eta_m u
};

struct ModeDescriptor {
  Mode mode;
  std::string_view name;  // CLI / CSV label
  bool near_field;
  bool squint_corrected;
  bool genie;  // uses the true squint mapping instead of estimating through it
  std::string_view summary;
};

std::span<const ModeDescriptor> estimator_mode_table();
const ModeDescriptor& describe(Mode mode);
std::string_view mode_name(Mode mode);
// Accepts the table name ("proposed", "nf-nocal", ...) or the enum spelling.
// Throws ConfigError for anything else.
Mode parse_mode(std::string_view text);
std::vector<Mode> all_modes();

// Diagonal of T_m(u, r): tau_n = [a(ubar, rbar)]_n / [a(u, r)]_n, both on the
// nominal carrier. m is 0-based.
struct TransformDiag {
  CVector tau;
};

TransformDiag squint_transform(double u, double r, int m, const ArrayConfig& cfg,
                               const WidebandGrid& grid);

// V^N = diag(tau)^H W U^N
CMatrix corrected_noise_subspace(const TransformDiag& transform, const CMatrix& combiner,
                                 const CMatrix& noise_basis);

inline constexpr double kDefaultClamp = 1e-12;

// sum_m 1 / max(||V_m^H a||^2, clamp)
double music_spectrum_point(const CVector& steering, std::span<const CMatrix> corrected,
                            double clamp = kDefaultClamp);

struct SearchGrid {
  std::vector<double> directions;  // ascending directional sines
  std::vector<double> ranges;      // ascending meters, all > 0

  // directions -1, -1 + du, ..., 1; ranges r_min, r_min + dr, ... <= r_max
  static SearchGrid uniform(double direction_step, double range_min, double range_max,
                            double range_step);
  void validate() const;
};

// values are row-major over (direction, range). Direction-only spectra keep
// `ranges` empty and one value per direction.
struct SpectrumGrid {
  Mode mode = Mode::ProposedBSC;
  std::vector<double> directions;
  std::vector<double> ranges;
  std::vector<double> values;

  bool direction_only() const { return ranges.empty(); }
  std::size_t range_count() const { return ranges.empty() ? 1 : ranges.size(); }
  double at(std::size_t iu, std::size_t ir) const { return values[iu * range_count() + ir]; }
};

struct SpectrumOptions {
  double clamp = kDefaultClamp;
  bool reference = false;  // literal serial evaluation (tests and benchmarks)
};

// Algorithm steps 1-11: covariance, noise subspaces, per-hypothesis
// correction, per-subcarrier spectra, sum over subcarriers.
SpectrumGrid combined_spectrum(const ObservationSet& obs, const CombinerBank& bank,
                               const ArrayConfig& cfg, const WidebandGrid& grid, int n_targets,
                               const SearchGrid& search, Mode mode,
                               const SpectrumOptions& options = {});

// Same, reusing subspaces already computed for this observation set.
SpectrumGrid combined_spectrum(std::span<const SubspacePair> subspaces, const CombinerBank& bank,
                               const ArrayConfig& cfg, const WidebandGrid& grid,
                               const SearchGrid& search, Mode mode,
                               const SpectrumOptions& options = {});

struct Peak {
  double direction = 0.0;
  std::optional<double> range;  // empty for direction-only spectra
  double value = 0.0;
  std::size_t direction_index = 0;
  std::size_t range_index = 0;
};

struct Estimates {
  Mode mode = Mode::ProposedBSC;
  std::vector<Peak> peaks;  // descending value
  bool degraded = false;    // fewer than K strict local maxima
};

// K highest strict local maxima (8-neighbourhood). Ties order by lower
// direction index, then lower range index.
Estimates find_peaks(const SpectrumGrid& spectrum, int n_targets);

// One parabolic step per axis through each peak and its two neighbours,
// offsets clamped to half a cell. Edge cells stay put; indices are unchanged.
void refine_peaks(const SpectrumGrid& spectrum, Estimates& estimates);

}  // namespace nfmusic
