#include "nfmusic/estimator.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string>

#include "nfmusic/kernels.hpp"

namespace nfmusic {

namespace {

constexpr std::array<ModeDescriptor, 5> kModes{{
    {Mode::ProposedBSC, "proposed", true, true, false,
     "near-field MUSIC on the beam-squint-corrected noise subspace"},
    {Mode::NFNoCal, "nf-nocal", true, false, false,
     "near-field MUSIC at the carrier, no squint calibration"},
    {Mode::FFNoCal, "ff-nocal", false, false, false,
     "far-field MUSIC at the carrier, no squint calibration"},
    {Mode::NFCalOracle, "nf-cal", true, true, true,
     "near-field MUSIC with perfectly known squint per subcarrier"},
    {Mode::FFCalOracle, "ff-cal", false, true, true,
     "far-field MUSIC with perfectly known direction squint per subcarrier"},
}};

std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::span<const ModeDescriptor> estimator_mode_table() { return kModes; }

const ModeDescriptor& describe(Mode mode) {
  for (const auto& d : kModes) {
    if (d.mode == mode) {
      return d;
    }
  }
  throw ConfigError("unknown estimator mode");
}

std::string_view mode_name(Mode mode) { return describe(mode).name; }

Mode parse_mode(std::string_view text) {
  const std::string key = lowercase(text);
  for (const auto& d : kModes) {
    if (key == d.name) {
      return d.mode;
    }
  }
  static constexpr std::array<std::pair<std::string_view, Mode>, 5> kAliases{{
      {"proposedbsc", Mode::ProposedBSC},
      {"nfnocal", Mode::NFNoCal},
      {"ffnocal", Mode::FFNoCal},
      {"nfcaloracle", Mode::NFCalOracle},
      {"ffcaloracle", Mode::FFCalOracle},
  }};
  for (const auto& [alias, mode] : kAliases) {
    if (key == alias) {
      return mode;
    }
  }
  throw ConfigError("unknown estimator mode '" + std::string(text) + "'");
}

std::vector<Mode> all_modes() {
  std::vector<Mode> out;
  for (const auto& d : kModes) {
    out.push_back(d.mode);
  }
  return out;
}

TransformDiag squint_transform(double u, double r, int m, const ArrayConfig& cfg,
                               const WidebandGrid& grid) {
  const CVector squinted = squinted_steering(u, r, grid.ratios.at(m), cfg).entries;
  const CVector nominal = nearfield_steering(u, r, cfg.carrier_hz, cfg).entries;
  return TransformDiag{squinted.cwiseQuotient(nominal)};
}

CMatrix corrected_noise_subspace(const TransformDiag& transform, const CMatrix& combiner,
                                 const CMatrix& noise_basis) {
  const Eigen::Index n = transform.tau.size();
  if (combiner.rows() != n || combiner.cols() != n || noise_basis.rows() != n) {
    throw DimensionError("corrected_noise_subspace: expected N, N x N and N x (N - K)");
  }
  return transform.tau.conjugate().asDiagonal() * (combiner * noise_basis);
}

double music_spectrum_point(const CVector& steering, std::span<const CMatrix> corrected,
                            double clamp) {
  double total = 0.0;
  for (const CMatrix& v : corrected) {
    if (v.rows() != steering.size()) {
      throw DimensionError("music_spectrum_point: subspace row count differs from steering");
    }
    const double q = (v.adjoint() * steering).squaredNorm();
    total += 1.0 / std::max(q, clamp);
  }
  return total;
}

SearchGrid SearchGrid::uniform(double direction_step, double range_min, double range_max,
                               double range_step) {
  if (!(direction_step > 0.0) || direction_step > 2.0) {
    throw ConfigError("direction step must lie in (0, 2]");
  }
  if (!(range_min > 0.0) || !(range_step > 0.0) || range_max < range_min) {
    throw ConfigError("range grid needs 0 < r_min <= r_max and a positive step");
  }
  SearchGrid g;
  const auto n_dir = static_cast<long>(std::floor(2.0 / direction_step + 1e-9)) + 1;
  g.directions.reserve(static_cast<std::size_t>(n_dir));
  for (long i = 0; i < n_dir; ++i) {
    g.directions.push_back(std::min(1.0, -1.0 + static_cast<double>(i) * direction_step));
  }
  const auto n_rng =
      static_cast<long>(std::floor((range_max - range_min) / range_step + 1e-9)) + 1;
  g.ranges.reserve(static_cast<std::size_t>(n_rng));
  for (long j = 0; j < n_rng; ++j) {
    g.ranges.push_back(range_min + static_cast<double>(j) * range_step);
  }
  return g;
}

void SearchGrid::validate() const {
  if (directions.empty()) {
    throw ConfigError("search grid has no directions");
  }
  for (std::size_t i = 0; i < directions.size(); ++i) {
    if (!(std::abs(directions[i]) <= 1.0) || (i > 0 && directions[i] <= directions[i - 1])) {
      throw ConfigError("grid directions must be ascending inside [-1, 1]");
    }
  }
  for (std::size_t j = 0; j < ranges.size(); ++j) {
    if (!(ranges[j] > 0.0) || (j > 0 && ranges[j] <= ranges[j - 1])) {
      throw ConfigError("grid ranges must be ascending and positive");
    }
  }
}

SpectrumGrid combined_spectrum(std::span<const SubspacePair> subspaces, const CombinerBank& bank,
                               const ArrayConfig& cfg, const WidebandGrid& grid,
                               const SearchGrid& search, Mode mode,
                               const SpectrumOptions& options) {
  cfg.validate();
  search.validate();
  if (static_cast<int>(subspaces.size()) != grid.size()) {
    throw DimensionError("need one subspace pair per subcarrier");
  }
  if (bank.antennas() != cfg.n_antennas) {
    throw DimensionError("combiner does not match the array size");
  }
  if (!(options.clamp > 0.0)) {
    throw ConfigError("spectrum clamp must be positive");
  }
  const bool near = describe(mode).near_field;
  if (near && search.ranges.empty()) {
    throw ConfigError("near-field modes need a range grid");
  }

  SpectrumGrid out;
  out.mode = mode;
  out.directions = search.directions;
  if (near) {
    out.ranges = search.ranges;
  }
  const kernels::SpectrumProblem problem{cfg,      grid,         bank, subspaces, out.directions,
                                         out.ranges, mode, options.clamp};
  out.values = options.reference ? kernels::evaluate_reference(problem)
                                 : kernels::evaluate_parallel(problem);
  return out;
}

SpectrumGrid combined_spectrum(const ObservationSet& obs, const CombinerBank& bank,
                               const ArrayConfig& cfg, const WidebandGrid& grid, int n_targets,
                               const SearchGrid& search, Mode mode,
                               const SpectrumOptions& options) {
  // identifiability is checked before any work
  if (cfg.n_antennas - n_targets < 1) {
    throw IdentifiabilityError("N - K must be >= 1");
  }
  if (obs.snapshots() < n_targets) {
    throw IdentifiabilityError("need T >= K snapshots");
  }
  if (obs.antennas() != cfg.n_antennas || obs.subcarriers() != grid.size()) {
    throw DimensionError("observation set does not match the array or subcarrier plan");
  }
  const std::vector<SubspacePair> subspaces = decompose_observations(obs, n_targets);
  return combined_spectrum(subspaces, bank, cfg, grid, search, mode, options);
}

Estimates find_peaks(const SpectrumGrid& spectrum, int n_targets) {
  const std::size_t n_dir = spectrum.directions.size();
  const std::size_t n_rng = spectrum.range_count();
  const std::size_t cells = n_dir * n_rng;
  if (cells == 0 || spectrum.values.size() != cells) {
    throw DimensionError("spectrum grid is empty or inconsistent");
  }
  if (n_targets < 1) {
    throw ConfigError("find_peaks needs K >= 1");
  }
  if (static_cast<std::size_t>(n_targets) > cells) {
    throw ConfigError("K exceeds the number of grid cells");
  }

  const auto& v = spectrum.values;
  const auto idx = [n_rng](std::size_t i, std::size_t j) { return i * n_rng + j; };
  std::vector<std::size_t> maxima;
  for (std::size_t i = 0; i < n_dir; ++i) {
    for (std::size_t j = 0; j < n_rng; ++j) {
      const double here = v[idx(i, j)];
      bool strict = true;
      for (int di = -1; di <= 1 && strict; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) {
            continue;
          }
          const auto ni = static_cast<long>(i) + di;
          const auto nj = static_cast<long>(j) + dj;
          if (ni < 0 || nj < 0 || ni >= static_cast<long>(n_dir) ||
              nj >= static_cast<long>(n_rng)) {
            continue;
          }
          if (v[idx(static_cast<std::size_t>(ni), static_cast<std::size_t>(nj))] >= here) {
            strict = false;
            break;
          }
        }
      }
      if (strict) {
        maxima.push_back(idx(i, j));
      }
    }
  }

  // row-major index order doubles as the (direction, range) tie-break
  const auto by_value = [&v](std::size_t a, std::size_t b) {
    return v[a] != v[b] ? v[a] > v[b] : a < b;
  };
  std::sort(maxima.begin(), maxima.end(), by_value);

  Estimates est;
  est.mode = spectrum.mode;
  std::vector<std::size_t> chosen(maxima.begin(),
                                  maxima.begin() + std::min<std::size_t>(maxima.size(),
                                                                         static_cast<std::size_t>(n_targets)));
  if (chosen.size() < static_cast<std::size_t>(n_targets)) {
    est.degraded = true;
    std::vector<std::size_t> rest;
    rest.reserve(cells);
    for (std::size_t c = 0; c < cells; ++c) {
      if (std::find(chosen.begin(), chosen.end(), c) == chosen.end()) {
        rest.push_back(c);
      }
    }
    const std::size_t need = static_cast<std::size_t>(n_targets) - chosen.size();
    std::partial_sort(rest.begin(), rest.begin() + static_cast<long>(need), rest.end(), by_value);
    chosen.insert(chosen.end(), rest.begin(), rest.begin() + static_cast<long>(need));
    std::sort(chosen.begin(), chosen.end(), by_value);
  }

  for (const std::size_t c : chosen) {
    Peak p;
    p.direction_index = c / n_rng;
    p.range_index = c % n_rng;
    p.direction = spectrum.directions[p.direction_index];
    if (!spectrum.direction_only()) {
      p.range = spectrum.ranges[p.range_index];
    }
    p.value = v[c];
    est.peaks.push_back(p);
  }
  return est;
}

namespace {

// vertex offset in cells of the parabola through (-1, lo), (0, mid), (1, hi)
double vertex_offset(double lo, double mid, double hi) {
  const double curv = lo - 2.0 * mid + hi;
  if (!(curv < 0.0)) {
    return 0.0;
  }
  return std::clamp(0.5 * (lo - hi) / curv, -0.5, 0.5);
}

}  // namespace

void refine_peaks(const SpectrumGrid& spectrum, Estimates& estimates) {
  const std::size_t n_dir = spectrum.directions.size();
  const std::size_t n_rng = spectrum.range_count();
  for (Peak& p : estimates.peaks) {
    const std::size_t i = p.direction_index;
    const std::size_t j = p.range_index;
    if (i > 0 && i + 1 < n_dir) {
      const double step = spectrum.directions[i + 1] - spectrum.directions[i];
      p.direction = spectrum.directions[i] +
                    step * vertex_offset(spectrum.at(i - 1, j), spectrum.at(i, j), spectrum.at(i + 1, j));
    }
    if (!spectrum.direction_only() && j > 0 && j + 1 < n_rng) {
      const double step = spectrum.ranges[j + 1] - spectrum.ranges[j];
      p.range = spectrum.ranges[j] +
                step * vertex_offset(spectrum.at(i, j - 1), spectrum.at(i, j), spectrum.at(i, j + 1));
    }
  }
}

}  // namespace nfmusic
