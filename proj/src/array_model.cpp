#include "nfmusic/array_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nfmusic {

ArrayConfig ArrayConfig::half_wavelength(int n_antennas, double carrier_hz) {
  ArrayConfig cfg;
  cfg.n_antennas = n_antennas;
  cfg.carrier_hz = carrier_hz;
  cfg.element_spacing_m = carrier_hz > 0.0 ? 0.5 * kSpeedOfLight / carrier_hz : 0.0;
  return cfg;
}

void ArrayConfig::validate() const {
  if (n_antennas < 2) {
    throw ConfigError("array needs at least 2 antennas, got " + std::to_string(n_antennas));
  }
  if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz)) {
    throw ConfigError("carrier frequency must be positive");
  }
  if (!(element_spacing_m > 0.0) || !std::isfinite(element_spacing_m)) {
    throw ConfigError("element spacing must be positive");
  }
}

double subcarrier_frequency(int m, int subcarriers, double bandwidth_hz, double carrier_hz) {
  if (subcarriers < 1) {
    throw std::out_of_range("subcarrier count must be >= 1");
  }
  if (m < 1 || m > subcarriers) {
    throw std::out_of_range("subcarrier index " + std::to_string(m) + " outside [1, " +
                            std::to_string(subcarriers) + "]");
  }
  if (subcarriers == 1) {
    return carrier_hz;
  }
  const double frac = static_cast<double>(m - 1) / static_cast<double>(subcarriers - 1);
  return carrier_hz + bandwidth_hz * (frac - 0.5);
}

WidebandGrid WidebandGrid::make(int subcarriers, double bandwidth_hz, double carrier_hz) {
  if (subcarriers < 1) {
    throw ConfigError("need at least one subcarrier");
  }
  if (!(carrier_hz > 0.0)) {
    throw ConfigError("carrier frequency must be positive");
  }
  if (bandwidth_hz < 0.0 || bandwidth_hz >= 2.0 * carrier_hz) {
    throw ConfigError("bandwidth must lie in [0, 2 f_c)");
  }
  WidebandGrid grid;
  grid.carrier_hz = carrier_hz;
  grid.bandwidth_hz = bandwidth_hz;
  grid.frequencies.reserve(subcarriers);
  grid.ratios.reserve(subcarriers);
  for (int m = 1; m <= subcarriers; ++m) {
    const double f = subcarrier_frequency(m, subcarriers, bandwidth_hz, carrier_hz);
    grid.frequencies.push_back(f);
    // exact 1 at the carrier rather than f_c / (f_c + tiny)
    grid.ratios.push_back(f == carrier_hz ? 1.0 : carrier_hz / f);
  }
  return grid;
}

double fraunhofer_distance(const ArrayConfig& cfg) {
  const double aperture = cfg.aperture();
  return 2.0 * aperture * aperture / cfg.wavelength();
}

double element_range_exact(double u, double r, int n, const ArrayConfig& cfg, RadicandForm form) {
  if (n < 1 || n > cfg.n_antennas) {
    throw std::out_of_range("element index " + std::to_string(n) + " outside array");
  }
  const double x = (n - 1) * cfg.element_spacing_m;
  const double quad = form == RadicandForm::AsPrinted ? 2.0 * x * x : x * x;
  const double radicand = r * r + quad - 2.0 * r * x * u;
  if (radicand < 0.0) {
    throw DomainError("negative radicand in element range");
  }
  return std::sqrt(radicand);
}

double curvature(double u, double r) {
  if (r == 0.0) {
    throw DomainError("curvature undefined at r = 0");
  }
  return (1.0 - u * u) / (2.0 * r);
}

double element_range_fresnel(double u, double r, int n, const ArrayConfig& cfg) {
  if (n < 1 || n > cfg.n_antennas) {
    throw std::out_of_range("element index " + std::to_string(n) + " outside array");
  }
  const double x = (n - 1) * cfg.element_spacing_m;
  return r - x * u + x * x * curvature(u, r);
}

namespace {

SteeringVector fresnel_steering(double u, double zeta, double global_range, double f_hz,
                                const ArrayConfig& cfg) {
  const int n_ant = cfg.n_antennas;
  const double k = kTwoPi * f_hz / kSpeedOfLight;
  const double d = cfg.element_spacing_m;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_ant));
  const double global = -k * global_range;

  SteeringVector sv;
  sv.curvature = zeta;
  sv.entries.resize(n_ant);
  for (int n = 0; n < n_ant; ++n) {
    const double x = n * d;
    sv.entries[n] = std::polar(scale, global + k * (x * u - x * x * zeta));
  }
  return sv;
}

}  // namespace

SteeringVector nearfield_steering(double u, double r, double f_hz, const ArrayConfig& cfg) {
  if (!(r > 0.0)) {
    throw DomainError("near-field steering needs r > 0");
  }
  return fresnel_steering(u, curvature(u, r), r, f_hz, cfg);
}

SteeringVector squinted_steering(double u, double r, double eta, const ArrayConfig& cfg) {
  const SquintedLocation loc = squint_map(u, r, eta);
  // zeta_bar = (1 - eta^2 u^2) / (2 r_bar) = eta * zeta, finite even when r_bar <= 0
  return fresnel_steering(loc.direction, eta * curvature(u, r), loc.range, cfg.carrier_hz, cfg);
}

SteeringVector farfield_steering(double u, double f_hz, const ArrayConfig& cfg) {
  const int n_ant = cfg.n_antennas;
  const double k = kTwoPi * f_hz / kSpeedOfLight;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_ant));
  SteeringVector sv;
  sv.entries.resize(n_ant);
  for (int n = 0; n < n_ant; ++n) {
    sv.entries[n] = std::polar(scale, k * n * cfg.element_spacing_m * u);
  }
  return sv;
}

SquintedLocation squint_map(double u, double r, double eta) {
  if (!(std::abs(u) <= 1.0)) {
    throw DomainError("directional sine outside [-1, 1]");
  }
  if (std::abs(u) == 1.0) {
    throw DomainError("squinted range is singular at |u| = 1");
  }
  if (!(r > 0.0)) {
    throw DomainError("squint map needs r > 0");
  }
  if (!(eta > 0.0)) {
    throw DomainError("squint ratio must be positive");
  }
  SquintedLocation loc;
  if (eta == 1.0) {
    loc.direction = u;
    loc.range = r;
    return loc;
  }
  loc.direction = eta * u;
  loc.range = r * (1.0 - eta * eta * u * u) / (eta * (1.0 - u * u));
  loc.direction_shift = (eta - 1.0) * u;
  loc.range_shift = loc.range - r;
  loc.outside_visible = std::abs(loc.direction) > 1.0;
  return loc;
}

double array_gain(const CVector& ref, const CVector& probe) {
  if (ref.size() != probe.size()) {
    throw DimensionError("array_gain: length mismatch");
  }
  return std::abs(ref.dot(probe));  // Eigen's dot conjugates the first argument
}

}  // namespace nfmusic
