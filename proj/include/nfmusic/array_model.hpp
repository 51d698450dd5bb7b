#pragma once

#include <vector>

#include "nfmusic/types.hpp"

namespace nfmusic {

// Uniform linear array. Element n (0-based) sits at offset n * d from the
// reference element; directions are directional sines u = sin(phi).
struct ArrayConfig {
  int n_antennas = 0;
  double carrier_hz = 0.0;
  double element_spacing_m = 0.0;

  static ArrayConfig half_wavelength(int n_antennas, double carrier_hz);

  double wavelength() const { return kSpeedOfLight / carrier_hz; }
  double aperture() const { return (n_antennas - 1) * element_spacing_m; }

  // Throws ConfigError unless N >= 2, d > 0, f_c > 0.
  void validate() const;
};

// Symmetric subcarrier plan spanning [f_c - B/2, f_c + B/2].
struct WidebandGrid {
  double carrier_hz = 0.0;
  double bandwidth_hz = 0.0;
  std::vector<double> frequencies;  // f_m, non-decreasing (strict when B > 0)
  std::vector<double> ratios;       // eta_m = f_c / f_m

  static WidebandGrid make(int subcarriers, double bandwidth_hz, double carrier_hz);

  int size() const { return static_cast<int>(frequencies.size()); }
};

// 1-based subcarrier index m in [1, M]. Throws std::out_of_range otherwise.
double subcarrier_frequency(int m, int subcarriers, double bandwidth_hz, double carrier_hz);

// 2 D^2 / lambda with D = (N - 1) d.
double fraunhofer_distance(const ArrayConfig& cfg);

enum class RadicandForm {
  LawOfCosines,  // r^2 + x^2 - 2 r x u
  AsPrinted,     // r^2 + 2 x^2 - 2 r x u
};

// Distance from the target (u, r) to element n (1-based), x = (n - 1) d.
double element_range_exact(double u, double r, int n, const ArrayConfig& cfg,
                           RadicandForm form = RadicandForm::LawOfCosines);

// Second-order (Fresnel) expansion r - x u + x^2 zeta.
double element_range_fresnel(double u, double r, int n, const ArrayConfig& cfg);

// zeta = (1 - u^2) / (2 r)
double curvature(double u, double r);

struct SteeringVector {
  CVector entries;
  double curvature = 0.0;

  Eigen::Index size() const { return entries.size(); }
};

// Fresnel-domain near-field steering at frequency f:
//   a_n = exp(-j k r) / sqrt(N) * exp(j k (x_n u - x_n^2 zeta)),  k = 2 pi f / c.
SteeringVector nearfield_steering(double u, double r, double f_hz, const ArrayConfig& cfg);

// Steering at the beam-squinted location of (u, r) for ratio eta, on the
// nominal carrier: direction eta * u, curvature eta * zeta (equivalently
// nearfield_steering(squint_map(u, r, eta), f_c) whenever that range is
// positive), global phase from the squinted range. Requires |u| < 1.
SteeringVector squinted_steering(double u, double r, double eta, const ArrayConfig& cfg);

// Planar-wave steering, a_n = exp(j k x_n u) / sqrt(N).
SteeringVector farfield_steering(double u, double f_hz, const ArrayConfig& cfg);

struct SquintedLocation {
  double direction = 0.0;        // eta * u
  double range = 0.0;            // r (1 - eta^2 u^2) / (eta (1 - u^2))
  double direction_shift = 0.0;  // (eta - 1) u
  double range_shift = 0.0;      // range - r
  bool outside_visible = false;  // |eta * u| > 1
};

// Physical (u, r) -> beam-squinted location at ratio eta = f_c / f_m.
// Requires |u| < 1, r > 0, eta > 0.
SquintedLocation squint_map(double u, double r, double eta);

// |ref^H probe|
double array_gain(const CVector& ref, const CVector& probe);

}  // namespace nfmusic
