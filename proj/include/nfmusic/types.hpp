#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace nfmusic {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

// Propagation speed used throughout. 3e8 m/s puts the 300 GHz wavelength at
// exactly 1 mm, which is the convention all reference geometry values assume.
inline constexpr double kSpeedOfLight = 3.0e8;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid scenario or geometry parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input outside the mathematical domain of an operation (r <= 0, |u| = 1 ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// N - K < 1 or T < K: the noise subspace does not exist.
class IdentifiabilityError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace nfmusic
