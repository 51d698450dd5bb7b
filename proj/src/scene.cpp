#include "nfmusic/scene.hpp"

#include <cmath>
#include <string>

#include "nfmusic/parallel.hpp"
#include "nfmusic/rng.hpp"

namespace nfmusic {

namespace {

CMatrix draw_complex_normal(Eigen::Index rows, Eigen::Index cols, double variance, Engine& eng) {
  if (variance <= 0.0) {
    return CMatrix::Zero(rows, cols);
  }
  ComplexNormal dist(variance);
  CMatrix out(rows, cols);
  // column-major fill order is part of the determinism contract
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      out(r, c) = dist(eng);
    }
  }
  return out;
}

CMatrix dft_precoder(int n) {
  CMatrix f(n, n);
  const double scale = 1.0 / n;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      // reduce the exponent first so large N keeps full phase precision
      const long long idx = (static_cast<long long>(i) * k) % n;
      f(i, k) = std::polar(scale, -kTwoPi * static_cast<double>(idx) / n);
    }
  }
  return f;
}

}  // namespace

ProbeSignal generate_probe(const ArrayConfig& cfg, const WidebandGrid& grid, double power_w,
                           int snapshots, std::uint64_t seed) {
  cfg.validate();
  if (snapshots < 1) {
    throw ConfigError("probe needs at least one snapshot");
  }
  if (power_w < 0.0) {
    throw ConfigError("transmit power must be non-negative");
  }
  const int n = cfg.n_antennas;
  const int n_sub = grid.size();
  ProbeSignal probe;
  probe.power_w = power_w;
  probe.snapshots = snapshots;
  probe.precoder = dft_precoder(n);
  probe.transmit.resize(n_sub);

  // E{X X^H} / T = sigma_s^2 F F^H = sigma_s^2 / N I  =>  sigma_s^2 = P_r / M
  const double symbol_var = power_w / n_sub;
  parallel_for(n_sub, [&](int m) {
    Engine eng(derive_seed(seed, {static_cast<std::uint64_t>(Stream::Probe),
                                  static_cast<std::uint64_t>(m)}));
    const CMatrix symbols = draw_complex_normal(n, snapshots, symbol_var, eng);
    probe.transmit[m] = probe.precoder * symbols;
  });
  return probe;
}

CombinerBank::CombinerBank(std::vector<CMatrix> blocks, int n_antennas)
    : blocks_(std::move(blocks)), n_antennas_(n_antennas) {
  if (blocks_.empty()) {
    throw ConfigError("combiner bank needs at least one slot");
  }
  rf_chains_ = static_cast<int>(blocks_.front().rows());
  if (rf_chains_ < 1 || static_cast<long>(rf_chains_) * slots() != n_antennas_) {
    throw ConfigError("combiner blocks do not tile the array");
  }
  full_ = CMatrix::Zero(n_antennas_, n_antennas_);
  for (int j = 0; j < slots(); ++j) {
    if (blocks_[j].rows() != rf_chains_ || blocks_[j].cols() != rf_chains_) {
      throw DimensionError("combiner block " + std::to_string(j) + " is not N_RF x N_RF");
    }
    full_.block(j * rf_chains_, j * rf_chains_, rf_chains_, rf_chains_) = blocks_[j];
  }
}

CMatrix CombinerBank::slot_combiner(int j) const {
  if (j < 0 || j >= slots()) {
    throw std::out_of_range("slot index out of range");
  }
  CMatrix w = CMatrix::Zero(n_antennas_, rf_chains_);
  w.block(j * rf_chains_, 0, rf_chains_, rf_chains_) = blocks_[j];
  return w;
}

namespace {

void check_rf_split(const ArrayConfig& cfg, int rf_chains) {
  cfg.validate();
  if (rf_chains < 1 || cfg.n_antennas % rf_chains != 0) {
    throw ConfigError("N_RF = " + std::to_string(rf_chains) + " does not divide N = " +
                      std::to_string(cfg.n_antennas));
  }
}

}  // namespace

CombinerBank random_combiner(const ArrayConfig& cfg, int rf_chains, std::uint64_t seed) {
  check_rf_split(cfg, rf_chains);
  const int n_slots = cfg.n_antennas / rf_chains;
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.n_antennas));
  Engine eng(derive_seed(seed, {static_cast<std::uint64_t>(Stream::Combiner)}));
  std::uniform_real_distribution<double> phase(-0.5 * kPi, 0.5 * kPi);

  std::vector<CMatrix> blocks(n_slots, CMatrix(rf_chains, rf_chains));
  for (auto& b : blocks) {
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
      for (Eigen::Index r = 0; r < b.rows(); ++r) {
        b(r, c) = std::polar(scale, phase(eng));
      }
    }
  }
  return CombinerBank(std::move(blocks), cfg.n_antennas);
}

CombinerBank scaled_identity_combiner(const ArrayConfig& cfg, int rf_chains) {
  check_rf_split(cfg, rf_chains);
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.n_antennas));
  std::vector<CMatrix> blocks(cfg.n_antennas / rf_chains,
                              CMatrix::Identity(rf_chains, rf_chains) * scale);
  return CombinerBank(std::move(blocks), cfg.n_antennas);
}

CMatrix reflection_coefficients(int n_targets, int n_subcarriers, std::uint64_t seed) {
  if (n_targets < 0 || n_subcarriers < 1) {
    throw ConfigError("reflection coefficients need K >= 0 and M >= 1");
  }
  Engine eng(derive_seed(seed, {static_cast<std::uint64_t>(Stream::Reflection)}));
  return draw_complex_normal(n_targets, n_subcarriers, 1.0, eng);
}

std::vector<Target> attach_reflections(std::span<const Target> targets, const CMatrix& beta) {
  if (beta.rows() != static_cast<Eigen::Index>(targets.size())) {
    throw DimensionError("reflection matrix rows must equal the target count");
  }
  std::vector<Target> out(targets.begin(), targets.end());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].reflection.assign(beta.cols(), Complex{});
    for (Eigen::Index m = 0; m < beta.cols(); ++m) {
      out[k].reflection[m] = beta(static_cast<Eigen::Index>(k), m);
    }
  }
  return out;
}

namespace {

void check_targets(std::span<const Target> targets, int n_sub) {
  for (const Target& t : targets) {
    if (!(std::abs(t.direction) < 1.0) || !(t.range > 0.0)) {
      throw DomainError("targets need |u| < 1 and r > 0");
    }
    if (static_cast<int>(t.reflection.size()) != n_sub) {
      throw DimensionError("target reflection count must equal the subcarrier count");
    }
  }
}

CMatrix squinted_steering_matrix(std::span<const Target> targets, const ArrayConfig& cfg,
                                 double eta) {
  CMatrix a(cfg.n_antennas, static_cast<Eigen::Index>(targets.size()));
  for (std::size_t k = 0; k < targets.size(); ++k) {
    a.col(static_cast<Eigen::Index>(k)) =
        squinted_steering(targets[k].direction, targets[k].range, eta, cfg).entries;
  }
  return a;
}

}  // namespace

SceneMatrices scene_matrices(std::span<const Target> targets, const CombinerBank& bank,
                             const ArrayConfig& cfg, const WidebandGrid& grid, int m) {
  check_targets(targets, grid.size());
  SceneMatrices s;
  s.steering = squinted_steering_matrix(targets, cfg, grid.ratios.at(m));
  s.combined = bank.full().adjoint() * s.steering;
  const auto n_targets = static_cast<Eigen::Index>(targets.size());
  s.reflection = CMatrix::Zero(n_targets, n_targets);
  for (Eigen::Index k = 0; k < n_targets; ++k) {
    s.reflection(k, k) = targets[k].reflection[m];
  }
  s.gram_weighted =
      s.reflection * s.steering.transpose() * s.steering.conjugate() * s.reflection.adjoint();
  return s;
}

CMatrix element_field(std::span<const Target> targets, const ProbeSignal& probe,
                      const ArrayConfig& cfg, const WidebandGrid& grid, int m, double noise_power,
                      std::uint64_t seed) {
  check_targets(targets, grid.size());
  const CMatrix& x = probe.transmit.at(m);
  if (x.rows() != cfg.n_antennas) {
    throw DimensionError("probe does not match the array size");
  }
  Engine eng(derive_seed(seed, {static_cast<std::uint64_t>(Stream::Noise),
                                static_cast<std::uint64_t>(m)}));
  CMatrix field = draw_complex_normal(cfg.n_antennas, x.cols(), noise_power, eng);
  const double eta = grid.ratios.at(m);
  for (const Target& t : targets) {
    const CVector a = squinted_steering(t.direction, t.range, eta, cfg).entries;
    // echo row: beta a^T X_m
    const Eigen::RowVectorXcd echo = t.reflection[m] * (a.transpose() * x);
    field.noalias() += a * echo;
  }
  return field;
}

ObservationSet synthesize_echo(std::span<const Target> targets, const ProbeSignal& probe,
                               const CombinerBank& bank, const ArrayConfig& cfg,
                               const WidebandGrid& grid, double noise_power, std::uint64_t seed) {
  if (noise_power < 0.0) {
    throw ConfigError("noise power must be non-negative");
  }
  if (bank.antennas() != cfg.n_antennas) {
    throw DimensionError("combiner does not match the array size");
  }
  if (static_cast<int>(probe.transmit.size()) != grid.size()) {
    throw DimensionError("probe does not match the subcarrier count");
  }
  check_targets(targets, grid.size());

  const int n_sub = grid.size();
  const int nrf = bank.rf_chains();
  ObservationSet obs;
  obs.noise_power = noise_power;
  obs.stacked.resize(n_sub);
  for (const Target& t : targets) {
    for (const double eta : grid.ratios) {
      obs.outside_visible = obs.outside_visible || std::abs(eta * t.direction) > 1.0;
    }
  }

  parallel_for(n_sub, [&](int m) {
    const CMatrix field = element_field(targets, probe, cfg, grid, m, noise_power, seed);
    CMatrix y(cfg.n_antennas, field.cols());
    for (int j = 0; j < bank.slots(); ++j) {
      // Y_{j,m} = W_j^H field; only rows of block j are non-zero in W_j
      y.middleRows(j * nrf, nrf).noalias() = bank.block(j).adjoint() * field.middleRows(j * nrf, nrf);
    }
    obs.stacked[m] = std::move(y);
  });
  return obs;
}

}  // namespace nfmusic
