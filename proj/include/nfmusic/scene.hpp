#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nfmusic/array_model.hpp"
#include "nfmusic/types.hpp"

namespace nfmusic {

struct Target {
  double direction = 0.0;           // u, |u| < 1
  double range = 0.0;               // meters
  std::vector<Complex> reflection;  // beta_m, one per subcarrier
};

// Transmit probe per subcarrier: X_m = F S_m, with F F^H = I / N so that
// E{X_m X_m^H} / T = P_r / (M N) I.
struct ProbeSignal {
  std::vector<CMatrix> transmit;  // X_m, N x T
  CMatrix precoder;               // F, N x N
  double power_w = 0.0;
  int snapshots = 0;
};

ProbeSignal generate_probe(const ArrayConfig& cfg, const WidebandGrid& grid, double power_w,
                           int snapshots, std::uint64_t seed);

// Subarrayed analog combiner: slot j reads antennas [j N_RF, (j + 1) N_RF)
// through the dense block Wbar_j. The full W = [W_1 ... W_J] is block diagonal.
class CombinerBank {
 public:
  CombinerBank(std::vector<CMatrix> blocks, int n_antennas);

  int rf_chains() const { return rf_chains_; }
  int slots() const { return static_cast<int>(blocks_.size()); }
  int antennas() const { return n_antennas_; }

  const CMatrix& block(int j) const { return blocks_.at(j); }
  const std::vector<CMatrix>& blocks() const { return blocks_; }
  // W_j, N x N_RF, zero outside rows of block j.
  CMatrix slot_combiner(int j) const;
  const CMatrix& full() const { return full_; }

 private:
  std::vector<CMatrix> blocks_;
  CMatrix full_;
  int rf_chains_ = 0;
  int n_antennas_ = 0;
};

// Wbar_j entries (1 / sqrt(N)) exp(j Phi), Phi ~ U[-pi/2, pi/2].
CombinerBank random_combiner(const ArrayConfig& cfg, int rf_chains, std::uint64_t seed);

// Wbar_j = I / sqrt(N): W^H W = I / N exactly.
CombinerBank scaled_identity_combiner(const ArrayConfig& cfg, int rf_chains);

// beta_{m,k} i.i.d. CN(0, 1); returns K x M.
CMatrix reflection_coefficients(int n_targets, int n_subcarriers, std::uint64_t seed);

std::vector<Target> attach_reflections(std::span<const Target> targets, const CMatrix& beta);

struct SceneMatrices {
  CMatrix steering;       // A_m, N x K
  CMatrix combined;       // D_m = W^H A_m
  CMatrix reflection;     // Pi_m = diag(beta_m)
  CMatrix gram_weighted;  // Pi_m A_m^T A_m^* Pi_m^H
};

// m is 0-based here and in everything below.
SceneMatrices scene_matrices(std::span<const Target> targets, const CombinerBank& bank,
                             const ArrayConfig& cfg, const WidebandGrid& grid, int m);

// Pre-combining field at the antennas for subcarrier m:
//   sum_k a(ubar, rbar) beta a^T X_m + noise, noise i.i.d. CN(0, sigma^2).
// The noise draw depends only on (seed, m).
CMatrix element_field(std::span<const Target> targets, const ProbeSignal& probe,
                      const ArrayConfig& cfg, const WidebandGrid& grid, int m, double noise_power,
                      std::uint64_t seed);

struct ObservationSet {
  std::vector<CMatrix> stacked;  // Y_m, N x T
  double noise_power = 0.0;
  bool outside_visible = false;  // some squinted direction left [-1, 1]

  int subcarriers() const { return static_cast<int>(stacked.size()); }
  int antennas() const { return stacked.empty() ? 0 : static_cast<int>(stacked.front().rows()); }
  int snapshots() const { return stacked.empty() ? 0 : static_cast<int>(stacked.front().cols()); }
};

// Slot-by-slot collection Y_{j,m} = W_j^H (field), stacked over j.
ObservationSet synthesize_echo(std::span<const Target> targets, const ProbeSignal& probe,
                               const CombinerBank& bank, const ArrayConfig& cfg,
                               const WidebandGrid& grid, double noise_power, std::uint64_t seed);

}  // namespace nfmusic
