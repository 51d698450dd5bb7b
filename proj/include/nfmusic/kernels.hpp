#pragma once

#include <span>
#include <vector>

#include "nfmusic/estimator.hpp"

namespace nfmusic::kernels {

struct SpectrumProblem {
  const ArrayConfig& cfg;
  const WidebandGrid& grid;
  const CombinerBank& bank;
  std::span<const SubspacePair> subspaces;  // one per subcarrier
  std::span<const double> directions;
  std::span<const double> ranges;  // empty for far-field modes
  Mode mode;
  double clamp;
};

// Literal evaluation: builds steering vectors, T_m and V^N_m explicitly for
// every hypothesis and calls music_spectrum_point. Serial. Near-field squint
// modes need |u| < 1 on the grid (the squinted range is singular at |u| = 1).
std::vector<double> evaluate_reference(const SpectrumProblem& problem);

// OpenMP kernel over direction rows. Uses
//   ||U^N^H W^H c||^2 = ||W^H c||^2 - ||(W U^S)^H c||^2
// with the block-diagonal W, and quadratic-phase recurrences for the steering.
// Global range phases are dropped (the projector ignores them), which keeps
// |u| = 1 hypotheses finite.
std::vector<double> evaluate_parallel(const SpectrumProblem& problem);

}  // namespace nfmusic::kernels
