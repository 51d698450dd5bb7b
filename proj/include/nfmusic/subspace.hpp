#pragma once

#include <vector>

#include "nfmusic/scene.hpp"
#include "nfmusic/types.hpp"

namespace nfmusic {

// (1/T) Y Y^H, symmetrized as (R + R^H) / 2.
CMatrix sample_covariance(const CMatrix& y);

struct SubspacePair {
  CMatrix signal;       // U^S, N x K
  CMatrix noise;        // U^N, N x (N - K)
  RVector eigenvalues;  // descending
  bool split_tie = false;  // lambda_K == lambda_{K+1}: the split is not unique
};

// Hermitian eigendecomposition split at the K largest eigenvalues.
// Throws IdentifiabilityError when K >= N, NumericError on non-finite input.
SubspacePair eigendecompose(const CMatrix& r, int n_targets);

// One pair per subcarrier; checks N - K >= 1 and T >= K first.
std::vector<SubspacePair> decompose_observations(const ObservationSet& obs, int n_targets);

}  // namespace nfmusic
