#include "nfmusic/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nfmusic/parallel.hpp"

namespace nfmusic {

CMatrix sample_covariance(const CMatrix& y) {
  if (y.cols() < 1) {
    throw ConfigError("covariance needs at least one snapshot");
  }
  CMatrix r = (y * y.adjoint()) / static_cast<double>(y.cols());
  return 0.5 * (r + r.adjoint());
}

SubspacePair eigendecompose(const CMatrix& r, int n_targets) {
  const Eigen::Index n = r.rows();
  if (r.cols() != n) {
    throw DimensionError("covariance must be square");
  }
  if (n_targets < 0 || n_targets >= n) {
    throw IdentifiabilityError("need 0 <= K < N for a noise subspace, got K = " +
                               std::to_string(n_targets) + ", N = " + std::to_string(n));
  }
  if (!r.allFinite()) {
    throw NumericError("covariance has non-finite entries");
  }
  const CMatrix herm = 0.5 * (r + r.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm);
  if (solver.info() != Eigen::Success) {
    throw NumericError("Hermitian eigensolver did not converge");
  }
  const RVector& vals = solver.eigenvalues();  // ascending
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  // descending by value; equal values keep the solver's index order
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return vals[a] > vals[b]; });

  SubspacePair out;
  out.eigenvalues.resize(n);
  CMatrix vecs(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.eigenvalues[i] = vals[order[static_cast<std::size_t>(i)]];
    vecs.col(i) = solver.eigenvectors().col(order[static_cast<std::size_t>(i)]);
  }
  out.signal = vecs.leftCols(n_targets);
  out.noise = vecs.rightCols(n - n_targets);
  if (n_targets > 0) {
    const double scale = std::max(std::abs(out.eigenvalues[0]), 1e-300);
    out.split_tie = std::abs(out.eigenvalues[n_targets - 1] - out.eigenvalues[n_targets]) <=
                    1e-12 * scale;
  }
  return out;
}

std::vector<SubspacePair> decompose_observations(const ObservationSet& obs, int n_targets) {
  const int n = obs.antennas();
  if (n - n_targets < 1) {
    throw IdentifiabilityError("rank of the noise projector N - K must be >= 1 (N = " +
                               std::to_string(n) + ", K = " + std::to_string(n_targets) + ")");
  }
  if (obs.snapshots() < n_targets) {
    throw IdentifiabilityError("need T >= K snapshots (T = " + std::to_string(obs.snapshots()) +
                               ", K = " + std::to_string(n_targets) + ")");
  }
  std::vector<SubspacePair> out(static_cast<std::size_t>(obs.subcarriers()));
  parallel_for(obs.subcarriers(), [&](int m) {
    out[static_cast<std::size_t>(m)] = eigendecompose(sample_covariance(obs.stacked[m]), n_targets);
  });
  return out;
}

}  // namespace nfmusic
