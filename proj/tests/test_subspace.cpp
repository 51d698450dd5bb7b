#include <doctest.h>

#include <cmath>
#include <limits>

#include "nfmusic/subspace.hpp"
#include "support.hpp"

using namespace nfmusic;

namespace {

double subspace_defect(const SubspacePair& sp) {
  const Eigen::Index n = sp.signal.rows();
  const CMatrix proj = sp.signal * sp.signal.adjoint() + sp.noise * sp.noise.adjoint();
  return (proj - CMatrix::Identity(n, n)).norm();
}

}  // namespace

TEST_CASE("sample covariance") {
  CHECK(sample_covariance(CMatrix::Zero(6, 10)).cwiseAbs().maxCoeff() == 0.0);
  std::mt19937_64 eng(1);
  const CMatrix y = testing::random_matrix(6, 1, eng);
  const CMatrix r = sample_covariance(y);
  CHECK((r - y * y.adjoint()).norm() < 1e-14);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(r);
  CHECK(es.eigenvalues()(4) < 1e-12);
  CHECK((r - r.adjoint()).norm() == 0.0);

  // noise-only: (1/T) Y Y^H -> sigma^2 I
  const CMatrix noise = testing::random_matrix(8, 50000, eng) * std::sqrt(0.5 * 0.25);
  const CMatrix rn = sample_covariance(noise);
  CHECK((rn - 0.25 * CMatrix::Identity(8, 8)).norm() / (0.25 * std::sqrt(8.0)) < 0.05);
}

TEST_CASE("eigendecompose examples") {
  const SubspacePair id = eigendecompose(CMatrix::Identity(5, 5), 1);
  CHECK((id.eigenvalues.array() - 1.0).abs().maxCoeff() < 1e-14);
  CHECK((id.noise * id.noise.adjoint()).trace().real() == doctest::Approx(4.0));
  CHECK(id.split_tie);

  CMatrix d = CMatrix::Zero(3, 3);
  d(0, 0) = 3.0;
  d(1, 1) = 2.0;
  d(2, 2) = 1.0;
  const SubspacePair sp = eigendecompose(d, 1);
  CHECK(sp.eigenvalues(0) == doctest::Approx(3.0));
  CHECK(sp.eigenvalues(1) == doctest::Approx(2.0));
  CHECK(sp.eigenvalues(2) == doctest::Approx(1.0));
  CHECK(std::abs(std::abs(sp.signal(0, 0)) - 1.0) < 1e-14);
  CHECK(sp.noise.rows() == 3);
  CHECK(sp.noise.cols() == 2);
  CHECK_FALSE(sp.split_tie);
}

TEST_CASE("eigendecompose errors") {
  CHECK_THROWS_AS(eigendecompose(CMatrix::Identity(4, 4), 4), IdentifiabilityError);
  CHECK_THROWS_AS(eigendecompose(CMatrix::Identity(4, 4), 5), IdentifiabilityError);
  CMatrix bad = CMatrix::Identity(4, 4);
  bad(1, 2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(eigendecompose(bad, 1), NumericError);
  CHECK_THROWS_AS(eigendecompose(CMatrix::Identity(4, 3), 1), DimensionError);
}

TEST_CASE("invariants over random covariances") {
  std::mt19937_64 eng(17);
  std::uniform_int_distribution<int> pick_n(2, 24);
  for (int draw = 0; draw < 100; ++draw) {
    const int n = pick_n(eng);
    const int k = 1 + static_cast<int>(eng() % static_cast<std::uint64_t>(n - 1));
    const CMatrix y = testing::random_matrix(n, n + 3, eng);
    const CMatrix r = sample_covariance(y);
    const SubspacePair sp = eigendecompose(r, k);
    CHECK(subspace_defect(sp) < 1e-8);
    CHECK((sp.signal.adjoint() * sp.noise).norm() < 1e-8);
    CHECK(std::abs(sp.eigenvalues.sum() - r.trace().real()) / r.trace().real() < 1e-8);
    for (Eigen::Index i = 1; i < sp.eigenvalues.size(); ++i) {
      CHECK(sp.eigenvalues(i) <= sp.eigenvalues(i - 1));
    }
    CHECK(sp.eigenvalues.minCoeff() > -1e-10 * r.norm());
  }
}

TEST_CASE("noiseless low-rank covariance separates cleanly") {
  std::mt19937_64 eng(5);
  const CMatrix a = testing::random_matrix(16, 2, eng);
  const CMatrix s = testing::random_matrix(2, 40, eng);
  const SubspacePair sp = eigendecompose(sample_covariance(a * s), 2);
  CHECK(sp.eigenvalues(1) / std::max(std::abs(sp.eigenvalues(2)), 1e-300) > 1e6);
  CHECK((a.adjoint() * sp.noise).norm() < 1e-8 * a.norm());
}
