#include <doctest.h>

#include <cmath>

#include <omp.h>

#include "nfmusic/bench.hpp"
#include "nfmusic/kernels.hpp"

using namespace nfmusic;

namespace {

struct Fixture {
  Scenario s;
  TrialScene scene;
  SearchGrid grid;
};

Fixture make_fixture(int n_targets, double snr_db, int n_antennas = 32) {
  Scenario s = Scenario::desk();
  s.array = ArrayConfig::half_wavelength(n_antennas, 300e9);
  s.subcarriers = 4;
  s.snapshots = 48;
  s.grid_max_r = 2.0;
  s.n_targets = n_targets;
  s.fixed_targets = {{0.45, 1.2}, {-0.3, 0.8}};
  s.fixed_targets.resize(static_cast<std::size_t>(n_targets));
  Fixture f{s, simulate_scene(s, snr_db, 0), {}};
  f.grid = SearchGrid::uniform(0.02, 0.3, 2.0, 0.1);
  // the literal reference cannot evaluate the singular |u| = 1 rows
  f.grid.directions.front() = -0.99;
  f.grid.directions.back() = 0.99;
  return f;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::abs(b[i]));
  }
  return worst;
}

kernels::SpectrumProblem problem(const Fixture& f, Mode mode) {
  const bool near = describe(mode).near_field;
  return kernels::SpectrumProblem{f.s.array,       f.scene.band, f.scene.bank,
                                  f.scene.subspaces, f.grid.directions,
                                  near ? std::span<const double>(f.grid.ranges) : std::span<const double>(),
                                  mode,              kDefaultClamp};
}

}  // namespace

TEST_CASE("parallel kernel matches the serial reference") {
  for (const int k : {1, 2}) {
    for (const double snr : {5.0, 30.0}) {
      const Fixture f = make_fixture(k, snr);
      for (const Mode mode : all_modes()) {
        CAPTURE(k);
        CAPTURE(snr);
        CAPTURE(mode_name(mode));
        const std::vector<double> ref = kernels::evaluate_reference(problem(f, mode));
        const std::vector<double> par = kernels::evaluate_parallel(problem(f, mode));
        CHECK(max_rel_diff(par, ref) < 1e-9);
      }
    }
  }
}

TEST_CASE("parallel kernel matches the reference across re-anchoring") {
  Fixture f = make_fixture(1, 20.0, 128);
  f.grid = SearchGrid::uniform(0.1, 0.5, 8.0, 0.5);
  f.grid.directions.front() = -0.99;
  f.grid.directions.back() = 0.99;
  for (const Mode mode : all_modes()) {
    CAPTURE(mode_name(mode));
    CHECK(max_rel_diff(kernels::evaluate_parallel(problem(f, mode)),
                       kernels::evaluate_reference(problem(f, mode))) < 1e-9);
  }
}

TEST_CASE("parallel kernel is schedule independent") {
  const Fixture f = make_fixture(2, 10.0);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const std::vector<double> one = kernels::evaluate_parallel(problem(f, Mode::ProposedBSC));
  omp_set_num_threads(4);
  const std::vector<double> four = kernels::evaluate_parallel(problem(f, Mode::ProposedBSC));
  omp_set_num_threads(saved);
  CHECK(one == four);
}

TEST_CASE("endfire hypotheses") {
  Fixture f = make_fixture(1, 10.0);
  f.grid.directions = {-1.0, 0.0, 1.0};
  for (const Mode mode : all_modes()) {
    const std::vector<double> par = kernels::evaluate_parallel(problem(f, mode));
    for (const double v : par) {
      CHECK(std::isfinite(v));
      CHECK(v > 0.0);
    }
  }
  CHECK_THROWS_AS(kernels::evaluate_reference(problem(f, Mode::ProposedBSC)), DomainError);
}

TEST_CASE("subspace shape mismatch is rejected") {
  Fixture f = make_fixture(1, 10.0);
  f.scene.subspaces[0].noise = f.scene.subspaces[0].noise.leftCols(3);
  CHECK_THROWS_AS(kernels::evaluate_parallel(problem(f, Mode::NFNoCal)), DimensionError);
  CHECK_THROWS_AS(kernels::evaluate_reference(problem(f, Mode::NFNoCal)), DimensionError);
}
