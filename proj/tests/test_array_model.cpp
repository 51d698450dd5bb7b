#include <doctest.h>

#include <cmath>
#include <random>

#include "nfmusic/array_model.hpp"
#include "nfmusic/estimator.hpp"
#include "support.hpp"

using namespace nfmusic;

namespace {

const ArrayConfig kArray128 = ArrayConfig::half_wavelength(128, 300e9);
const ArrayConfig kArray256 = ArrayConfig::half_wavelength(256, 300e9);

double max_abs_diff(const CVector& a, const CVector& b) { return (a - b).cwiseAbs().maxCoeff(); }

CVector drop_phase(const CVector& a) { return a * std::conj(a(0)) / std::abs(a(0)); }

}  // namespace

TEST_CASE("array config") {
  CHECK(kArray128.wavelength() == doctest::Approx(1e-3));
  CHECK(kArray128.element_spacing_m == doctest::Approx(5e-4));
  CHECK(kArray128.aperture() == 127 * kArray128.element_spacing_m);
  CHECK_THROWS_AS((ArrayConfig{1, 300e9, 5e-4}).validate(), ConfigError);
  CHECK_THROWS_AS((ArrayConfig{8, 300e9, 0.0}).validate(), ConfigError);
  CHECK_THROWS_AS((ArrayConfig{8, -1.0, 5e-4}).validate(), ConfigError);
}

TEST_CASE("subcarrier plan") {
  CHECK(subcarrier_frequency(1, 32, 30e9, 300e9) == doctest::Approx(285e9));
  CHECK(subcarrier_frequency(32, 32, 30e9, 300e9) == doctest::Approx(315e9));
  CHECK(subcarrier_frequency(16, 31, 30e9, 300e9) == 300e9);
  CHECK(subcarrier_frequency(1, 1, 30e9, 300e9) == 300e9);
  CHECK_THROWS_AS(subcarrier_frequency(0, 8, 30e9, 300e9), std::out_of_range);
  CHECK_THROWS_AS(subcarrier_frequency(9, 8, 30e9, 300e9), std::out_of_range);

  const WidebandGrid g = WidebandGrid::make(8, 30e9, 300e9);
  REQUIRE(g.size() == 8);
  CHECK(g.frequencies.front() == doctest::Approx(285e9));
  CHECK(g.frequencies.back() == doctest::Approx(315e9));
  for (int m = 1; m < g.size(); ++m) {
    CHECK(g.frequencies[m] > g.frequencies[m - 1]);
  }
  for (std::size_t m = 0; m < g.ratios.size(); ++m) {
    CHECK(g.ratios[m] > 0.0);
    CHECK(g.ratios[m] != 1.0);  // even M: no subcarrier on the carrier
  }
  const WidebandGrid odd = WidebandGrid::make(5, 30e9, 300e9);
  CHECK(odd.ratios[2] == 1.0);
  const WidebandGrid flat = WidebandGrid::make(4, 0.0, 300e9);
  for (const double eta : flat.ratios) {
    CHECK(eta == 1.0);
  }
}

TEST_CASE("fraunhofer distance against the oracle") {
  const auto g = testing::golden();
  CHECK(fraunhofer_distance(kArray256) == doctest::Approx(g["fraunhofer"]["256"].get<double>()).epsilon(1e-12));
  CHECK(fraunhofer_distance(kArray128) == doctest::Approx(8.0645).epsilon(1e-12));
  CHECK(fraunhofer_distance(ArrayConfig::half_wavelength(2, 300e9)) == doctest::Approx(0.0005));
  CHECK(std::abs(fraunhofer_distance(kArray256) - 32.51) <= 0.01);
}

TEST_CASE("element ranges") {
  const ArrayConfig cfg = kArray128;
  CHECK(element_range_exact(0.3, 7.0, 1, cfg) == 7.0);
  CHECK(element_range_fresnel(0.3, 7.0, 1, cfg) == 7.0);
  CHECK(element_range_exact(0.0, 10.0, 2, cfg, RadicandForm::AsPrinted) ==
        doctest::Approx(10.000000025).epsilon(1e-12));
  CHECK(element_range_exact(1.0, 1.0, 3, cfg, RadicandForm::AsPrinted) ==
        doctest::Approx(std::sqrt(0.998002)).epsilon(1e-14));
  CHECK(std::abs(element_range_exact(1.0, 1.0, 3, cfg, RadicandForm::AsPrinted) - 0.999001) < 1e-6);
  // law of cosines: |r e_u - x e_0| exactly
  const double x = 2 * cfg.element_spacing_m;
  CHECK(element_range_exact(1.0, 1.0, 3, cfg) == doctest::Approx(1.0 - x).epsilon(1e-14));
  // endfire: zeta = 0
  CHECK(element_range_fresnel(1.0, 3.0, 50, cfg) ==
        doctest::Approx(3.0 - 49 * cfg.element_spacing_m).epsilon(1e-15));
  // oracle value 1.8228e-6
  const double diff = std::abs(element_range_fresnel(0.7071, 5.0, 128, cfg) -
                               element_range_exact(0.7071, 5.0, 128, cfg));
  CHECK(diff < 2e-6);
  CHECK(diff == doctest::Approx(1.8228e-6).epsilon(1e-3));
  CHECK_THROWS_AS(element_range_fresnel(0.2, 0.0, 3, cfg), DomainError);
  CHECK_THROWS_AS(element_range_exact(0.2, 1.0, 0, cfg), std::out_of_range);
  CHECK_THROWS_AS(element_range_exact(0.2, 1.0, 129, cfg), std::out_of_range);
}

TEST_CASE("fresnel accuracy on the default geometry") {
  const ArrayConfig cfg = kArray128;
  const double d_f = fraunhofer_distance(cfg);
  double worst = 0.0;
  for (int ir = 0; ir <= 40; ++ir) {
    const double r = d_f * (0.12 + 0.88 * ir / 40.0);
    for (int iu = 0; iu <= 40; ++iu) {
      const double u = -1.0 + iu / 20.0;
      for (int n = 1; n <= cfg.n_antennas; ++n) {
        worst = std::max(worst, std::abs(element_range_fresnel(u, r, n, cfg) -
                                         element_range_exact(u, r, n, cfg)));
      }
    }
  }
  CHECK(worst < cfg.wavelength() / 16.0);
}

TEST_CASE("near-field steering against the oracle") {
  const auto g = testing::golden();
  for (const auto& c : g["steering"]) {
    const int n = c["n"].get<int>();
    const ArrayConfig cfg{n, 300e9, 5e-4};
    const CVector a = nearfield_steering(c["u"], c["r"], c["f_hz"], cfg).entries;
    REQUIRE(a.size() == n);
    // global phases reach k r ~ 6e4 rad, so the last bits differ by ~1e-12
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(a(i) - Complex(c["entries"][i][0], c["entries"][i][1])) < 1e-10);
    }
  }
}

TEST_CASE("steering norms and moduli") {
  std::mt19937_64 eng(11);
  std::uniform_real_distribution<double> dir(-1.0, 1.0);
  std::uniform_real_distribution<double> rng(0.05, 10.0);
  std::uniform_real_distribution<double> freq(250e9, 350e9);
  const double inv = 1.0 / std::sqrt(128.0);
  for (int i = 0; i < 200; ++i) {
    const double u = dir(eng);
    const CVector a = nearfield_steering(u, rng(eng), freq(eng), kArray128).entries;
    CHECK(std::abs(a.norm() - 1.0) < 1e-13);
    CHECK((a.cwiseAbs().array() - inv).abs().maxCoeff() < 1e-15);
    const CVector f = farfield_steering(u, freq(eng), kArray128).entries;
    CHECK(std::abs(f.norm() - 1.0) < 1e-13);
  }
}

TEST_CASE("steering conventions") {
  const double f = 300e9;
  const double k = kTwoPi * f / kSpeedOfLight;
  const CVector a = nearfield_steering(0.4, 3.0, f, kArray128).entries;
  CHECK(std::abs(a(0) - std::polar(1.0 / std::sqrt(128.0), -k * 3.0)) < 1e-12);
  CHECK_THROWS_AS(nearfield_steering(0.4, 0.0, f, kArray128), DomainError);
  CHECK_THROWS_AS(nearfield_steering(0.4, -1.0, f, kArray128), DomainError);

  const CVector b = farfield_steering(0.0, f, kArray128).entries;
  CHECK((b.array() - Complex(1.0 / std::sqrt(128.0), 0.0)).abs().maxCoeff() < 1e-15);
  const CVector c = farfield_steering(0.5, f, kArray128).entries;
  for (int n = 1; n < 128; ++n) {
    CHECK(std::abs(std::arg(c(n) / c(n - 1)) - kPi / 2.0) < 1e-9);
  }
}

TEST_CASE("far-field limit") {
  const double d_f = fraunhofer_distance(kArray128);
  const double f = 300e9;
  const CVector ff = farfield_steering(0.6, f, kArray128).entries;
  CHECK(max_abs_diff(drop_phase(nearfield_steering(0.6, 1e6 * d_f, f, kArray128).entries), ff) < 1e-6);
  double prev = 1e9;
  for (double scale = 1.0; scale <= 1e6; scale *= 10.0) {
    const double diff = max_abs_diff(drop_phase(nearfield_steering(0.6, scale * d_f, f, kArray128).entries), ff);
    CHECK(diff < prev);
    prev = diff;
  }
}

TEST_CASE("squint map") {
  const auto g = testing::golden();
  for (const auto& c : g["squint"]) {
    const SquintedLocation loc = squint_map(c["u"], c["r"], c["eta"]);
    CHECK(loc.direction == doctest::Approx(c["direction"].get<double>()).epsilon(1e-14));
    CHECK(loc.range == doctest::Approx(c["range"].get<double>()).epsilon(1e-12));
    CHECK(loc.direction_shift == doctest::Approx(loc.direction - c["u"].get<double>()));
    CHECK(loc.range_shift == doctest::Approx(loc.range - c["r"].get<double>()));
  }
  const SquintedLocation edge = squint_map(0.7071, 10.0, 300.0 / 315.0);
  CHECK(edge.direction == doctest::Approx(0.67343).epsilon(1e-5));
  CHECK(edge.range == doctest::Approx(11.476).epsilon(1e-4));

  const SquintedLocation id = squint_map(0.3, 4.0, 1.0);
  CHECK(id.direction == 0.3);
  CHECK(id.range == 4.0);
  CHECK(id.direction_shift == 0.0);
  CHECK(id.range_shift == 0.0);

  const SquintedLocation broad = squint_map(0.0, 4.0, 1.05);
  CHECK(broad.direction == 0.0);
  CHECK(broad.range == doctest::Approx(4.0 / 1.05));

  CHECK(squint_map(0.99, 4.0, 1.05).outside_visible);
  CHECK_FALSE(squint_map(0.9, 4.0, 1.05).outside_visible);
  CHECK_THROWS_AS(squint_map(1.0, 4.0, 1.05), DomainError);
  CHECK_THROWS_AS(squint_map(-1.0, 4.0, 1.05), DomainError);
  CHECK_THROWS_AS(squint_map(0.2, 0.0, 1.05), DomainError);
  CHECK_THROWS_AS(squint_map(0.2, 1.0, 0.0), DomainError);
}

TEST_CASE("squinted steering against the oracle") {
  const auto g = testing::golden();
  const auto& c = g["squinted_steering_128"];
  const double eta = 300e9 / c["f_hz"].get<double>();
  const CVector a = squinted_steering(c["u"], c["r"], eta, kArray128).entries;
  for (int i = 0; i < 128; ++i) {
    CHECK(std::abs(a(i) - Complex(c["entries"][i][0], c["entries"][i][1])) < 1e-10);
  }
}

TEST_CASE("transform identity on random hypotheses") {
  const WidebandGrid band = WidebandGrid::make(8, 30e9, 300e9);
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> dir(-0.95, 0.95);
  std::uniform_real_distribution<double> rng(0.5, 8.0);
  for (int i = 0; i < 100; ++i) {
    const double u = dir(eng);
    const double r = rng(eng);
    for (int m = 0; m < band.size(); ++m) {
      const TransformDiag t = squint_transform(u, r, m, kArray128, band);
      const CVector sq = squinted_steering(u, r, band.ratios[m], kArray128).entries;
      const CVector a = nearfield_steering(u, r, 300e9, kArray128).entries;
      CHECK(max_abs_diff(t.tau.cwiseProduct(a), sq) < 1e-12);
      CHECK((t.tau.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
      const SquintedLocation loc = squint_map(u, r, band.ratios[m]);
      if (loc.range > 0.0) {
        CHECK(max_abs_diff(sq, nearfield_steering(loc.direction, loc.range, 300e9, kArray128).entries) < 1e-9);
      }
    }
  }
}

TEST_CASE("array gain") {
  const CVector a = nearfield_steering(0.2, 3.0, 300e9, kArray128).entries;
  CHECK(array_gain(a, a) == doctest::Approx(1.0));
  CVector e1 = CVector::Zero(128);
  CVector e2 = CVector::Zero(128);
  e1(0) = 1.0;
  e2(1) = 1.0;
  CHECK(array_gain(e1, e2) == 0.0);
  CHECK_THROWS_AS(array_gain(a, e1.head(5)), DimensionError);

  // the probe at 315 GHz peaks at eta * u
  const double u0 = std::sin(kPi / 4);
  const double eta = 300.0 / 315.0;
  const SquintedLocation loc = squint_map(u0, 10.0, eta);
  const CVector ref = nearfield_steering(u0, 10.0, 300e9, kArray256).entries;
  double best = -1.0;
  double best_u = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double u = -1.0 + i * 0.002;
    const double gain = array_gain(ref, nearfield_steering(u, loc.range, 315e9, kArray256).entries);
    if (gain > best) {
      best = gain;
      best_u = u;
    }
  }
  CHECK(std::abs(best_u - eta * u0) <= 0.002);
}
