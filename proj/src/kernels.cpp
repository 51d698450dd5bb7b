#include "nfmusic/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "nfmusic/parallel.hpp"

namespace nfmusic::kernels {

namespace {

void check_problem(const SpectrumProblem& p) {
  const int n = p.cfg.n_antennas;
  for (const SubspacePair& s : p.subspaces) {
    if (s.noise.rows() != n || s.signal.rows() != n || s.noise.cols() + s.signal.cols() != n) {
      throw DimensionError("subspace pair does not match the array size");
    }
  }
}

// ---------------------------------------------------------------------------
// serial reference

std::vector<double> reference_nearfield(const SpectrumProblem& p,
                                        const std::vector<CMatrix>& w_noise) {
  const CMatrix& w = p.bank.full();
  const int n_sub = p.grid.size();
  std::vector<double> values;
  values.reserve(p.directions.size() * p.ranges.size());
  std::vector<CMatrix> corrected(static_cast<std::size_t>(n_sub));

  for (const double u : p.directions) {
    for (const double r : p.ranges) {
      const CVector nominal = nearfield_steering(u, r, p.cfg.carrier_hz, p.cfg).entries;
      double value = 0.0;
      switch (p.mode) {
        case Mode::ProposedBSC:
          for (int m = 0; m < n_sub; ++m) {
            corrected[static_cast<std::size_t>(m)] = corrected_noise_subspace(
                squint_transform(u, r, m, p.cfg, p.grid), w,
                p.subspaces[static_cast<std::size_t>(m)].noise);
          }
          value = music_spectrum_point(nominal, corrected, p.clamp);
          break;
        case Mode::NFNoCal:
          value = music_spectrum_point(nominal, w_noise, p.clamp);
          break;
        case Mode::NFCalOracle:
          for (int m = 0; m < n_sub; ++m) {
            const CVector genie =
                squinted_steering(u, r, p.grid.ratios[static_cast<std::size_t>(m)], p.cfg).entries;
            value += music_spectrum_point(genie, std::span(&w_noise[static_cast<std::size_t>(m)], 1),
                                          p.clamp);
          }
          break;
        default:
          throw ConfigError("not a near-field mode");
      }
      values.push_back(value);
    }
  }
  return values;
}

std::vector<double> reference_farfield(const SpectrumProblem& p,
                                       const std::vector<CMatrix>& w_noise) {
  const int n_sub = p.grid.size();
  std::vector<double> values;
  values.reserve(p.directions.size());
  for (const double u : p.directions) {
    double value = 0.0;
    if (p.mode == Mode::FFNoCal) {
      value = music_spectrum_point(farfield_steering(u, p.cfg.carrier_hz, p.cfg).entries, w_noise,
                                   p.clamp);
    } else {
      for (int m = 0; m < n_sub; ++m) {
        const double eta = p.grid.ratios[static_cast<std::size_t>(m)];
        const CVector genie = farfield_steering(eta * u, p.cfg.carrier_hz, p.cfg).entries;
        value += music_spectrum_point(genie, std::span(&w_noise[static_cast<std::size_t>(m)], 1),
                                      p.clamp);
      }
    }
    values.push_back(value);
  }
  return values;
}

// ---------------------------------------------------------------------------
// parallel kernel

// Per-subcarrier terms of ||W^H c||^2 - ||(W U^S)^H c||^2 in split re/im form.
struct SubcarrierTerms {
  double eta = 1.0;
  std::vector<double> h_re, h_im;  // block-wise Wbar_j^H, stored input-major
  std::vector<double> g_re, g_im;  // row k, col n: conj((W U^S)(n, k))
  int n_signal = 0;
};

SubcarrierTerms build_terms(const SpectrumProblem& p, int m) {
  const CombinerBank& bank = p.bank;
  const int nrf = bank.rf_chains();
  const int n = p.cfg.n_antennas;
  SubcarrierTerms t;
  t.eta = p.grid.ratios[static_cast<std::size_t>(m)];
  t.h_re.resize(static_cast<std::size_t>(bank.slots()) * nrf * nrf);
  t.h_im.resize(t.h_re.size());
  // block j, input b, output a (contiguous over a): conj(Wbar_j(b, a))
  std::size_t pos = 0;
  for (int j = 0; j < bank.slots(); ++j) {
    const CMatrix& blk = bank.block(j);
    for (int b = 0; b < nrf; ++b) {
      for (int a = 0; a < nrf; ++a, ++pos) {
        t.h_re[pos] = blk(b, a).real();
        t.h_im[pos] = -blk(b, a).imag();
      }
    }
  }
  const CMatrix g = bank.full() * p.subspaces[static_cast<std::size_t>(m)].signal;
  t.n_signal = static_cast<int>(g.cols());
  t.g_re.resize(static_cast<std::size_t>(t.n_signal) * n);
  t.g_im.resize(t.g_re.size());
  for (int k = 0; k < t.n_signal; ++k) {
    for (int i = 0; i < n; ++i) {
      t.g_re[static_cast<std::size_t>(k) * n + i] = g(i, k).real();
      t.g_im[static_cast<std::size_t>(k) * n + i] = -g(i, k).imag();
    }
  }
  return t;
}

// out_n = scale * exp(j gamma (alpha n + beta n^2)) for n in [0, n_ant).
// Multiplicative recurrence, re-anchored from sincos every kAnchor elements.
void quadratic_phasor(double alpha, double beta, double gamma, double scale, int n_ant,
                      double* re, double* im) {
  constexpr int kAnchor = 64;
  const double step_re = std::cos(2.0 * gamma * beta);
  const double step_im = std::sin(2.0 * gamma * beta);
  for (int start = 0; start < n_ant; start += kAnchor) {
    const int stop = std::min(n_ant, start + kAnchor);
    const double s = start;
    const double phase = gamma * (alpha * s + beta * s * s);
    double zr = scale * std::cos(phase);
    double zi = scale * std::sin(phase);
    const double inc = gamma * (alpha + beta * (2.0 * s + 1.0));
    double wr = std::cos(inc);
    double wi = std::sin(inc);
    for (int k = start; k < stop; ++k) {
      re[k] = zr;
      im[k] = zi;
      const double nzr = zr * wr - zi * wi;
      zi = zr * wi + zi * wr;
      zr = nzr;
      const double nwr = wr * step_re - wi * step_im;
      wi = wr * step_im + wi * step_re;
      wr = nwr;
    }
  }
}

double projected_energy(const SubcarrierTerms& t, int n_ant, int nrf, const double* c_re,
                        const double* c_im, double* s_re, double* s_im) {
  double combined = 0.0;
  const int n_slots = n_ant / nrf;
  const double* hr = t.h_re.data();
  const double* hi = t.h_im.data();
  for (int j = 0; j < n_slots; ++j) {
    const double* xr = c_re + static_cast<std::ptrdiff_t>(j) * nrf;
    const double* xi = c_im + static_cast<std::ptrdiff_t>(j) * nrf;
    std::fill(s_re, s_re + nrf, 0.0);
    std::fill(s_im, s_im + nrf, 0.0);
    for (int b = 0; b < nrf; ++b, hr += nrf, hi += nrf) {
      const double br = xr[b];
      const double bi = xi[b];
#pragma omp simd
      for (int a = 0; a < nrf; ++a) {
        s_re[a] += hr[a] * br - hi[a] * bi;
        s_im[a] += hr[a] * bi + hi[a] * br;
      }
    }
#pragma omp simd reduction(+ : combined)
    for (int a = 0; a < nrf; ++a) {
      combined += s_re[a] * s_re[a] + s_im[a] * s_im[a];
    }
  }
  double signal = 0.0;
  for (int k = 0; k < t.n_signal; ++k) {
    const double* gr = t.g_re.data() + static_cast<std::ptrdiff_t>(k) * n_ant;
    const double* gi = t.g_im.data() + static_cast<std::ptrdiff_t>(k) * n_ant;
    double sr = 0.0;
    double si = 0.0;
#pragma omp simd reduction(+ : sr, si)
    for (int i = 0; i < n_ant; ++i) {
      sr += gr[i] * c_re[i] - gi[i] * c_im[i];
      si += gr[i] * c_im[i] + gi[i] * c_re[i];
    }
    signal += sr * sr + si * si;
  }
  return combined - signal;
}

}  // namespace

std::vector<double> evaluate_reference(const SpectrumProblem& p) {
  check_problem(p);
  std::vector<CMatrix> w_noise;
  w_noise.reserve(p.subspaces.size());
  for (const SubspacePair& s : p.subspaces) {
    w_noise.push_back(p.bank.full() * s.noise);
  }
  return describe(p.mode).near_field ? reference_nearfield(p, w_noise)
                                     : reference_farfield(p, w_noise);
}

std::vector<double> evaluate_parallel(const SpectrumProblem& p) {
  check_problem(p);
  const int n_ant = p.cfg.n_antennas;
  const int nrf = p.bank.rf_chains();
  const int n_sub = p.grid.size();
  const bool near = describe(p.mode).near_field;
  const std::size_t n_dir = p.directions.size();
  const std::size_t n_rng = near ? p.ranges.size() : 1;

  std::vector<SubcarrierTerms> terms(static_cast<std::size_t>(n_sub));
  for (int m = 0; m < n_sub; ++m) {
    terms[static_cast<std::size_t>(m)] = build_terms(p, m);
  }

  const double k_c = kTwoPi * p.cfg.carrier_hz / kSpeedOfLight;
  const double d = p.cfg.element_spacing_m;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_ant));
  std::vector<double> values(n_dir * n_rng);

  parallel_for(static_cast<int>(n_dir), [&](int iu) {
    std::vector<double> a_re(static_cast<std::size_t>(n_ant)), a_im(a_re.size());
    std::vector<double> c_re(a_re.size()), c_im(a_re.size());
    std::vector<double> t_re(a_re.size()), t_im(a_re.size());
    std::vector<double> s_re(static_cast<std::size_t>(nrf)), s_im(s_re.size());
    const double u = p.directions[static_cast<std::size_t>(iu)];
    const double alpha = k_c * d * u;

    for (std::size_t ir = 0; ir < n_rng; ++ir) {
      const double zeta = near ? curvature(u, p.ranges[ir]) : 0.0;
      const double beta = -k_c * d * d * zeta;
      quadratic_phasor(alpha, beta, 1.0, scale, n_ant, a_re.data(), a_im.data());

      double total = 0.0;
      for (const SubcarrierTerms& t : terms) {
        const double* cr = a_re.data();
        const double* ci = a_im.data();
        switch (p.mode) {
          case Mode::ProposedBSC:
            // c = diag(tau) a, tau_n = exp(j (eta - 1) psi_n)
            quadratic_phasor(alpha, beta, t.eta - 1.0, 1.0, n_ant, t_re.data(), t_im.data());
            for (int i = 0; i < n_ant; ++i) {
              c_re[i] = t_re[i] * a_re[i] - t_im[i] * a_im[i];
              c_im[i] = t_re[i] * a_im[i] + t_im[i] * a_re[i];
            }
            cr = c_re.data();
            ci = c_im.data();
            break;
          case Mode::NFCalOracle:
          case Mode::FFCalOracle:
            quadratic_phasor(alpha, beta, t.eta, scale, n_ant, c_re.data(), c_im.data());
            cr = c_re.data();
            ci = c_im.data();
            break;
          case Mode::NFNoCal:
          case Mode::FFNoCal:
            break;
        }
        const double q = projected_energy(t, n_ant, nrf, cr, ci, s_re.data(), s_im.data());
        total += 1.0 / std::max(q, p.clamp);
      }
      values[static_cast<std::size_t>(iu) * n_rng + ir] = total;
    }
  });
  return values;
}

}  // namespace nfmusic::kernels
