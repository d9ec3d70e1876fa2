#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <random>
#include <vector>

#include "doctest.h"
#include "floq/errors.hpp"
#include "floq/floquet.hpp"
#include "floq/model.hpp"
#include "floq/spectra.hpp"
#include "floq/trace.hpp"
#include "floq/units.hpp"
#include "helpers.hpp"

using namespace floq;

namespace {

struct TwoToneSetup {
  SystemParams params;
  ToneSet tones;
  KerrModel kerr;
  EnvironmentParams env;
};

TwoToneSetup membrane_setup() {
  TwoToneSetup s;
  s.params = testutil::cavity_params();
  s.tones = testutil::two_tone_set(s.params, 50.0, 50.0, hz_to_rad(2e7), hz_to_rad(4e6));
  s.kerr.gamma_th = hz_to_rad(6e6);
  s.kerr.g_product = hz2_to_rad2(1e13);
  s.env.n_th = 17.5;
  return s;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(std::abs(b[i]), 1e-300));
  return worst;
}

}  // namespace

TEST_SUITE("floquet") {

TEST_CASE("window helpers index the carrier pair as documented") {
  const FloquetConfig min = minimal_window();
  CHECK(min.opt_lo == -1);
  CHECK(min.opt_hi == 0);
  CHECK(min.mech_lo == 0);
  CHECK(min.mech_hi == 0);
  CHECK(min.dim() == 3);

  const FloquetConfig wide = window_with_margin(3);
  CHECK(wide.opt_lo == -4);
  CHECK(wide.opt_hi == 3);
  CHECK(wide.mech_lo == -3);
  CHECK(wide.mech_hi == 3);
  CHECK(wide.dim() == 8 + 7);
  CHECK_THROWS_AS(window_with_margin(-1), config_error);

  const TwoToneSetup s = membrane_setup();
  const FloquetSystem sys = assemble(s.params, s.tones, s.kerr, min);
  CHECK(sys.opt_row(-1) == 0);
  CHECK(sys.opt_row(0) == 1);
  CHECK(sys.mech_row(0) == 2);
}

TEST_CASE("assemble rejects windows and tone sets it cannot represent") {
  const TwoToneSetup s = membrane_setup();

  FloquetConfig shifted;
  shifted.opt_lo = 1;
  shifted.opt_hi = 2;
  CHECK_THROWS_AS(assemble(s.params, s.tones, s.kerr, shifted), config_error);

  FloquetConfig inverted;
  inverted.opt_lo = 2;
  inverted.opt_hi = -2;
  CHECK_THROWS_AS(assemble(s.params, s.tones, s.kerr, inverted), config_error);

  ToneSet blue_only;
  blue_only.tones.push_back(make_tone(ToneRole::BlueProbe, s.params.omega_m, 5.0));
  CHECK_THROWS_AS(assemble(s.params, blue_only, s.kerr, minimal_window()), config_error);

  ToneSet red_only;
  red_only.tones.push_back(make_tone(ToneRole::RedProbe, -s.params.omega_m, 50.0));
  red_only.omega_mod = 0.0;
  CHECK_THROWS_AS(assemble(s.params, red_only, s.kerr, minimal_window()), config_error);

  FloquetConfig carrier_only;
  carrier_only.opt_lo = 0;
  carrier_only.opt_hi = 0;
  carrier_only.mech_lo = 0;
  carrier_only.mech_hi = 0;
  const FloquetSystem sys = assemble(s.params, red_only, s.kerr, carrier_only);
  CHECK(sys.dim() == 2);
  CHECK(sys.g_c == 0.0);
  const Eigen::MatrixXcd sol = solve_transfer(sys, 0.0);
  CHECK(sol.rows() == 2);
  CHECK(std::abs(sol(0, 1)) > 0.0);
}

TEST_CASE("a blue probe never enters the lattice") {
  const TwoToneSetup s = membrane_setup();
  const std::vector<double> grid =
      linspace(-hz_to_rad(8e6), hz_to_rad(2.4e7), 41);
  const SpectrumTrace bare =
      noise_spectrum(s.params, s.tones, s.kerr, s.env, minimal_window(), grid);

  ToneSet with_blue = s.tones;
  testutil::add_blue(with_blue, s.params, 20.0);
  const SpectrumTrace dressed =
      noise_spectrum(s.params, with_blue, s.kerr, s.env, minimal_window(), grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(dressed.values[i] == doctest::Approx(bare.values[i]).epsilon(1e-15));
}

TEST_CASE("minimal window reproduces the closed three-mode form") {
  const TwoToneSetup s = membrane_setup();
  DetectionParams det;
  det.eta = 0.1;
  const std::vector<double> grid =
      linspace(-hz_to_rad(1.2e7), hz_to_rad(2.6e7), 191);

  const SpectrumTrace sn =
      noise_spectrum(s.params, s.tones, s.kerr, s.env, minimal_window(), grid);
  const SpectrumTrace het = heterodyne_spectrum(sn, det);
  const SpectrumTrace closed =
      three_mode_spectrum(s.params, s.tones, s.kerr, s.env, det, grid);
  CHECK(max_rel_diff(het.values, closed.values) < 1e-9);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(het.freq[i] == closed.freq[i]);
}

TEST_CASE("diagonal assembly keeps the carrier line alone") {
  TwoToneSetup s = membrane_setup();
  s.kerr.g_product = 0.0;
  const FloquetSystem sys = assemble(s.params, s.tones, s.kerr, minimal_window());
  const double red_peak = -s.tones.delta_probe;
  const double cool_peak = s.tones.omega_mod - s.tones.delta_probe;

  const double full_red =
      noise_spectrum_value(sys, s.env.n_th, red_peak, SpectrumAssembly::Full);
  const double diag_red =
      noise_spectrum_value(sys, s.env.n_th, red_peak, SpectrumAssembly::DiagonalOnly);
  CHECK(diag_red <= full_red);
  CHECK(diag_red / full_red > 0.999);

  const double full_cool =
      noise_spectrum_value(sys, s.env.n_th, cool_peak, SpectrumAssembly::Full);
  const double diag_cool =
      noise_spectrum_value(sys, s.env.n_th, cool_peak, SpectrumAssembly::DiagonalOnly);
  CHECK(full_cool / diag_cool > 100.0);
}

TEST_CASE("harmonic weights agree with the closed-form line weights") {
  const TwoToneSetup s = membrane_setup();
  const FloquetSystem sys = assemble(s.params, s.tones, s.kerr, minimal_window());
  const auto [w_red, w_cool] = three_mode_weights(s.params, s.tones, s.kerr, s.env);
  CHECK(harmonic_weight(sys, s.env.n_th, 0) == doctest::Approx(w_red).epsilon(1e-9));
  CHECK(harmonic_weight(sys, s.env.n_th, -1) == doctest::Approx(w_cool).epsilon(1e-9));
  CHECK_THROWS_AS(harmonic_weight(sys, s.env.n_th, 1), config_error);
}

TEST_CASE("conjugating the modulation swaps the principal line weights") {
  // Overdamped cavity: the asymmetry between the two lines is then set by
  // the modulation phase alone.
  SystemParams p;
  p.kappa = 1.6e13;
  p.kappa_ex = 8e12;
  p.omega_m = hz_to_rad(5.3e9);
  p.gamma_m = hz_to_rad(1.5e5);
  p.g0 = 1.72e8;
  ToneSet ts = testutil::two_tone_set(p, 640.0, 640.0, hz_to_rad(1e7), 0.0);
  KerrModel kerr;
  kerr.gamma_th = hz_to_rad(6e6);
  kerr.g_product = 2.29e17;
  const double n_th = 10.0;

  // Restricted to the principal pair the swap is an algebraic identity up to
  // the adiabatic correction of order omega_mod/kappa.
  FloquetSystem sys = assemble(p, ts, kerr, minimal_window());
  REQUIRE(2.0 * std::abs(sys.dk) / p.kappa == doctest::Approx(0.25).epsilon(0.03));
  const double w0 = harmonic_weight(sys, n_th, 0);
  const double wm1 = harmonic_weight(sys, n_th, -1);
  const double asym = std::max(w0, wm1) / std::min(w0, wm1);
  CHECK(asym > 2.0);

  FloquetSystem swapped = sys;
  swapped.dk = std::conj(sys.dk);
  CHECK(harmonic_weight(swapped, n_th, 0) == doctest::Approx(wm1).epsilon(1e-5));
  CHECK(harmonic_weight(swapped, n_th, -1) == doctest::Approx(w0).epsilon(1e-5));

  // The extended lattice feeds the principal pair through higher scattering
  // rungs that conjugation does not mirror, leaving a quadratic-order
  // residual. At 2|dk|/kappa = 0.25 it measures 1.7e-2.
  FloquetSystem wide = assemble(p, ts, kerr, window_with_margin(2));
  FloquetSystem wide_swapped = wide;
  wide_swapped.dk = std::conj(wide.dk);
  const double v0 = harmonic_weight(wide, n_th, 0);
  const double vm1 = harmonic_weight(wide, n_th, -1);
  CHECK(harmonic_weight(wide_swapped, n_th, 0) == doctest::Approx(vm1).epsilon(0.03));
  CHECK(harmonic_weight(wide_swapped, n_th, -1) == doctest::Approx(v0).epsilon(0.03));
}

TEST_CASE("spectrum values scale linearly in the bath occupancy") {
  const TwoToneSetup s = membrane_setup();
  const FloquetSystem sys = assemble(s.params, s.tones, s.kerr, window_with_margin(1));
  const double w = hz_to_rad(3e6);
  const double v1 = noise_spectrum_value(sys, 4.0, w);
  const double v2 = noise_spectrum_value(sys, 8.0, w);
  CHECK(v2 == doctest::Approx(2.0 * v1).epsilon(1e-14));
}

TEST_CASE("grid partitioning does not change the computed values") {
  const TwoToneSetup s = membrane_setup();
  const std::vector<double> grid = linspace(-hz_to_rad(8e6), hz_to_rad(2.4e7), 37);
  setenv("FLOQUET_OM_THREADS", "1", 1);
  const SpectrumTrace serial =
      noise_spectrum(s.params, s.tones, s.kerr, s.env, window_with_margin(1), grid);
  setenv("FLOQUET_OM_THREADS", "3", 1);
  const SpectrumTrace threaded =
      noise_spectrum(s.params, s.tones, s.kerr, s.env, window_with_margin(1), grid);
  unsetenv("FLOQUET_OM_THREADS");
  REQUIRE(serial.values.size() == threaded.values.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(serial.values[i] == threaded.values[i]);
}

TEST_CASE("converged spectrum is reproducible on the window it reports") {
  const TwoToneSetup s = membrane_setup();
  const std::vector<double> grid = linspace(-hz_to_rad(6e6), hz_to_rad(2.4e7), 31);
  const auto [trace, window] =
      converged_spectrum(s.params, s.tones, s.kerr, s.env, grid, 1e-4);
  CHECK(window.opt_hi - window.opt_lo >= 1);
  const SpectrumTrace again =
      noise_spectrum(s.params, s.tones, s.kerr, s.env, window, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(trace.values[i] == again.values[i]);
  CHECK_THROWS_AS(
      converged_spectrum(s.params, s.tones, s.kerr, s.env, grid, 0.0), config_error);
}

TEST_CASE("the conjugate-coupling flip only matters when modulation is present") {
  SystemParams p = testutil::soft_cavity_params();
  ToneSet ts = testutil::two_tone_set(p, 250.0, 250.0, hz_to_rad(1e6), 0.0);
  KerrModel kerr;
  kerr.gamma_th = hz_to_rad(2e6);
  kerr.g_product = 3.6e11;
  EnvironmentParams env;
  env.n_th = 10.0;
  const std::vector<double> grid =
      linspace(-hz_to_rad(1e5), hz_to_rad(1.1e6), 61);

  const auto [straight, w1] =
      converged_spectrum(p, ts, kerr, env, grid, 1e-5, SpectrumAssembly::Full, false);
  const auto [flipped, w2] =
      converged_spectrum(p, ts, kerr, env, grid, 1e-5, SpectrumAssembly::Full, true);
  CHECK(max_rel_diff(flipped.values, straight.values) > 1e-3);

  KerrModel off = kerr;
  off.g_product = 0.0;
  const auto [base, w3] =
      converged_spectrum(p, ts, off, env, grid, 1e-5, SpectrumAssembly::Full, false);
  const auto [base_flip, w4] =
      converged_spectrum(p, ts, off, env, grid, 1e-5, SpectrumAssembly::Full, true);
  CHECK(max_rel_diff(base_flip.values, base.values) < 1e-14);
}

TEST_CASE("heterodyne readout shifts the axis and applies the efficiency") {
  SpectrumTrace sn;
  sn.freq = linspace(-1e6, 1e6, 21);
  sn.values.assign(21, 0.0);
  sn.values[10] = 3.0;
  sn.normalization = Normalization::NormalOrdered;
  DetectionParams det;
  det.eta = 0.25;
  det.delta_lo = 4.2e6;
  const SpectrumTrace out = heterodyne_spectrum(sn, det);
  CHECK(out.normalization == Normalization::ShotNoiseNormalized);
  for (std::size_t i = 0; i < sn.freq.size(); ++i) {
    CHECK(out.freq[i] == doctest::Approx(sn.freq[i] + det.delta_lo).epsilon(1e-15));
    CHECK(out.values[i] == doctest::Approx(1.0 + 0.25 * sn.values[i]).epsilon(1e-15));
  }
  CHECK_THROWS_AS(heterodyne_spectrum(out, det), config_error);
}

TEST_CASE("stochastic time-domain run matches the single-tone spectrum") {
  // One red tone at matched cooperativity; the lattice collapses to a
  // two-mode filter that a driven linear simulation can cross-check.
  SystemParams p;
  p.kappa = hz_to_rad(1e6);
  p.kappa_ex = p.kappa;
  p.omega_m = hz_to_rad(1e9);
  p.gamma_m = hz_to_rad(1e3);
  const double g = std::sqrt(p.kappa * p.gamma_m) / 2.0;
  const double n_c = 1e4;
  p.g0 = g / std::sqrt(n_c);

  ToneSet ts;
  ts.omega_mod = hz_to_rad(1e5);
  ts.tones.push_back(make_tone(ToneRole::RedProbe, -p.omega_m, n_c));
  KerrModel kerr;
  kerr.gamma_th = hz_to_rad(1e6);
  kerr.g_product = 0.0;
  const double n_th = 5.0;
  const FloquetSystem sys = assemble(p, ts, kerr, minimal_window());

  const double dt = 2e-8;
  const int n_step = 400000;
  const int n_seg = 120;
  const int n_settle = 40000;
  const double t_seg = dt * static_cast<double>(n_step);

  const std::vector<int> bin_index = {-16, -8, 0, 8, 16};
  std::vector<double> w_bins;
  for (int k : bin_index) w_bins.push_back(two_pi * static_cast<double>(k) / t_seg);

  // Exact one-step propagator of d/dt (a, b) = A (a, b) + noise.
  const cplx a00(-p.kappa / 2.0, 0.0), a11(-p.gamma_m / 2.0, 0.0);
  const cplx a01(0.0, g), a10(0.0, g);
  const cplx tr = a00 + a11;
  const cplx dsc = std::sqrt(tr * tr - 4.0 * (a00 * a11 - a01 * a10));
  const cplx l1 = (tr + dsc) / 2.0, l2 = (tr - dsc) / 2.0;
  const cplx e1 = std::exp(l1 * dt), e2 = std::exp(l2 * dt);
  auto propagate = [&](cplx m00, cplx m01, cplx m10, cplx m11) {
    // f(A) = (f(l1)(A - l2 I) - f(l2)(A - l1 I)) / (l1 - l2)
    const cplx c1 = (e1 - e2) / (l1 - l2);
    const cplx c0 = (e2 * l1 - e1 * l2) / (l1 - l2);
    return std::array<cplx, 4>{c0 + c1 * m00, c1 * m01, c1 * m10, c0 + c1 * m11};
  };
  const std::array<cplx, 4> E = propagate(a00, a01, a10, a11);

  // Zero-order-hold noise injection: B = A^{-1} (E - I) L, L = (0, sqrt(gm)).
  const cplx det_a = a00 * a11 - a01 * a10;
  const cplx rg = std::sqrt(cplx(p.gamma_m, 0.0));
  const cplx em0 = E[1] * rg;        // (E - I) L, first row
  const cplx em1 = (E[3] - 1.0) * rg;
  const cplx b0 = (a11 * em0 - a01 * em1) / det_a;
  const cplx b1 = (-a10 * em0 + a00 * em1) / det_a;

  std::mt19937_64 rng(987654321ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sigma = std::sqrt(n_th / (2.0 * dt));

  cplx a(0.0, 0.0), b(0.0, 0.0);
  for (int k = 0; k < n_settle; ++k) {
    const cplx xi(sigma * gauss(rng), sigma * gauss(rng));
    const cplx an = E[0] * a + E[1] * b + b0 * xi;
    const cplx bn = E[2] * a + E[3] * b + b1 * xi;
    a = an;
    b = bn;
  }

  std::vector<cplx> rot;
  for (double w : w_bins) rot.push_back(std::exp(cplx(0.0, -w * dt)));
  std::vector<double> psd(w_bins.size(), 0.0);
  const double root_kappa = std::sqrt(p.kappa);
  for (int seg = 0; seg < n_seg; ++seg) {
    std::array<cplx, 5> acc{};
    std::array<cplx, 5> phase;
    phase.fill(cplx(1.0, 0.0));
    for (int k = 0; k < n_step; ++k) {
      const cplx xi(sigma * gauss(rng), sigma * gauss(rng));
      const cplx an = E[0] * a + E[1] * b + b0 * xi;
      const cplx bn = E[2] * a + E[3] * b + b1 * xi;
      a = an;
      b = bn;
      const cplx o = root_kappa * a;
      for (std::size_t j = 0; j < acc.size(); ++j) {
        acc[j] += o * phase[j];
        phase[j] *= rot[j];
      }
    }
    for (std::size_t j = 0; j < acc.size(); ++j)
      psd[j] += std::norm(acc[j] * dt) / t_seg;
  }
  for (double& v : psd) v /= static_cast<double>(n_seg);

  double ratio_sum = 0.0;
  for (std::size_t j = 0; j < w_bins.size(); ++j) {
    const double expected = noise_spectrum_value(sys, n_th, w_bins[j]);
    const double ratio = psd[j] / expected;
    CHECK(ratio > 0.65);
    CHECK(ratio < 1.40);
    ratio_sum += ratio;
  }
  CHECK(std::abs(ratio_sum / 5.0 - 1.0) < 0.12);
}

}  // TEST_SUITE
