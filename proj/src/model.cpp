#include "floq/model.hpp"

#include <algorithm>
#include <cmath>

#include "floq/errors.hpp"
#include "floq/units.hpp"

namespace floq {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw config_error(std::string(what) + " is not finite");
}

}  // namespace

void validate(const SystemParams& p) {
  require_finite(p.kappa, "kappa");
  require_finite(p.kappa_ex, "kappa_ex");
  require_finite(p.omega_m, "omega_m");
  require_finite(p.gamma_m, "gamma_m");
  require_finite(p.g0, "g0");
  if (p.kappa <= 0.0) throw config_error("kappa must be strictly positive");
  if (p.kappa_ex <= 0.0) throw config_error("kappa_ex must be strictly positive");
  if (p.kappa_ex > p.kappa) throw config_error("kappa_ex must not exceed kappa");
  if (p.omega_m <= 0.0) throw config_error("omega_m must be strictly positive");
  if (p.gamma_m <= 0.0) throw config_error("gamma_m must be strictly positive");
  if (p.g0 <= 0.0) throw config_error("g0 must be strictly positive");
  if (p.omega_cav < 0.0) throw config_error("omega_cav must be non-negative");
}

void validate(const Tone& t) {
  require_finite(t.detuning, "tone detuning");
  require_finite(t.n_photons, "tone n_photons");
  require_finite(t.amplitude, "tone amplitude");
  if (t.n_photons < 0.0) throw config_error("tone n_photons must be non-negative");
  if (t.amplitude < 0.0) throw config_error("tone amplitude must be non-negative");
  double n = t.amplitude * t.amplitude;
  double scale = std::max(1.0, t.n_photons);
  if (std::abs(n - t.n_photons) > 1e-12 * scale)
    throw config_error("tone amplitude^2 must equal n_photons");
}

void validate(const ToneSet& ts, const SystemParams& p) {
  int counts[3] = {0, 0, 0};
  for (const auto& t : ts.tones) {
    validate(t);
    counts[static_cast<int>(t.role)]++;
    if (t.role == ToneRole::BlueProbe) {
      if (std::abs(t.detuning - p.omega_m) >= p.kappa)
        throw config_error("blue probe detuning must lie within kappa of +omega_m");
    } else {
      if (std::abs(t.detuning + p.omega_m) >= p.kappa)
        throw config_error("red-side tone detuning must lie within kappa of -omega_m");
    }
  }
  if (counts[0] > 1 || counts[1] > 1 || counts[2] > 1)
    throw config_error("at most one tone per role");
  bool both_red_side = ts.has(ToneRole::RedProbe) && ts.has(ToneRole::Cooling);
  if (both_red_side) {
    if (ts.omega_mod <= 0.0)
      throw config_error("omega_mod must be positive with two red-side tones");
    if (ts.omega_mod <= 10.0 * p.gamma_m)
      throw config_error("omega_mod must exceed 10*gamma_m");
  }
  require_finite(ts.omega_mod, "omega_mod");
  require_finite(ts.delta_probe, "delta_probe");
  require_finite(ts.residual_detuning, "residual_detuning");
}

void validate(const KerrModel& k) {
  require_finite(k.gamma_th, "gamma_th");
  require_finite(k.g_product, "g_product");
  require_finite(k.g_kerr, "g_kerr");
  if (k.gamma_th <= 0.0) throw config_error("gamma_th must be strictly positive");
  if (k.g_product < 0.0) throw config_error("g_product must be non-negative");
}

void validate(const EnvironmentParams& e) {
  require_finite(e.n_th, "n_th");
  require_finite(e.alpha_heating, "alpha_heating");
  if (e.n_th < 0.0) throw config_error("n_th must be non-negative");
  if (e.alpha_heating < 0.0) throw config_error("alpha_heating must be non-negative");
}

void validate(const DetectionParams& d) {
  require_finite(d.eta, "eta");
  require_finite(d.delta_lo, "delta_lo");
  if (d.eta < 0.0 || d.eta > 1.0) throw config_error("eta must lie in [0, 1]");
}

double phase_lag(double gamma_th, double omega_mod) {
  if (!std::isfinite(gamma_th) || !std::isfinite(omega_mod))
    throw config_error("phase_lag inputs must be finite");
  if (gamma_th <= 0.0) throw config_error("gamma_th must be strictly positive");
  if (omega_mod < 0.0) throw config_error("omega_mod must be non-negative");
  return std::atan(omega_mod / gamma_th);
}

cplx delta_k(const KerrModel& kerr, double a_c, double a_r, double omega_mod) {
  if (a_c < 0.0 || a_r < 0.0) throw config_error("amplitudes must be non-negative");
  double mag = kerr.g_product * a_c * a_r /
               std::sqrt(kerr.gamma_th * kerr.gamma_th + omega_mod * omega_mod);
  double phi = phase_lag(kerr.gamma_th, omega_mod);
  return std::polar(mag, -phi);
}

double static_thermal_shift(const KerrModel& kerr) {
  if (kerr.gamma_th <= 0.0) throw config_error("gamma_th must be strictly positive");
  return kerr.g_product / kerr.gamma_th;
}

double kerr_coupling_estimate(double n0, double n2, double v_mode, double omega_cav) {
  if (n0 <= 0.0) throw config_error("n0 must be strictly positive");
  if (v_mode <= 0.0) throw config_error("v_mode must be strictly positive");
  return -omega_cav * (n2 / n0) * (hbar_js * omega_cav * speed_of_light_ms) /
         (v_mode * n0);
}

double cooperativity(double g, double kappa, double gamma_m) {
  if (kappa <= 0.0 || gamma_m <= 0.0)
    throw config_error("cooperativity needs positive kappa and gamma_m");
  return 4.0 * g * g / (kappa * gamma_m);
}

double enhanced_coupling(double g0, double n_c) {
  if (n_c < 0.0) throw config_error("n_c must be non-negative");
  return g0 * std::sqrt(n_c);
}

double thermal_response_waveform(const KerrModel& kerr, double a_c, double a_r,
                                 double omega_mod, double t) {
  cplx dk = delta_k(kerr, a_c, a_r, omega_mod);
  return 2.0 * std::real(dk * std::exp(cplx(0.0, omega_mod * t)));
}

double gamma_total(const SystemParams& p, const ToneSet& ts) {
  double c_sum = 0.0;
  for (const auto& t : ts.tones) {
    if (t.role == ToneRole::BlueProbe) continue;
    double g = enhanced_coupling(p.g0, t.n_photons);
    c_sum += cooperativity(g, p.kappa, p.gamma_m);
  }
  return p.gamma_m * (1.0 + c_sum);
}

Susceptibilities susceptibilities(const SystemParams& p, const ToneSet& ts) {
  Susceptibilities s;
  s.kappa = p.kappa;
  s.gamma_m = p.gamma_m;
  s.residual_detuning = ts.residual_detuning;
  s.gamma_tot = gamma_total(p, ts);
  return s;
}

double reduced_occupancy(const SystemParams& p, const ToneSet& ts,
                         const EnvironmentParams& env) {
  return p.gamma_m * env.n_th / gamma_total(p, ts);
}

}  // namespace floq
