#ifndef FLOQ_MODEL_HPP
#define FLOQ_MODEL_HPP

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace floq {

using cplx = std::complex<double>;

// Fixed cavity and oscillator constants. All rates in rad/s.
struct SystemParams {
  double kappa = 0.0;      // total cavity linewidth
  double kappa_ex = 0.0;   // external coupling, <= kappa
  double omega_m = 0.0;    // mechanical frequency
  double gamma_m = 0.0;    // bare mechanical damping (gas included, backaction excluded)
  double g0 = 0.0;         // vacuum optomechanical coupling
  double omega_cav = 0.0;  // optical resonance; only the Kerr estimate needs it, 0 = unset

  bool resolved_sideband() const { return omega_m > kappa; }
  // True when gamma_m is large enough relative to kappa that the usual
  // timescale separation is questionable. Informational.
  bool damping_warning() const { return gamma_m > kappa / 100.0; }
};

enum class ToneRole { RedProbe, BlueProbe, Cooling };

struct Tone {
  ToneRole role = ToneRole::RedProbe;
  double detuning = 0.0;   // laser detuning from the cavity, rad/s
  double n_photons = 0.0;  // mean intracavity photon number
  double amplitude = 0.0;  // sqrt(n_photons), classical intracavity amplitude
};

inline Tone make_tone(ToneRole role, double detuning, double n_photons);

// The applied tone configuration. omega_mod is the spacing between the
// cooling tone and the red probe; delta_probe offsets the probe from the
// mechanical sideband; residual_detuning is the leftover cavity detuning
// kept in the optical susceptibility (default 0).
struct ToneSet {
  std::vector<Tone> tones;
  double omega_mod = 0.0;
  double delta_probe = 0.0;
  double residual_detuning = 0.0;

  const Tone* find(ToneRole role) const {
    for (const auto& t : tones)
      if (t.role == role) return &t;
    return nullptr;
  }
  bool has(ToneRole role) const { return find(role) != nullptr; }
};

// Thermal nonlinearity parameters. Only the product g_abs*g_pt is
// identifiable, so only the product is stored (rad^2/s^2).
struct KerrModel {
  double gamma_th = 0.0;   // thermalization rate, rad/s
  double g_product = 0.0;  // g_abs*g_pt, rad^2/s^2
  double g_kerr = 0.0;     // instantaneous Kerr shift per photon, rad/s (may be negative)
};

struct EnvironmentParams {
  double n_th = 0.0;           // bath occupancy at zero optical power
  double alpha_heating = 0.0;  // phonons per intracavity photon
  std::string pressure_label;  // metadata only
};

struct DetectionParams {
  double eta = 1.0;       // overall detection efficiency in [0, 1]
  double delta_lo = 0.0;  // local oscillator detuning, rad/s
  // False when no calibrated efficiency is available; ops needing an
  // absolute eta refuse to run then.
  bool eta_set = true;
};

// Throwing validators; config_error on violation. The CLI funnels these to
// exit code 2.
void validate(const SystemParams& p);
void validate(const Tone& t);
void validate(const ToneSet& ts, const SystemParams& p);
void validate(const KerrModel& k);
void validate(const EnvironmentParams& e);
void validate(const DetectionParams& d);

// --- scalar model quantities ---

// Thermal phase lag arctan(omega_mod/gamma_th), in [0, pi/2).
double phase_lag(double gamma_th, double omega_mod);

// Complex modulation amplitude of the thermal cavity shift:
// |delta_k| = g_product*a_c*a_r/sqrt(gamma_th^2+omega_mod^2),
// arg(delta_k) = -phase_lag(gamma_th, omega_mod).
cplx delta_k(const KerrModel& kerr, double a_c, double a_r, double omega_mod);

// Static thermal cavity shift per mean intracavity photon, g_product/gamma_th.
double static_thermal_shift(const KerrModel& kerr);

// Intrinsic Kerr coefficient from material data:
// -omega_cav*(n2/n0)*(hbar*omega_cav*c)/(v_mode*n0).
double kerr_coupling_estimate(double n0, double n2, double v_mode, double omega_cav);

// Cooperativity 4 g^2/(kappa gamma_m).
double cooperativity(double g, double kappa, double gamma_m);

// Light-enhanced coupling g0*sqrt(n_c).
double enhanced_coupling(double g0, double n_c);

// Cooperativity of a tone with n_c intracavity photons.
inline double cooperativity(const SystemParams& p, double n_c) {
  return cooperativity(enhanced_coupling(p.g0, n_c), p.kappa, p.gamma_m);
}

// Time-dependent part of the thermal shift, 2 Re[delta_k e^{i omega_mod t}].
double thermal_response_waveform(const KerrModel& kerr, double a_c, double a_r,
                                 double omega_mod, double t);

// --- susceptibilities ---

// Optical and mechanical susceptibilities of the linearized model, plus the
// effective mechanical susceptibility with backaction broadening.
struct Susceptibilities {
  double kappa = 0.0;
  double gamma_m = 0.0;
  double residual_detuning = 0.0;
  double gamma_tot = 0.0;  // gamma_m*(1 + cooling-side cooperativities)

  cplx chi_opt(double w) const {
    return 1.0 / cplx(kappa / 2.0, -(w + residual_detuning));
  }
  cplx chi_opt_inv(double w) const {
    return cplx(kappa / 2.0, -(w + residual_detuning));
  }
  cplx chi_m(double w) const { return 1.0 / cplx(gamma_m / 2.0, -w); }
  cplx chi_m_inv(double w) const { return cplx(gamma_m / 2.0, -w); }
  cplx chi_m_eff(double w) const { return 1.0 / cplx(gamma_tot / 2.0, -w); }
};

// Builds susceptibilities for a tone set. Red-side pumps (red probe and
// cooling tone) contribute their cooperativities to gamma_tot; the blue
// probe does not (its weak backaction is not part of the damping budget).
Susceptibilities susceptibilities(const SystemParams& p, const ToneSet& ts);

// Total mechanical linewidth gamma_m*(1 + C_red + C_cool).
double gamma_total(const SystemParams& p, const ToneSet& ts);

// Reduced occupancy gamma_m*n_th/gamma_tot.
double reduced_occupancy(const SystemParams& p, const ToneSet& ts,
                         const EnvironmentParams& env);

inline Tone make_tone(ToneRole role, double detuning, double n_photons) {
  Tone t;
  t.role = role;
  t.detuning = detuning;
  t.n_photons = n_photons;
  t.amplitude = n_photons > 0.0 ? std::sqrt(n_photons) : 0.0;
  return t;
}

}  // namespace floq

#endif
