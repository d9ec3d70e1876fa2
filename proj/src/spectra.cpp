#include "floq/spectra.hpp"

#include <algorithm>
#include <cmath>

#include "floq/errors.hpp"
#include "floq/units.hpp"

namespace floq {
namespace {

struct ThreeModeCore {
  double kappa = 0;
  double gamma_m = 0;
  double omega_mod = 0;
  double detuning = 0;
  double g_r = 0;
  double g_c = 0;
  cplx dk;

  cplx xo(double nu) const { return cplx(kappa / 2.0, -(nu + detuning)); }
  cplx xm(double nu) const { return cplx(gamma_m / 2.0, -nu); }

  cplx det(double nu) const {
    const cplx xo0 = xo(nu);
    const cplx xo1 = xo(nu + omega_mod);
    const cplx xmm = xm(nu);
    return xo0 * xmm * xo1 + g_c * g_c * xo0 + g_r * g_r * xo1 +
           std::norm(dk) * xmm - cplx(0.0, 2.0) * g_r * g_c * dk.real();
  }

  // Thermal-drive transfer into the optical carrier harmonic; sideband at
  // detection frequency nu.
  cplx red_transfer(double nu) const {
    return (cplx(0.0, g_r) * xo(nu + omega_mod) + g_c * dk) / det(nu);
  }

  // Thermal-drive transfer into the optical harmonic one modulation quantum
  // down; sideband at detection frequency nu + omega_mod.
  cplx cool_transfer(double nu) const {
    return (cplx(0.0, g_c) * xo(nu) + g_r * std::conj(dk)) / det(nu);
  }
};

ThreeModeCore make_core(const SystemParams& params, const ToneSet& tones,
                        const KerrModel& kerr) {
  validate(params);
  validate(tones, params);
  validate(kerr);
  const Tone* red = tones.find(ToneRole::RedProbe);
  const Tone* cool = tones.find(ToneRole::Cooling);
  if (red == nullptr || cool == nullptr)
    throw config_error("three-mode form needs both red-side tones");
  ThreeModeCore core;
  core.kappa = params.kappa;
  core.gamma_m = params.gamma_m;
  core.omega_mod = tones.omega_mod;
  core.detuning = tones.residual_detuning;
  core.g_r = enhanced_coupling(params.g0, red->n_photons);
  core.g_c = enhanced_coupling(params.g0, cool->n_photons);
  core.dk = delta_k(kerr, cool->amplitude, red->amplitude, tones.omega_mod);
  return core;
}

double lorentzian(double x, double center, double hw) {
  const double d = x - center;
  return 1.0 / (hw * hw + d * d);
}

}  // namespace

SpectrumTrace ideal_spectrum(const SystemParams& params, const ToneSet& tones,
                             const EnvironmentParams& env, const DetectionParams& det,
                             const std::vector<double>& grid, bool probe_in_gamma_tot) {
  validate(params);
  validate(tones, params);
  validate(env);
  validate(det);
  if (grid.size() < 2) throw config_error("ideal_spectrum: grid needs at least 2 points");

  const Tone* red = tones.find(ToneRole::RedProbe);
  const Tone* cool = tones.find(ToneRole::Cooling);
  const Tone* blue = tones.find(ToneRole::BlueProbe);

  const double c_red = red != nullptr ? cooperativity(params, red->n_photons) : 0.0;
  const double c_cool = cool != nullptr ? cooperativity(params, cool->n_photons) : 0.0;
  const double c_blue = blue != nullptr ? cooperativity(params, blue->n_photons) : 0.0;

  double gamma_tot = params.gamma_m * (1.0 + c_cool);
  if (probe_in_gamma_tot) gamma_tot += params.gamma_m * (c_red - c_blue);
  if (gamma_tot <= 0.0)
    throw solver_error("ideal_spectrum: nonpositive total mechanical linewidth");

  const double occ = params.gamma_m * env.n_th / gamma_tot;
  const double hw = gamma_tot / 2.0;
  const double delta = tones.delta_probe;

  struct Peak {
    double center;
    double weight;
  };
  std::vector<Peak> peaks;
  if (red != nullptr) peaks.push_back({-delta, c_red * occ});
  if (cool != nullptr) peaks.push_back({tones.omega_mod - delta, c_cool * occ});
  if (blue != nullptr) peaks.push_back({delta, c_blue * (occ + 1.0)});
  if (peaks.empty()) throw config_error("ideal_spectrum: no tones configured");

  SpectrumTrace out;
  out.freq = grid;
  out.values.resize(grid.size());
  out.normalization = Normalization::ShotNoiseNormalized;
  const double scale = det.eta * gamma_tot * params.gamma_m;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double s = 0.0;
    for (const Peak& p : peaks) s += p.weight * lorentzian(grid[i], p.center, hw);
    out.values[i] = 1.0 + scale * s;
  }
  for (std::size_t i = 0; i + 1 < peaks.size(); ++i)
    for (std::size_t j = i + 1; j < peaks.size(); ++j)
      if (std::abs(peaks[i].center - peaks[j].center) < 3.0 * gamma_tot)
        out.overlap_warning = true;
  validate(out);
  return out;
}

std::pair<double, double> modified_cooperativities(double c_red, double c_cool,
                                                   double g_r, double g_c,
                                                   cplx dk, double kappa) {
  if (!(c_red >= 0.0) || !(c_cool >= 0.0))
    throw config_error("modified_cooperativities: cooperativities must be nonnegative");
  if (!(g_r > 0.0) || !(g_c > 0.0) || !(kappa > 0.0))
    throw config_error("modified_cooperativities: couplings and kappa must be positive");
  const cplx unit(0.0, 2.0 / kappa);
  const double f_red = std::norm(1.0 - unit * (g_c / g_r) * dk);
  const double f_cool = std::norm(1.0 - unit * (g_r / g_c) * std::conj(dk));
  return {c_red * f_red, c_cool * f_cool};
}

double three_mode_sn(const SystemParams& params, const ToneSet& tones,
                     const KerrModel& kerr, const EnvironmentParams& env,
                     double w_public) {
  const ThreeModeCore core = make_core(params, tones, kerr);
  const double nu0 = w_public + tones.delta_probe;
  const double nu1 = nu0 - tones.omega_mod;
  const double scale = env.n_th * params.kappa * params.gamma_m;
  return scale * (std::norm(core.red_transfer(nu0)) + std::norm(core.cool_transfer(nu1)));
}

SpectrumTrace three_mode_spectrum(const SystemParams& params, const ToneSet& tones,
                                  const KerrModel& kerr, const EnvironmentParams& env,
                                  const DetectionParams& det,
                                  const std::vector<double>& grid) {
  validate(env);
  validate(det);
  if (grid.size() < 2)
    throw config_error("three_mode_spectrum: grid needs at least 2 points");
  const ThreeModeCore core = make_core(params, tones, kerr);
  const double scale = env.n_th * params.kappa * params.gamma_m;

  SpectrumTrace out;
  out.freq = grid;
  out.values.resize(grid.size());
  out.normalization = Normalization::ShotNoiseNormalized;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double nu0 = grid[i] + tones.delta_probe;
    const double nu1 = nu0 - core.omega_mod;
    const double s = scale * (std::norm(core.red_transfer(nu0)) +
                              std::norm(core.cool_transfer(nu1)));
    out.values[i] = 1.0 + det.eta * s;
  }
  validate(out);
  return out;
}

std::pair<double, double> three_mode_weights(const SystemParams& params,
                                             const ToneSet& tones, const KerrModel& kerr,
                                             const EnvironmentParams& env) {
  validate(env);
  const ThreeModeCore core = make_core(params, tones, kerr);
  const double scale = env.n_th * params.kappa * params.gamma_m;
  const double gamma_tot = gamma_total(params, tones);
  const double hw = gamma_tot / 2.0;
  const double w_red = integrate_peaked_line(
      [&](double nu) { return scale * std::norm(core.red_transfer(nu)); }, 0.0, hw);
  const double w_cool = integrate_peaked_line(
      [&](double nu) { return scale * std::norm(core.cool_transfer(nu)); }, 0.0, hw);
  return {w_red, w_cool};
}

SpectrumTrace single_tone_spectrum(const SystemParams& params, const Tone& tone,
                                   const EnvironmentParams& env, const DetectionParams& det,
                                   const std::vector<double>& grid, ToneSide side) {
  validate(params);
  validate(tone);
  validate(env);
  validate(det);
  if (grid.size() < 2)
    throw config_error("single_tone_spectrum: grid needs at least 2 points");
  if (side == ToneSide::Blue && tone.role != ToneRole::BlueProbe)
    throw config_error("single_tone_spectrum: blue side needs a blue-probe tone");
  if (side == ToneSide::Red && tone.role == ToneRole::BlueProbe)
    throw config_error("single_tone_spectrum: red side cannot use a blue-probe tone");

  const double c = cooperativity(params, tone.n_photons);
  const double occ = side == ToneSide::Red ? env.n_th : env.n_th + 1.0;
  const double gamma_eff =
      params.gamma_m * (side == ToneSide::Red ? 1.0 + c : 1.0 - c);
  if (gamma_eff <= 0.0)
    throw solver_error("single_tone_spectrum: blue-probe antidamping reaches instability");

  const double pref = det.eta * params.kappa * params.kappa * params.gamma_m *
                      params.gamma_m / 4.0 * c * occ;
  const double hw_opt = params.kappa / 2.0;
  const double hw_mech = gamma_eff / 2.0;

  SpectrumTrace out;
  out.freq = grid;
  out.values.resize(grid.size());
  out.normalization = Normalization::ShotNoiseNormalized;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double nu = grid[i];
    out.values[i] =
        1.0 + pref * lorentzian(nu, 0.0, hw_opt) * lorentzian(nu, 0.0, hw_mech);
  }
  validate(out);
  return out;
}

std::vector<double> normalized_peak_ratio(const SystemParams& params, const KerrModel& kerr,
                                          double n_c, const std::vector<double>& omega_mod_grid) {
  validate(params);
  validate(kerr);
  if (!(n_c > 0.0)) throw config_error("normalized_peak_ratio: n_c must be positive");
  if (omega_mod_grid.empty())
    throw config_error("normalized_peak_ratio: empty modulation grid");

  EnvironmentParams env;
  env.n_th = 1.0;
  KerrModel off = kerr;
  off.g_product = 0.0;

  std::vector<double> out(omega_mod_grid.size());
  for (std::size_t i = 0; i < omega_mod_grid.size(); ++i) {
    const double om = omega_mod_grid[i];
    if (!(om > 10.0 * params.gamma_m))
      throw config_error("normalized_peak_ratio: modulation frequency too small");
    ToneSet ts;
    ts.omega_mod = om;
    ts.tones.push_back(make_tone(ToneRole::RedProbe, -params.omega_m, n_c));
    ts.tones.push_back(make_tone(ToneRole::Cooling, -params.omega_m + om, n_c));
    const auto [w_red, w_cool] = three_mode_weights(params, ts, kerr, env);
    const auto [w_red0, w_cool0] = three_mode_weights(params, ts, off, env);
    out[i] = (w_cool / w_red) / (w_cool0 / w_red0);
  }
  return out;
}

double integrate_peaked_line(const std::function<double(double)>& f, double center,
                             double hw, int panels) {
  if (!(hw > 0.0)) throw config_error("integrate_peaked_line: half width must be positive");
  if (panels < 8) panels = 8;
  const int n = 2 * panels;
  const double theta_max = pi / 2.0 - 1e-9;
  const double h = 2.0 * theta_max / static_cast<double>(n);
  auto g = [&](double theta) {
    const double c = std::cos(theta);
    return f(center + hw * std::tan(theta)) * hw / (c * c);
  };
  double sum = g(-theta_max) + g(theta_max);
  for (int k = 1; k < n; ++k) {
    const double theta = -theta_max + h * static_cast<double>(k);
    sum += g(theta) * (k % 2 == 1 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

void compose_blue_sideband(SpectrumTrace& sn, const SystemParams& params,
                           const ToneSet& tones, const EnvironmentParams& env) {
  if (sn.normalization != Normalization::NormalOrdered)
    throw config_error("compose_blue_sideband: trace must be normal ordered");
  const Tone* blue = tones.find(ToneRole::BlueProbe);
  if (blue == nullptr) return;
  validate(env);
  const double c_blue = cooperativity(params, blue->n_photons);
  const double gamma_tot = gamma_total(params, tones);
  const double occ = reduced_occupancy(params, tones, env);
  const double hw = gamma_tot / 2.0;
  const double weight = gamma_tot * params.gamma_m * c_blue * (occ + 1.0);
  for (std::size_t i = 0; i < sn.freq.size(); ++i)
    sn.values[i] += weight * lorentzian(sn.freq[i], tones.delta_probe, hw);
}

}  // namespace floq
