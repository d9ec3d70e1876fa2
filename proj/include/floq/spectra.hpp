#ifndef FLOQ_SPECTRA_HPP
#define FLOQ_SPECTRA_HPP

#include <functional>
#include <utility>
#include <vector>

#include "floq/model.hpp"
#include "floq/trace.hpp"

namespace floq {

// Closed-form reference spectra and cooperativity corrections.
//
// Axis convention: all traces use the cavity-frame axis, where the red probe
// anti-Stokes sideband sits at -delta_probe, the cooling-tone anti-Stokes at
// omega_mod - delta_probe and the blue-probe Stokes at +delta_probe. Local
// oscillator shifts are applied by the heterodyne stage, not here.

// Three-Lorentzian heterodyne spectrum on the shot-noise floor: weights
// proportional to C_red*n, C_cool*n and C_blue*(n+1) with the reduced
// occupancy n = gamma_m*n_th/gamma_tot, all sharing HWHM gamma_tot/2.
// With probe_in_gamma_tot the probe cooperativities broaden (red, cooling)
// or narrow (blue) the shared linewidth; by default only the cooling tone
// sets gamma_tot.
SpectrumTrace ideal_spectrum(const SystemParams& params, const ToneSet& tones,
                             const EnvironmentParams& env, const DetectionParams& det,
                             const std::vector<double>& grid,
                             bool probe_in_gamma_tot = false);

// Kerr-modified cooperativities:
// c_red_tilde  = c_red  * |1 - 2i g_c dk  / (g_r kappa)|^2
// c_cool_tilde = c_cool * |1 - 2i g_r dk* / (g_c kappa)|^2
std::pair<double, double> modified_cooperativities(double c_red, double c_cool,
                                                   double g_r, double g_c,
                                                   cplx dk, double kappa);

// Exact closed-form spectrum of the minimal three-mode system (two red-side
// tones, one mechanical mode, thermal drive), shot-noise normalized.
SpectrumTrace three_mode_spectrum(const SystemParams& params, const ToneSet& tones,
                                  const KerrModel& kerr, const EnvironmentParams& env,
                                  const DetectionParams& det,
                                  const std::vector<double>& grid);

// Normal-ordered value of the three-mode spectrum at a cavity-frame
// frequency (no efficiency, no floor).
double three_mode_sn(const SystemParams& params, const ToneSet& tones,
                     const KerrModel& kerr, const EnvironmentParams& env,
                     double w_public);

// Full-line integrated weights (normal-ordered) of the two principal
// sidebands: first the red-probe sideband, then the cooling-tone sideband.
// Each weight integrates one term of the closed form over the whole line, so
// the neighbouring sideband's tail does not contaminate it.
std::pair<double, double> three_mode_weights(const SystemParams& params,
                                             const ToneSet& tones, const KerrModel& kerr,
                                             const EnvironmentParams& env);

enum class ToneSide { Red, Blue };

// Single-tone heterodyne spectrum, centered on its own sideband:
// 1 + eta*(kappa^2 gamma_m^2/4)*C*|chi_opt|^2*|chi_m_eff|^2*occ with
// occ = n_th for a red tone and n_th + 1 for a blue tone. Backaction gives
// the effective linewidth gamma_m*(1 + C) (red) or gamma_m*(1 - C) (blue).
SpectrumTrace single_tone_spectrum(const SystemParams& params, const Tone& tone,
                                   const EnvironmentParams& env, const DetectionParams& det,
                                   const std::vector<double>& grid, ToneSide side);

// Ratio of integrated sideband weights (cooling over red) for an equal-power
// two-tone drive, normalized by the same ratio at zero nonlinearity, for
// each modulation frequency in omega_mod_grid.
std::vector<double> normalized_peak_ratio(const SystemParams& params, const KerrModel& kerr,
                                          double n_c, const std::vector<double>& omega_mod_grid);

// Integral of f over the whole line. f must be peaked near center with
// half-width scale hw; the substitution w = center + hw*tan(theta) plus
// composite Simpson in theta captures peak and tails together.
double integrate_peaked_line(const std::function<double(double)>& f, double center,
                             double hw, int panels = 2000);

// Adds the analytic blue-probe Stokes Lorentzian to a normal-ordered
// red-side spectrum. gamma_tot and the reduced occupancy are taken with the
// red-side backaction included so the composition matches the solved part.
void compose_blue_sideband(SpectrumTrace& sn, const SystemParams& params,
                           const ToneSet& tones, const EnvironmentParams& env);

}  // namespace floq

#endif
