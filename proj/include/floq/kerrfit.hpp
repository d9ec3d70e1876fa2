#ifndef FLOQ_KERRFIT_HPP
#define FLOQ_KERRFIT_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "floq/model.hpp"
#include "floq/trace.hpp"

namespace floq {

struct KerrFitResult {
  double gamma_th = 0.0;   // rad/s
  double g_product = 0.0;  // rad^2/s^2
  // Covariance over (gamma_th, g_product) in natural units.
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
  double residual_norm = 0.0;
  bool converged = false;
  bool at_bounds = false;
};

// Fits (gamma_th, g_product) to normalized peak-weight ratios measured at
// several modulation frequencies. data holds (omega_mod, ratio) pairs, at
// least 5, for an equal-power two-tone drive with n_c photons per tone.
// Internally log-parameterized; a fit hitting the positivity floor comes
// back flagged with g_product at the floor.
KerrFitResult fit_kerr_from_ratio(const std::vector<std::pair<double, double>>& data,
                                  const SystemParams& params, double n_c);

// Joint fit of (gamma_th, g_product) to full spectra. Each trace pairs with
// the tone set it was recorded under; all share params, env and det.
KerrFitResult fit_kerr_from_spectra(const std::vector<SpectrumTrace>& traces,
                                    const std::vector<ToneSet>& tone_sets,
                                    const SystemParams& params,
                                    const EnvironmentParams& env,
                                    const DetectionParams& det);

struct CoolingFitResult {
  double n_th = 0.0;
  double alpha = 0.0;  // phonons per photon
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
  double residual_norm = 0.0;
  bool converged = false;
  bool at_bounds = false;
};

// Fits (n_th, alpha) to a cooling curve of (n_c, n_bar) points, at least 4
// spanning a decade in n_c, for a single-photon cooperativity c0. alpha is
// bounded below by zero so heating-free data comes back at the bound.
CoolingFitResult fit_cooling_curve(const std::vector<std::pair<double, double>>& points,
                                   double c0);

}  // namespace floq

#endif
