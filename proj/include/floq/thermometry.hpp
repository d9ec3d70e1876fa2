#ifndef FLOQ_THERMOMETRY_HPP
#define FLOQ_THERMOMETRY_HPP

#include <utility>
#include <vector>

#include "floq/lorentz.hpp"
#include "floq/model.hpp"

namespace floq {

// Occupancy from the cooperativity-corrected sideband weight ratio
// r' = (w_anti * c_stokes) / (w_stokes * c_anti), n = r'/(1 - r').
// r' >= 1 admits no occupancy and raises an asymmetry error.
double occupancy_from_asymmetry(double w_anti, double w_stokes, double c_anti,
                                double c_stokes);

struct WeightMeasurement {
  double value = 0.0;
  double sigma = 0.0;
};

struct OccupancyEstimate {
  double n_bar = 0.0;
  double sigma = 0.0;
  double r_prime = 0.0;
  double r_prime_sigma = 0.0;
};

// Occupancy with first-order error propagation. extra_rel_sigma is an
// additional relative uncertainty on the ratio (detuning systematics),
// combined in quadrature with the weight errors.
OccupancyEstimate occupancy_estimate(const WeightMeasurement& anti,
                                     const WeightMeasurement& stokes, double c_anti,
                                     double c_stokes, double extra_rel_sigma = 0.0);

// Relative systematic on one sideband weight from a cavity tuning offset:
// the cavity filter 1/(1 + (2x/kappa)^2) is evaluated at the sideband offset
// and at offset +- tuning_scale, and the worse relative deviation returned.
double tuning_rel_error(const SystemParams& params, double sideband_offset,
                        double tuning_scale);

// Occupancy from one fitted sideband weight: area = 2 pi eta gamma_m C occ
// with occ = n for red-side tones and n + 1 for the blue probe. Requires a
// calibrated eta.
double occupancy_from_weight(const LorentzianFit& fit, const SystemParams& params,
                             const Tone& tone, const DetectionParams& det);

// One absolutely calibrated occupancy (from sideband asymmetry) ...
struct AsymmetryPoint {
  double n_bar = 0.0;
  double sigma = 0.0;
};

// ... paired with a cooling-sideband weight of the same state.
struct WeightPoint {
  double area = 0.0;
  double sigma = 0.0;
  double c_cool = 0.0;
  double gamma_m = 0.0;
};

// Detection efficiency (value, standard error) by inverse-variance averaging
// of eta_i = area_i / (2 pi gamma_m c_cool n_i) over paired points.
std::pair<double, double> calibrate_efficiency(const std::vector<AsymmetryPoint>& asym,
                                               const std::vector<WeightPoint>& weights);

// Steady occupancy under cooling with photon-induced heating:
// (n_th + alpha*n_c) / (1 + c0*n_c).
double cooling_occupancy(const EnvironmentParams& env, double c0, double n_c);

// Peak signal-to-noise of the cooled sideband versus cooperativity:
// 4 eta (n_th + (alpha/c0) c) c / (1 + c)^2.
double snr_model(const DetectionParams& det, const EnvironmentParams& env, double c0,
                 double c);

// Occupancy floor of sideband thermometry in the unresolved regime,
// kappa^2/(16 omega_m^2).
double quantum_backaction_limit(const SystemParams& params);

// One point of a measured cooling curve.
struct CoolingPoint {
  double n_c = 0.0;
  double n_bar = 0.0;
  double gamma_tot = 0.0;
  double snr = 0.0;
};

void validate(const CoolingPoint& p);

}  // namespace floq

#endif
