#include "floq/thermometry.hpp"

#include <cmath>
#include <sstream>

#include "floq/errors.hpp"
#include "floq/units.hpp"

namespace floq {
namespace {

double ratio_corrected(double w_anti, double w_stokes, double c_anti, double c_stokes) {
  if (!(w_anti >= 0.0)) throw config_error("anti-Stokes weight must be non-negative");
  if (!(w_stokes > 0.0)) throw config_error("Stokes weight must be strictly positive");
  if (!(c_anti > 0.0) || !(c_stokes > 0.0))
    throw config_error("cooperativities must be strictly positive");
  return (w_anti * c_stokes) / (w_stokes * c_anti);
}

void require_physical(double r_prime) {
  if (r_prime >= 1.0) {
    std::ostringstream msg;
    msg << "sideband weight ratio r' = " << r_prime
        << " >= 1: no thermal occupancy reproduces it; the anti-Stokes weight is "
           "enhanced beyond the linear model, consistent with Kerr-type "
           "contamination of the sideband weights";
    throw asymmetry_error(msg.str());
  }
}

}  // namespace

double occupancy_from_asymmetry(double w_anti, double w_stokes, double c_anti,
                                double c_stokes) {
  const double r = ratio_corrected(w_anti, w_stokes, c_anti, c_stokes);
  require_physical(r);
  return r / (1.0 - r);
}

OccupancyEstimate occupancy_estimate(const WeightMeasurement& anti,
                                     const WeightMeasurement& stokes, double c_anti,
                                     double c_stokes, double extra_rel_sigma) {
  const double r = ratio_corrected(anti.value, stokes.value, c_anti, c_stokes);
  require_physical(r);
  OccupancyEstimate est;
  est.r_prime = r;
  est.n_bar = r / (1.0 - r);
  double rel2 = extra_rel_sigma * extra_rel_sigma;
  if (anti.value > 0.0) {
    const double ra = anti.sigma / anti.value;
    rel2 += ra * ra;
  }
  if (stokes.value > 0.0) {
    const double rs = stokes.sigma / stokes.value;
    rel2 += rs * rs;
  }
  est.r_prime_sigma = r * std::sqrt(rel2);
  const double denom = (1.0 - r) * (1.0 - r);
  est.sigma = est.r_prime_sigma / denom;
  return est;
}

double tuning_rel_error(const SystemParams& params, double sideband_offset,
                        double tuning_scale) {
  validate(params);
  auto filter = [&](double x) {
    const double u = 2.0 * x / params.kappa;
    return 1.0 / (1.0 + u * u);
  };
  const double f0 = filter(sideband_offset);
  const double up = std::abs(filter(sideband_offset + tuning_scale) / f0 - 1.0);
  const double dn = std::abs(filter(sideband_offset - tuning_scale) / f0 - 1.0);
  return std::max(up, dn);
}

double occupancy_from_weight(const LorentzianFit& fit, const SystemParams& params,
                             const Tone& tone, const DetectionParams& det) {
  validate(params);
  validate(tone);
  if (!det.eta_set)
    throw config_error(
        "occupancy_from_weight: eta is not calibrated; run the efficiency "
        "calibration first");
  validate(det);
  if (!(det.eta > 0.0)) throw config_error("occupancy_from_weight: eta must be positive");
  if (fit.area < 0.0) throw config_error("occupancy_from_weight: negative weight");
  const double c = cooperativity(params, tone.n_photons);
  if (!(c > 0.0)) throw config_error("occupancy_from_weight: tone has zero cooperativity");
  const double occ = fit.area / (two_pi * det.eta * params.gamma_m * c);
  return tone.role == ToneRole::BlueProbe ? occ - 1.0 : occ;
}

std::pair<double, double> calibrate_efficiency(const std::vector<AsymmetryPoint>& asym,
                                               const std::vector<WeightPoint>& weights) {
  if (asym.empty() || asym.size() != weights.size())
    throw config_error(
        "calibrate_efficiency: needs at least one paired asymmetry/weight point");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < asym.size(); ++i) {
    const AsymmetryPoint& a = asym[i];
    const WeightPoint& w = weights[i];
    if (!(a.n_bar > 0.0) || !(w.area > 0.0) || !(w.c_cool > 0.0) || !(w.gamma_m > 0.0))
      throw config_error("calibrate_efficiency: point values must be positive");
    const double eta_i = w.area / (two_pi * w.gamma_m * w.c_cool * a.n_bar);
    double rel2 = 0.0;
    if (a.sigma > 0.0) rel2 += (a.sigma / a.n_bar) * (a.sigma / a.n_bar);
    if (w.sigma > 0.0) rel2 += (w.sigma / w.area) * (w.sigma / w.area);
    if (rel2 <= 0.0)
      throw config_error("calibrate_efficiency: every point needs an uncertainty");
    const double var = eta_i * eta_i * rel2;
    num += eta_i / var;
    den += 1.0 / var;
  }
  return {num / den, std::sqrt(1.0 / den)};
}

double cooling_occupancy(const EnvironmentParams& env, double c0, double n_c) {
  validate(env);
  if (!(c0 > 0.0)) throw config_error("cooling_occupancy: c0 must be positive");
  if (n_c < 0.0) throw config_error("cooling_occupancy: n_c must be non-negative");
  return (env.n_th + env.alpha_heating * n_c) / (1.0 + c0 * n_c);
}

double snr_model(const DetectionParams& det, const EnvironmentParams& env, double c0,
                 double c) {
  validate(det);
  validate(env);
  if (!(c0 > 0.0)) throw config_error("snr_model: c0 must be positive");
  if (c < 0.0) throw config_error("snr_model: c must be non-negative");
  const double occ_scale = env.n_th + env.alpha_heating / c0 * c;
  return 4.0 * det.eta * occ_scale * c / ((1.0 + c) * (1.0 + c));
}

double quantum_backaction_limit(const SystemParams& params) {
  validate(params);
  const double x = params.kappa / params.omega_m;
  return x * x / 16.0;
}

void validate(const CoolingPoint& p) {
  if (!(p.n_c > 0.0)) throw config_error("cooling point: n_c must be positive");
  if (!(p.n_bar >= 0.0)) throw config_error("cooling point: n_bar must be non-negative");
  if (!(p.gamma_tot > 0.0)) throw config_error("cooling point: gamma_tot must be positive");
  if (!(p.snr >= 0.0)) throw config_error("cooling point: snr must be non-negative");
}

}  // namespace floq
