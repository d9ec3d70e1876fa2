#include "floq/kerrfit.hpp"

#include <algorithm>
#include <cmath>

#include "floq/errors.hpp"
#include "floq/fit.hpp"
#include "floq/floquet.hpp"
#include "floq/spectra.hpp"

namespace floq {
namespace {

ToneSet equal_two_tone(const SystemParams& params, double n_c, double omega_mod) {
  ToneSet ts;
  ts.omega_mod = omega_mod;
  ts.tones.push_back(make_tone(ToneRole::RedProbe, -params.omega_m, n_c));
  ts.tones.push_back(make_tone(ToneRole::Cooling, -params.omega_m + omega_mod, n_c));
  return ts;
}

Eigen::Matrix2d to_natural(const Eigen::MatrixXd& cov_log, double gamma_th,
                           double g_product) {
  Eigen::Matrix2d jac = Eigen::Matrix2d::Zero();
  jac(0, 0) = gamma_th;
  jac(1, 1) = g_product;
  return jac * cov_log * jac.transpose();
}

}  // namespace

KerrFitResult fit_kerr_from_ratio(const std::vector<std::pair<double, double>>& data,
                                  const SystemParams& params, double n_c) {
  validate(params);
  if (data.size() < 5)
    throw config_error("fit_kerr_from_ratio: needs at least 5 ratio samples");
  if (!(n_c > 0.0)) throw config_error("fit_kerr_from_ratio: n_c must be positive");
  double om_min = 1e300;
  double om_max = 0.0;
  for (const auto& [om, ratio] : data) {
    if (!(om > 10.0 * params.gamma_m))
      throw config_error("fit_kerr_from_ratio: modulation frequency too small");
    if (!(ratio > 0.0)) throw config_error("fit_kerr_from_ratio: ratios must be positive");
    om_min = std::min(om_min, om);
    om_max = std::max(om_max, om);
  }

  EnvironmentParams env;
  env.n_th = 1.0;
  KerrModel off;
  off.gamma_th = 1.0;
  off.g_product = 0.0;

  // The zero-nonlinearity ratio only depends on the tone geometry; compute
  // it once per sample.
  std::vector<double> base(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const ToneSet ts = equal_two_tone(params, n_c, data[i].first);
    const auto [w_red, w_cool] = three_mode_weights(params, ts, off, env);
    base[i] = w_cool / w_red;
  }

  auto model = [&](double gamma_th, double g_product, std::size_t i) {
    KerrModel kerr;
    kerr.gamma_th = gamma_th;
    kerr.g_product = g_product;
    const ToneSet ts = equal_two_tone(params, n_c, data[i].first);
    const auto [w_red, w_cool] = three_mode_weights(params, ts, kerr, env);
    return (w_cool / w_red) / base[i];
  };

  // Scale guess for the coupling product: a ratio excess of r - 1 ~ 4 y at
  // y = 2|dk|/kappa maps to |dk| ~ kappa (r_max - 1)/8.
  double excess = 0.0;
  for (const auto& [om, ratio] : data) excess = std::max(excess, std::abs(ratio - 1.0));
  excess = std::max(excess, 1e-4);
  const double om_mid = std::sqrt(om_min * om_max);
  const double dk_guess = params.kappa * excess / 8.0;
  const double g_guess = dk_guess * std::hypot(om_mid, om_mid) / n_c;

  // Coarse log-grid search seeds the local fit.
  double best_cost = 1e300;
  double best_lg_gamma = std::log(om_mid);
  double best_lg_g = std::log(g_guess);
  for (int a = -3; a <= 3; ++a) {
    const double gamma_try = om_mid * std::pow(10.0, a / 2.0);
    for (int b = -3; b <= 3; ++b) {
      const double g_try = g_guess * std::pow(10.0, b);
      double cost = 0.0;
      for (std::size_t i = 0; i < data.size(); ++i) {
        const double d = model(gamma_try, g_try, i) - data[i].second;
        cost += d * d;
      }
      if (cost < best_cost) {
        best_cost = cost;
        best_lg_gamma = std::log(gamma_try);
        best_lg_g = std::log(g_try);
      }
    }
  }

  FitProblem problem;
  problem.initial = Eigen::VectorXd(2);
  problem.initial << best_lg_gamma, best_lg_g;
  problem.lower = Eigen::VectorXd(2);
  problem.upper = Eigen::VectorXd(2);
  problem.lower << std::log(om_min) - 9.0, best_lg_g - 21.0;
  problem.upper << std::log(om_max) + 9.0, best_lg_g + 21.0;
  problem.residual = [&](const Eigen::VectorXd& p) {
    const double gamma_th = std::exp(p[0]);
    const double g_product = std::exp(p[1]);
    Eigen::VectorXd r(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
      r[i] = model(gamma_th, g_product, i) - data[i].second;
    return r;
  };

  const FitResult fit = least_squares(problem, 1e-11, 250);
  KerrFitResult out;
  out.gamma_th = std::exp(fit.parameters[0]);
  out.g_product = std::exp(fit.parameters[1]);
  out.covariance = to_natural(fit.covariance, out.gamma_th, out.g_product);
  out.residual_norm = fit.residual_norm;
  out.converged = fit.converged;
  out.at_bounds = fit.at_bounds;
  // In log parameterization a strength collapsing toward zero stalls before
  // touching the finite search bound; an invisible predicted departure from
  // unit ratio marks the same floor.
  double departure = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i)
    departure =
        std::max(departure, std::abs(model(out.gamma_th, out.g_product, i) - 1.0));
  if (departure <= 1e-6) out.at_bounds = true;
  return out;
}

KerrFitResult fit_kerr_from_spectra(const std::vector<SpectrumTrace>& traces,
                                    const std::vector<ToneSet>& tone_sets,
                                    const SystemParams& params,
                                    const EnvironmentParams& env,
                                    const DetectionParams& det) {
  validate(params);
  validate(env);
  validate(det);
  if (traces.empty() || traces.size() != tone_sets.size())
    throw config_error("fit_kerr_from_spectra: traces and tone sets must pair up");
  std::size_t total = 0;
  double om_mid = 0.0;
  for (std::size_t t = 0; t < traces.size(); ++t) {
    validate_structure(traces[t]);
    validate(tone_sets[t], params);
    if (traces[t].normalization != Normalization::ShotNoiseNormalized)
      throw config_error("fit_kerr_from_spectra: traces must be shot-noise normalized");
    if (!(tone_sets[t].omega_mod > 0.0))
      throw config_error("fit_kerr_from_spectra: tone sets need omega_mod > 0");
    total += traces[t].freq.size();
    om_mid += std::log(tone_sets[t].omega_mod);
  }
  om_mid = std::exp(om_mid / static_cast<double>(traces.size()));

  std::vector<std::vector<double>> grids(traces.size());
  std::vector<double> scales(traces.size());
  for (std::size_t t = 0; t < traces.size(); ++t) {
    grids[t].resize(traces[t].freq.size());
    for (std::size_t i = 0; i < grids[t].size(); ++i)
      grids[t][i] = traces[t].freq[i] - det.delta_lo;
    double peak = 0.0;
    for (double v : traces[t].values) peak = std::max(peak, v - 1.0);
    scales[t] = std::max(peak, 1e-9);
  }

  auto residual_for = [&](double gamma_th, double g_product) {
    KerrModel kerr;
    kerr.gamma_th = gamma_th;
    kerr.g_product = g_product;
    Eigen::VectorXd r(total);
    std::size_t at = 0;
    for (std::size_t t = 0; t < traces.size(); ++t) {
      try {
        auto [sn, config] = converged_spectrum(params, tone_sets[t], kerr, env,
                                               grids[t], 1e-6);
        (void)config;
        const SpectrumTrace het = heterodyne_spectrum(sn, det);
        for (std::size_t i = 0; i < het.values.size(); ++i)
          r[at++] = (het.values[i] - traces[t].values[i]) / scales[t];
      } catch (const solver_error&) {
        // Trial parameters outside the stable window-convergent region get a
        // flat penalty so the search backs away instead of aborting.
        for (std::size_t i = 0; i < traces[t].values.size(); ++i) r[at++] = 1e6;
      }
    }
    return r;
  };

  // Amplitude scale: |dk| ~ kappa/8 as a generous upper basin edge.
  double amp = 0.0;
  for (const ToneSet& ts : tone_sets) {
    const Tone* red = ts.find(ToneRole::RedProbe);
    const Tone* cool = ts.find(ToneRole::Cooling);
    if (red != nullptr && cool != nullptr)
      amp = std::max(amp, red->amplitude * cool->amplitude);
  }
  if (!(amp > 0.0))
    throw config_error("fit_kerr_from_spectra: tone sets need both red-side tones");
  const double g_guess = params.kappa / 8.0 * om_mid / amp;

  double best_cost = 1e300;
  double best_lg_gamma = std::log(om_mid);
  double best_lg_g = std::log(g_guess);
  for (int a = -2; a <= 2; ++a) {
    const double gamma_try = om_mid * std::pow(10.0, a / 2.0);
    for (int b = -4; b <= 1; ++b) {
      const double g_try = g_guess * std::pow(10.0, b);
      const double cost = residual_for(gamma_try, g_try).squaredNorm();
      if (cost < best_cost) {
        best_cost = cost;
        best_lg_gamma = std::log(gamma_try);
        best_lg_g = std::log(g_try);
      }
    }
  }

  FitProblem problem;
  problem.initial = Eigen::VectorXd(2);
  problem.initial << best_lg_gamma, best_lg_g;
  problem.lower = Eigen::VectorXd(2);
  problem.upper = Eigen::VectorXd(2);
  problem.lower << best_lg_gamma - 12.0, best_lg_g - 21.0;
  problem.upper << best_lg_gamma + 12.0, best_lg_g + 21.0;
  problem.residual = [&](const Eigen::VectorXd& p) {
    return residual_for(std::exp(p[0]), std::exp(p[1]));
  };

  const FitResult fit = least_squares(problem, 1e-10, 120);
  KerrFitResult out;
  out.gamma_th = std::exp(fit.parameters[0]);
  out.g_product = std::exp(fit.parameters[1]);
  out.covariance = to_natural(fit.covariance, out.gamma_th, out.g_product);
  out.residual_norm = fit.residual_norm;
  out.converged = fit.converged;
  out.at_bounds = fit.at_bounds;
  return out;
}

CoolingFitResult fit_cooling_curve(const std::vector<std::pair<double, double>>& points,
                                   double c0) {
  if (points.size() < 4)
    throw config_error("fit_cooling_curve: needs at least 4 points");
  if (!(c0 > 0.0)) throw config_error("fit_cooling_curve: c0 must be positive");
  double n_min = 1e300;
  double n_max = 0.0;
  for (const auto& [n_c, n_bar] : points) {
    if (!(n_c > 0.0) || !(n_bar > 0.0))
      throw config_error("fit_cooling_curve: points must be positive");
    n_min = std::min(n_min, n_c);
    n_max = std::max(n_max, n_c);
  }
  if (n_max < 10.0 * n_min)
    throw config_error("fit_cooling_curve: points must span a decade in photon number");

  // Ignoring heating, each point suggests n_th = n_bar (1 + c0 n_c); the
  // spread seeds alpha.
  double n_th0 = 0.0;
  for (const auto& [n_c, n_bar] : points)
    n_th0 = std::max(n_th0, n_bar * (1.0 + c0 * n_c));
  double alpha0 = 0.0;
  for (const auto& [n_c, n_bar] : points)
    alpha0 = std::max(alpha0, (n_bar * (1.0 + c0 * n_c) - n_th0) / n_c);
  alpha0 = std::max(alpha0, 0.0);

  FitProblem problem;
  problem.initial = Eigen::VectorXd(2);
  problem.initial << std::log(n_th0), alpha0;
  problem.lower = Eigen::VectorXd(2);
  problem.upper = Eigen::VectorXd(2);
  problem.lower << std::log(n_th0) - 30.0, 0.0;
  problem.upper << std::log(n_th0) + 30.0, 1e300;
  problem.scale = Eigen::VectorXd(2);
  problem.scale << 1.0, std::max(alpha0, n_th0 * c0 * 1e-3);
  problem.residual = [&](const Eigen::VectorXd& p) {
    const double n_th = std::exp(p[0]);
    const double alpha = p[1];
    Eigen::VectorXd r(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto [n_c, n_bar] = points[i];
      r[i] = (n_th + alpha * n_c) / (1.0 + c0 * n_c) / n_bar - 1.0;
    }
    return r;
  };

  const FitResult fit = least_squares(problem, 1e-12, 300);
  CoolingFitResult out;
  out.n_th = std::exp(fit.parameters[0]);
  out.alpha = fit.parameters[1];
  Eigen::Matrix2d jac = Eigen::Matrix2d::Zero();
  jac(0, 0) = out.n_th;
  jac(1, 1) = 1.0;
  out.covariance = jac * fit.covariance * jac.transpose();
  out.residual_norm = fit.residual_norm;
  out.converged = fit.converged;
  out.at_bounds = fit.at_bounds;
  return out;
}

}  // namespace floq
