#include "floq/response.hpp"

#include <algorithm>
#include <cmath>

#include "floq/errors.hpp"
#include "floq/fit.hpp"

namespace floq {

void validate(const LowPassStack& s) {
  for (int i = 0; i < 3; ++i) {
    if (!std::isfinite(s.amplitude[i]) || !std::isfinite(s.corner[i]))
      throw config_error("low-pass stack entries must be finite");
    if (!(s.corner[i] > 0.0)) throw config_error("low-pass corners must be positive");
  }
  if (!(s.corner[0] < s.corner[1] && s.corner[1] < s.corner[2]))
    throw config_error("low-pass corners must be strictly increasing");
}

cplx response(const LowPassStack& s, double w) {
  cplx r = 0.0;
  for (int i = 0; i < 3; ++i) r += s.amplitude[i] / cplx(1.0, w / s.corner[i]);
  return r;
}

double step_response(const LowPassStack& s, double t) {
  if (t < 0.0) return 0.0;
  double y = 0.0;
  for (int i = 0; i < 3; ++i) y += s.amplitude[i] * (1.0 - std::exp(-s.corner[i] * t));
  return y;
}

ResponseFit fit_response(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 12)
    throw config_error("fit_response: needs at least 12 magnitude samples");
  double w_min = 1e300;
  double w_max = 0.0;
  for (const auto& [w, mag] : samples) {
    if (!(w > 0.0)) throw config_error("fit_response: frequencies must be positive");
    if (!(mag >= 0.0)) throw config_error("fit_response: magnitudes must be non-negative");
    w_min = std::min(w_min, w);
    w_max = std::max(w_max, w);
  }
  if (w_max < 1000.0 * w_min)
    throw config_error("fit_response: samples must span at least three decades");

  // Parameters: [a_0, a_1, a_2, ln c_0, ln c_1, ln c_2]. Corner seeds are
  // spread across the sampled band; amplitudes split the low-frequency
  // plateau.
  double dc = 0.0;
  for (const auto& [w, mag] : samples)
    if (w <= 2.0 * w_min) dc = std::max(dc, mag);
  if (dc <= 0.0) dc = 1.0;

  const double lg_lo = std::log(w_min) + 0.15 * std::log(w_max / w_min);
  const double lg_mid = 0.5 * (std::log(w_min) + std::log(w_max));
  const double lg_hi = std::log(w_max) - 0.15 * std::log(w_max / w_min);

  FitProblem problem;
  problem.initial = Eigen::VectorXd(6);
  problem.initial << 0.5 * dc, 0.3 * dc, 0.2 * dc, lg_lo, lg_mid, lg_hi;
  problem.residual = [&samples](const Eigen::VectorXd& p) {
    LowPassStack s;
    for (int i = 0; i < 3; ++i) {
      s.amplitude[i] = p[i];
      s.corner[i] = std::exp(p[3 + i]);
    }
    Eigen::VectorXd r(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
      r[i] = std::abs(response(s, samples[i].first)) - samples[i].second;
    return r;
  };
  Eigen::VectorXd scale(6);
  scale << dc, dc, dc, 1.0, 1.0, 1.0;
  problem.scale = scale;

  FitResult fit = least_squares(problem, 1e-12, 500);

  ResponseFit out;
  out.converged = fit.converged;
  out.residual_norm = fit.residual_norm;

  std::array<int, 3> order = {0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return fit.parameters[3 + a] < fit.parameters[3 + b];
  });
  for (int i = 0; i < 3; ++i) {
    out.stack.amplitude[i] = fit.parameters[order[i]];
    out.stack.corner[i] = std::exp(fit.parameters[3 + order[i]]);
  }

  // Covariance in (a, corner) order with corners mapped out of log space.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(6, 6);
  for (int i = 0; i < 3; ++i) {
    jac(i, order[i]) = 1.0;
    jac(3 + i, 3 + order[i]) = out.stack.corner[i];
  }
  out.covariance = jac * fit.covariance * jac.transpose();

  for (int i = 0; i < 2; ++i)
    if (out.stack.corner[i + 1] < 2.0 * out.stack.corner[i])
      out.degenerate_warning = true;
  return out;
}

}  // namespace floq
