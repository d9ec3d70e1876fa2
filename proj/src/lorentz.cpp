#include "floq/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "floq/errors.hpp"
#include "floq/fit.hpp"
#include "floq/units.hpp"

namespace floq {
namespace {

// Parameter layout: [floor, c_0, ln hw_0, h_0, c_1, ln hw_1, h_1, ...].
double model_value(const Eigen::VectorXd& p, int n_peaks, double w) {
  double v = p[0];
  for (int k = 0; k < n_peaks; ++k) {
    const double c = p[1 + 3 * k];
    const double hw = std::exp(p[2 + 3 * k]);
    const double h = p[3 + 3 * k];
    const double x = (w - c) / hw;
    v += h / (1.0 + x * x);
  }
  return v;
}

}  // namespace

std::vector<LorentzianFit> fit_lorentzians(const SpectrumTrace& trace, int n_peaks,
                                           const std::vector<double>& init_centers,
                                           double noise_sigma) {
  validate_structure(trace);
  if (n_peaks < 1) throw config_error("fit_lorentzians: need at least one peak");
  if (static_cast<int>(init_centers.size()) != n_peaks)
    throw config_error("fit_lorentzians: init_centers size must equal n_peaks");
  const std::size_t n = trace.freq.size();
  if (n < static_cast<std::size_t>(3 * n_peaks + 2))
    throw config_error("fit_lorentzians: not enough samples for the parameter count");

  const double v_min = *std::min_element(trace.values.begin(), trace.values.end());
  const double v_max = *std::max_element(trace.values.begin(), trace.values.end());
  const double span = trace.freq.back() - trace.freq.front();
  if (v_max - v_min <= 1e-9 * std::max(1.0, std::abs(v_max)))
    throw fit_error("fit_lorentzians: trace is flat, no peak to fit");

  // Search neighbourhood per seed: a fraction of the span, and never past the
  // midpoint to the nearest other seed, so a large neighbour cannot capture a
  // small peak's seed.
  double min_spacing = 1e300;
  for (int a = 0; a < n_peaks; ++a)
    for (int b = a + 1; b < n_peaks; ++b)
      min_spacing =
          std::min(min_spacing, std::abs(init_centers[a] - init_centers[b]));
  double window = span / (4.0 * n_peaks);
  if (n_peaks > 1) window = std::min(window, min_spacing / 2.0);

  // Initial guesses: local maximum near each seeded center, width from the
  // half-height crossing.
  Eigen::VectorXd p0(1 + 3 * n_peaks);
  p0[0] = v_min;
  for (int k = 0; k < n_peaks; ++k) {
    const double c_seed = init_centers[k];
    std::size_t best = 0;
    double best_v = -1e300;
    std::size_t i_first = 0;
    std::size_t i_last = 0;
    bool found = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(trace.freq[i] - c_seed) > window) continue;
      if (!found) i_first = i;
      i_last = i;
      found = true;
      if (trace.values[i] > best_v) {
        best_v = trace.values[i];
        best = i;
      }
    }
    if (found && i_last > i_first + 1 && (best == i_first || best == i_last)) {
      // A maximum on the neighbourhood edge is a neighbour's tail, not a
      // peak; keep the seeded center and let the fit shape the rest.
      best = i_first;
      double d_best = 1e300;
      for (std::size_t i = i_first; i <= i_last; ++i) {
        const double d = std::abs(trace.freq[i] - c_seed);
        if (d < d_best) {
          d_best = d;
          best = i;
        }
      }
      best_v = trace.values[best];
    }
    if (!found) {
      // Seed outside the grid neighbourhood: fall back to the nearest point.
      best = 0;
      double d_best = 1e300;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = std::abs(trace.freq[i] - c_seed);
        if (d < d_best) {
          d_best = d;
          best = i;
        }
      }
      best_v = trace.values[best];
    }
    const double h0 = std::max(best_v - v_min, 1e-3 * (v_max - v_min));
    const double half = v_min + h0 / 2.0;
    double hw0 = span / 50.0;
    for (std::size_t i = best; i < n; ++i) {
      if (trace.values[i] <= half) {
        hw0 = trace.freq[i] - trace.freq[best];
        break;
      }
    }
    hw0 = std::max(hw0, span / static_cast<double>(n));
    p0[1 + 3 * k] = trace.freq[best];
    p0[2 + 3 * k] = std::log(hw0);
    p0[3 + 3 * k] = h0;
  }

  FitProblem problem;
  problem.initial = p0;
  problem.sigma_normalized = noise_sigma > 0.0;
  const double sigma = noise_sigma > 0.0 ? noise_sigma : 1.0;
  problem.residual = [&trace, n_peaks, sigma, n](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(n);
    for (std::size_t i = 0; i < n; ++i)
      r[i] = (model_value(p, n_peaks, trace.freq[i]) - trace.values[i]) / sigma;
    return r;
  };
  Eigen::VectorXd scale(1 + 3 * n_peaks);
  scale[0] = std::max(std::abs(v_min), 1e-3 * (v_max - v_min));
  for (int k = 0; k < n_peaks; ++k) {
    scale[1 + 3 * k] = span;
    scale[2 + 3 * k] = 1.0;
    scale[3 + 3 * k] = v_max - v_min;
  }
  problem.scale = scale;

  const FitResult fit = least_squares(problem, 1e-12, 400);
  if (!fit.converged) {
    std::ostringstream msg;
    msg << "fit_lorentzians: no convergence after " << fit.iterations
        << " accepted steps, residual norm " << fit.residual_norm;
    throw fit_error(msg.str());
  }

  std::vector<LorentzianFit> peaks(n_peaks);
  std::vector<int> order(n_peaks);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return fit.parameters[1 + 3 * a] < fit.parameters[1 + 3 * b];
  });

  for (int out = 0; out < n_peaks; ++out) {
    const int k = order[out];
    LorentzianFit& pk = peaks[out];
    pk.center = fit.parameters[1 + 3 * k];
    pk.hwhm = std::exp(fit.parameters[2 + 3 * k]);
    pk.height = fit.parameters[3 + 3 * k];
    pk.area = pi * pk.height * pk.hwhm;
    if (pk.height <= 0.0)
      throw fit_error("fit_lorentzians: fitted peak height is not positive");

    // Covariance of (center, ln hw, height) mapped to (center, hwhm, height,
    // area) with d hw = hw d(ln hw), d area = pi*(h*hw*d(ln hw) + hw*dh).
    Eigen::Matrix3d cov_raw;
    const int idx[3] = {1 + 3 * k, 2 + 3 * k, 3 + 3 * k};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) cov_raw(r, c) = fit.covariance(idx[r], idx[c]);
    Eigen::Matrix<double, 4, 3> jac = Eigen::Matrix<double, 4, 3>::Zero();
    jac(0, 0) = 1.0;
    jac(1, 1) = pk.hwhm;
    jac(2, 2) = 1.0;
    jac(3, 1) = pi * pk.height * pk.hwhm;
    jac(3, 2) = pi * pk.hwhm;
    pk.covariance = jac * cov_raw * jac.transpose();
  }

  for (int a = 0; a < n_peaks; ++a)
    for (int b = a + 1; b < n_peaks; ++b) {
      const double spacing = std::abs(peaks[a].center - peaks[b].center);
      if (spacing < 2.0 * (peaks[a].hwhm + peaks[b].hwhm)) {
        peaks[a].overlap_warning = true;
        peaks[b].overlap_warning = true;
      }
    }
  return peaks;
}

}  // namespace floq
