#ifndef FLOQ_RESPONSE_HPP
#define FLOQ_RESPONSE_HPP

#include <Eigen/Dense>
#include <array>
#include <utility>
#include <vector>

#include "floq/model.hpp"

namespace floq {

// Thermal response modeled as three parallel first-order low passes:
// R(w) = sum_i a_i / (1 + i w/corner_i), corners strictly increasing.
struct LowPassStack {
  std::array<double, 3> amplitude{};
  std::array<double, 3> corner{};  // rad/s
};

void validate(const LowPassStack& s);

// Complex response at modulation frequency w.
cplx response(const LowPassStack& s, double w);

// Unit-step response sum_i a_i (1 - e^{-corner_i t}) for t >= 0.
double step_response(const LowPassStack& s, double t);

struct ResponseFit {
  LowPassStack stack;
  // Covariance over (a_0, a_1, a_2, corner_0, corner_1, corner_2).
  Eigen::MatrixXd covariance;
  double residual_norm = 0.0;
  bool converged = false;
  // Set when two fitted corners lie within a factor of 2 of each other.
  bool degenerate_warning = false;
};

// Fits |R(w)| samples (w, magnitude). Needs at least 12 samples spanning at
// least three decades in w. Corners come back sorted ascending.
ResponseFit fit_response(const std::vector<std::pair<double, double>>& samples);

}  // namespace floq

#endif
