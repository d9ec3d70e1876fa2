#ifndef FLOQ_FIT_HPP
#define FLOQ_FIT_HPP

#include <Eigen/Dense>
#include <functional>

namespace floq {

// Dense nonlinear least-squares with Levenberg-Marquardt damping and a
// finite-difference Jacobian.
struct FitProblem {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> residual;
  Eigen::VectorXd initial;
  // Optional box bounds, same size as initial when present. Steps are
  // clamped; parameters that finish on a bound are flagged.
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  // Characteristic parameter magnitudes for finite-difference steps. Empty
  // means max(|initial|, 1) per component.
  Eigen::VectorXd scale;
  // True when residuals are already divided by their standard errors; the
  // covariance is then (J^T J)^-1 without the variance-of-fit factor.
  bool sigma_normalized = false;
};

struct FitResult {
  Eigen::VectorXd parameters;
  Eigen::MatrixXd covariance;
  double residual_norm = 0.0;
  int iterations = 0;  // accepted steps
  bool converged = false;
  bool at_bounds = false;
};

// Minimizes ||residual(p)||^2 from problem.initial. Convergence: relative
// step and relative cost decrease both below tol after an accepted step, or
// the cost collapses to the numerical floor. Never throws on
// non-convergence; the caller inspects the flag.
FitResult least_squares(const FitProblem& problem, double tol = 1e-10,
                        int max_iterations = 200);

}  // namespace floq

#endif
