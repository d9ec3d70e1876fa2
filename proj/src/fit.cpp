#include "floq/fit.hpp"

#include <algorithm>
#include <cmath>

#include "floq/errors.hpp"

namespace floq {
namespace {

Eigen::VectorXd clamp_to_bounds(const FitProblem& problem, Eigen::VectorXd p) {
  if (problem.lower.size() == p.size())
    p = p.cwiseMax(problem.lower);
  if (problem.upper.size() == p.size())
    p = p.cwiseMin(problem.upper);
  return p;
}

Eigen::MatrixXd jacobian(const FitProblem& problem, const Eigen::VectorXd& p,
                         const Eigen::VectorXd& scale, Eigen::Index m) {
  Eigen::MatrixXd j(m, p.size());
  for (Eigen::Index c = 0; c < p.size(); ++c) {
    const double h = scale[c] * 1e-6;
    Eigen::VectorXd hi = p;
    Eigen::VectorXd lo = p;
    hi[c] += h;
    lo[c] -= h;
    j.col(c) = (problem.residual(hi) - problem.residual(lo)) / (2.0 * h);
  }
  return j;
}

}  // namespace

FitResult least_squares(const FitProblem& problem, double tol, int max_iterations) {
  if (!problem.residual) throw config_error("least_squares: no residual function");
  if (problem.initial.size() == 0) throw config_error("least_squares: no parameters");
  if (problem.lower.size() != 0 && problem.lower.size() != problem.initial.size())
    throw config_error("least_squares: lower bound size mismatch");
  if (problem.upper.size() != 0 && problem.upper.size() != problem.initial.size())
    throw config_error("least_squares: upper bound size mismatch");

  const Eigen::Index np = problem.initial.size();
  Eigen::VectorXd scale = problem.scale;
  if (scale.size() == 0)
    scale = problem.initial.cwiseAbs().cwiseMax(Eigen::VectorXd::Ones(np));
  else if (scale.size() != np)
    throw config_error("least_squares: scale size mismatch");

  Eigen::VectorXd p = clamp_to_bounds(problem, problem.initial);
  Eigen::VectorXd r = problem.residual(p);
  const Eigen::Index m = r.size();
  if (m < np) throw config_error("least_squares: fewer residuals than parameters");
  double cost = 0.5 * r.squaredNorm();
  const double cost0 = cost;

  FitResult result;
  result.parameters = p;
  result.iterations = 0;

  double lambda = 1e-8;
  Eigen::MatrixXd j = jacobian(problem, p, scale, m);
  Eigen::VectorXd g = j.transpose() * r;

  // Scaled gradient: cost change per relative parameter move. Vanishing at a
  // stationary point regardless of parameter magnitudes.
  auto stationary = [&](const Eigen::VectorXd& grad, double c) {
    return grad.cwiseProduct(scale).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, c);
  };
  // Already at a minimum: report convergence without moving.
  bool converged = stationary(g, cost);

  while (!converged && result.iterations < max_iterations) {
    const Eigen::MatrixXd jtj = j.transpose() * j;
    Eigen::MatrixXd damped = jtj;
    for (Eigen::Index d = 0; d < np; ++d) {
      const double ridge = jtj(d, d) > 0.0 ? jtj(d, d) : 1.0;
      damped(d, d) += lambda * ridge;
    }
    const Eigen::VectorXd delta = damped.ldlt().solve(-g);
    const Eigen::VectorXd p_new = clamp_to_bounds(problem, p + delta);
    if ((p_new - p).norm() == 0.0) {
      // The whole step was clamped away: no feasible descent direction.
      converged = true;
      break;
    }
    const Eigen::VectorXd r_new = problem.residual(p_new);
    const double cost_new = 0.5 * r_new.squaredNorm();

    if (cost_new < cost) {
      const double step = (p_new - p).cwiseQuotient(scale).norm();
      const double rel_step = step / std::max(1.0, p.cwiseQuotient(scale).norm());
      const double rel_dec = (cost - cost_new) / std::max(cost, 1e-300);
      p = p_new;
      r = r_new;
      cost = cost_new;
      result.iterations++;
      lambda = std::max(lambda / 5.0, 1e-12);
      j = jacobian(problem, p, scale, m);
      g = j.transpose() * r;
      if ((rel_step < tol && rel_dec < tol) ||
          cost <= 1e-30 * std::max(cost0, 1e-300) || stationary(g, cost)) {
        converged = true;
      }
    } else {
      // A rejected step too small to see in the parameters means the cost
      // cannot be reduced from here at working precision.
      const double attempted = (p_new - p).cwiseQuotient(scale).norm();
      if (attempted <= 1e-13 * std::max(1.0, p.cwiseQuotient(scale).norm())) {
        converged = true;
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
  }

  result.parameters = p;
  result.residual_norm = std::sqrt(2.0 * cost);
  result.converged = converged;

  if (problem.lower.size() == np || problem.upper.size() == np) {
    for (Eigen::Index d = 0; d < np; ++d) {
      if (problem.lower.size() == np &&
          std::abs(p[d] - problem.lower[d]) <= 1e-9 * scale[d])
        result.at_bounds = true;
      if (problem.upper.size() == np &&
          std::abs(p[d] - problem.upper[d]) <= 1e-9 * scale[d])
        result.at_bounds = true;
    }
  }

  j = jacobian(problem, p, scale, m);
  Eigen::MatrixXd jtj = j.transpose() * j;
  // Tiny ridge keeps ill-determined directions finite instead of blowing up
  // the whole inverse.
  const double ridge = 1e-14 * std::max(1.0, jtj.diagonal().maxCoeff());
  for (Eigen::Index d = 0; d < np; ++d) jtj(d, d) += ridge;
  Eigen::MatrixXd cov = jtj.ldlt().solve(Eigen::MatrixXd::Identity(np, np));
  if (!problem.sigma_normalized && m > np) {
    const double s2 = 2.0 * cost / static_cast<double>(m - np);
    cov *= s2;
  }
  result.covariance = 0.5 * (cov + cov.transpose());
  return result;
}

}  // namespace floq
