#include <cmath>
#include <vector>

#include "doctest.h"
#include "floq/fit.hpp"

using namespace floq;

TEST_SUITE("fit") {

TEST_CASE("a consistent linear system is solved to the numerical floor") {
  FitProblem prob;
  prob.initial = Eigen::VectorXd::Zero(2);
  prob.residual = [](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(3);
    r(0) = p(0) + p(1) - 3.0;
    r(1) = p(0) - p(1) - 1.0;
    r(2) = 2.0 * p(0) + p(1) - 5.0;
    return r;
  };
  const FitResult res = least_squares(prob);
  CHECK(res.converged);
  CHECK(res.parameters(0) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(res.parameters(1) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(res.residual_norm < 1e-8);
  CHECK_FALSE(res.at_bounds);
}

TEST_CASE("an exponential decay is recovered from a biased start") {
  const double a_true = 3.7, b_true = 1.3;
  std::vector<double> t, y;
  for (int i = 0; i < 20; ++i) {
    t.push_back(0.1 * static_cast<double>(i));
    y.push_back(a_true * std::exp(-b_true * t.back()));
  }
  FitProblem prob;
  prob.initial = Eigen::VectorXd(2);
  prob.initial << 1.5, 3.0;
  prob.residual = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<int>(t.size()));
    for (std::size_t i = 0; i < t.size(); ++i)
      r(static_cast<int>(i)) = p(0) * std::exp(-p(1) * t[i]) - y[i];
    return r;
  };
  const FitResult res = least_squares(prob);
  CHECK(res.converged);
  CHECK(res.parameters(0) == doctest::Approx(a_true).epsilon(1e-7));
  CHECK(res.parameters(1) == doctest::Approx(b_true).epsilon(1e-7));
  CHECK(res.iterations > 0);
}

TEST_CASE("box bounds clamp the step and are reported") {
  FitProblem prob;
  prob.initial = Eigen::VectorXd::Constant(1, 1.0);
  prob.lower = Eigen::VectorXd::Constant(1, 0.0);
  prob.upper = Eigen::VectorXd::Constant(1, 2.0);
  prob.residual = [](const Eigen::VectorXd& p) {
    return Eigen::VectorXd::Constant(1, p(0) - 5.0).eval();
  };
  const FitResult res = least_squares(prob);
  CHECK(res.converged);
  CHECK(res.at_bounds);
  CHECK(res.parameters(0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("a stationary residual converges in place") {
  FitProblem prob;
  prob.initial = Eigen::VectorXd::Constant(2, 0.7);
  prob.residual = [](const Eigen::VectorXd&) {
    Eigen::VectorXd r(2);
    r << 1.0, -2.0;
    return r;
  };
  const FitResult res = least_squares(prob);
  CHECK(res.converged);
  CHECK(res.parameters(0) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(res.residual_norm == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("covariance carries the variance of fit unless sigma normalized") {
  const std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 5.0};
  const std::vector<double> y = {2.0, 3.9, 6.1, 8.0, 10.1};
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - slope * x[i];
    rss += r * r;
  }

  FitProblem prob;
  prob.initial = Eigen::VectorXd::Constant(1, 1.0);
  prob.residual = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<int>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
      r(static_cast<int>(i)) = p(0) * x[i] - y[i];
    return r;
  };
  FitResult res = least_squares(prob);
  CHECK(res.converged);
  CHECK(res.parameters(0) == doctest::Approx(slope).epsilon(1e-9));
  const double dof = static_cast<double>(x.size()) - 1.0;
  CHECK(res.covariance(0, 0) == doctest::Approx(rss / dof / sxx).epsilon(1e-6));

  prob.sigma_normalized = true;
  res = least_squares(prob);
  CHECK(res.covariance(0, 0) == doctest::Approx(1.0 / sxx).epsilon(1e-6));
}

TEST_CASE("parameter scales keep badly conditioned units workable") {
  const double rate_true = 2.4e6;
  const double amp_true = 5.0e-3;
  std::vector<double> t, y;
  for (int i = 1; i <= 16; ++i) {
    t.push_back(1e-7 * static_cast<double>(i));
    y.push_back(amp_true * std::exp(-rate_true * t.back()));
  }
  FitProblem prob;
  prob.initial = Eigen::VectorXd(2);
  prob.initial << 1e-3, 8e5;
  prob.scale = Eigen::VectorXd(2);
  prob.scale << 1e-3, 1e6;
  prob.residual = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<int>(t.size()));
    for (std::size_t i = 0; i < t.size(); ++i)
      r(static_cast<int>(i)) = p(0) * std::exp(-p(1) * t[i]) - y[i];
    return r;
  };
  const FitResult res = least_squares(prob);
  CHECK(res.converged);
  CHECK(res.parameters(0) == doctest::Approx(amp_true).epsilon(1e-6));
  CHECK(res.parameters(1) == doctest::Approx(rate_true).epsilon(1e-6));
}

TEST_CASE("an exhausted iteration budget is reported, not thrown") {
  FitProblem prob;
  prob.initial = Eigen::VectorXd::Constant(1, 10.0);
  prob.residual = [](const Eigen::VectorXd& p) {
    return Eigen::VectorXd::Constant(1, std::atan(p(0))).eval();
  };
  const FitResult res = least_squares(prob, 1e-14, 1);
  CHECK_FALSE(res.converged);
  CHECK(res.iterations <= 1);
}

}  // TEST_SUITE
