#ifndef FLOQ_ODE_HPP
#define FLOQ_ODE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "floq/errors.hpp"

namespace floq {

// Adaptive Dormand-Prince 5(4) integration of y' = f(t, y) for complex state
// vectors. f has signature f(t, y, dydt) with dydt preallocated.
//
// h_max bounds the step; the error control mixes absolute and relative
// tolerance per component against the largest state magnitude, which suits
// transfer amplitudes spanning decades within one state vector.
template <typename Rhs>
void integrate_ode(Rhs&& f, double t0, double t1, Eigen::VectorXcd& y, double rel_tol,
                   double abs_tol, double h_max) {
  static const double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
  static const double a21 = 1.0 / 5.0;
  static const double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static const double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static const double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                      a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static const double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                      a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  static const double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                      b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  static const double e1 = 35.0 / 384.0 - 5179.0 / 57600.0,
                      e3 = 500.0 / 1113.0 - 7571.0 / 16695.0,
                      e4 = 125.0 / 192.0 - 393.0 / 640.0,
                      e5 = -2187.0 / 6784.0 + 92097.0 / 339200.0,
                      e6 = 11.0 / 84.0 - 187.0 / 2100.0, e7 = -1.0 / 40.0;

  if (!(t1 > t0)) return;
  const Eigen::Index n = y.size();
  Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), yt(n), ynew(n);

  double t = t0;
  double h = h_max;
  f(t, y, k1);
  long rejected_in_a_row = 0;
  while (t < t1) {
    if (t + h > t1) h = t1 - t;
    yt = y + h * a21 * k1;
    f(t + c2 * h, yt, k2);
    yt = y + h * (a31 * k1 + a32 * k2);
    f(t + c3 * h, yt, k3);
    yt = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * h, yt, k4);
    yt = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * h, yt, k5);
    yt = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + h, yt, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    f(t + h, ynew, k7);

    double scale = abs_tol;
    for (Eigen::Index i = 0; i < n; ++i)
      scale = std::max(scale, rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i])));
    double err = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::complex<double> e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                          e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      err = std::max(err, std::abs(e));
    }
    err /= scale;

    if (err <= 1.0) {
      t += h;
      y.swap(ynew);
      k1.swap(k7);
      rejected_in_a_row = 0;
    } else if (++rejected_in_a_row > 60) {
      throw solver_error("ODE step control failed to find an acceptable step");
    }
    const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::min(5.0, std::max(0.2, grow));
    h = std::min(h, h_max);
    if (!(h > 0.0) || t + h == t)
      throw solver_error("ODE step size underflow");
  }
}

}  // namespace floq

#endif
