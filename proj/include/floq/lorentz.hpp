#ifndef FLOQ_LORENTZ_HPP
#define FLOQ_LORENTZ_HPP

#include <Eigen/Dense>
#include <vector>

#include "floq/trace.hpp"

namespace floq {

// One fitted peak of the shared-floor multi-Lorentzian model
// v(w) = floor + sum_k h_k / (1 + ((w - c_k)/hw_k)^2).
struct LorentzianFit {
  double center = 0.0;
  double hwhm = 0.0;
  double height = 0.0;  // above the shared floor
  double area = 0.0;    // pi * height * hwhm
  // Covariance over (center, hwhm, height, area); the area row and column
  // are propagated from the other three.
  Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();
  // Set when this peak overlaps a neighbour (spacing < 2*(hw_i + hw_j)).
  bool overlap_warning = false;
};

// Fits n_peaks Lorentzians plus a shared floor. init_centers seeds the peak
// positions (size n_peaks). noise_sigma > 0 declares a known per-point
// standard error, making covariances absolute; 0 scales them by the variance
// of the fit. Throws fit_error on flat traces, non-positive fitted heights
// or non-convergence; results come back sorted by center.
std::vector<LorentzianFit> fit_lorentzians(const SpectrumTrace& trace, int n_peaks,
                                           const std::vector<double>& init_centers,
                                           double noise_sigma = 0.0);

}  // namespace floq

#endif
