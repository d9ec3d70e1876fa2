#ifndef FLOQ_TRACE_HPP
#define FLOQ_TRACE_HPP

#include <vector>

namespace floq {

enum class Normalization { NormalOrdered, ShotNoiseNormalized };

// A sampled one-sided spectrum over a strictly increasing frequency grid.
// Frequencies are angular (rad/s) relative to the analysis frame.
struct SpectrumTrace {
  std::vector<double> freq;
  std::vector<double> values;
  Normalization normalization = Normalization::NormalOrdered;
  // Set when sidebands are too close to separate cleanly (spacing < 3*gamma_tot).
  bool overlap_warning = false;
};

// Throws config_error on malformed traces: mismatched lengths, a grid that is
// not strictly increasing, non-finite values, or shot-noise-normalized values
// below the floor of 1 (beyond a 1e-9 tolerance).
void validate(const SpectrumTrace& t);

// Structural checks only (lengths, grid order, finiteness). Measured traces
// with noise may dip below the shot-noise floor and still pass here.
void validate_structure(const SpectrumTrace& t);

// Trapezoid integral of (values - baseline) over [lo, hi], with linear
// interpolation at the window edges.
double integrate_band(const SpectrumTrace& t, double lo, double hi, double baseline);

// Uniform grid helper, n >= 2 points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace floq

#endif
