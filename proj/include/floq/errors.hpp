#ifndef FLOQ_ERRORS_HPP
#define FLOQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace floq {

// Error taxonomy mirrors the CLI exit codes: configuration problems (2),
// solver failures (3), unphysical asymmetry (4), fit non-convergence (5).
// Oracle mismatches (6) are reported through compare_spectra, not thrown.

struct error : std::runtime_error {
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid parameters, malformed config or CSV input, violated preconditions.
struct config_error : error {
  explicit config_error(const std::string& msg) : error(msg) {}
};

// Numerical failure inside a solver: singular system, no convergence of the
// truncation loop, ODE instability, insufficient settling, empty input data.
struct solver_error : error {
  explicit solver_error(const std::string& msg) : error(msg) {}
};

// Sideband weight ratio r' >= 1: no occupancy reproduces it. Raised loudly
// because it is the signature of nonlinearity contamination.
struct asymmetry_error : error {
  explicit asymmetry_error(const std::string& msg) : error(msg) {}
};

// A least-squares fit failed to converge or found no structure to fit.
struct fit_error : error {
  explicit fit_error(const std::string& msg) : error(msg) {}
};

}  // namespace floq

#endif
