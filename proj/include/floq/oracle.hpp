#ifndef FLOQ_ORACLE_HPP
#define FLOQ_ORACLE_HPP

#include <map>

#include "floq/model.hpp"
#include "floq/trace.hpp"

namespace floq {

// Independent cross-check of the frequency-domain solver: the same
// linearized equations of motion are integrated in the time domain with the
// thermal modulation kept as an explicit periodic coefficient, one noise
// port replaced by a unit-amplitude coherent drive. Steady-state Fourier
// coefficients of the cavity field are extracted by projecting over integer
// modulation periods.

enum class DriveChannel { OpticalIn, MechanicalIn };

struct OracleConfig {
  // Settling time before projection, in modulation periods; 0 picks a value
  // from the slowest decay rate automatically.
  int settle_periods = 0;
  // Length of each projection window, in periods.
  int sample_periods = 6;
  // Harmonics extracted: indices -harmonics .. +harmonics.
  int harmonics = 4;
  // Local tolerance of the step control.
  double rel_tol = 1e-9;
  // Upper bound on the step, as a fraction of the fastest system timescale.
  double step_fraction = 0.5;
  // Residual slow drift allowed between consecutive extrapolated projection
  // estimates, relative to the largest harmonic.
  double drift_tol = 1e-6;
};

// Steady-state cavity-field harmonics A_n under a drive at frame frequency
// omega on the chosen port: delta_a(t) -> sum_n A_n e^{-i(omega - n
// omega_mod) t}. Input rates sqrt(kappa), sqrt(gamma_m) are part of the
// drive, matching solve_transfer columns. Raises a solver error when the
// periodic system is unstable or the projection has not settled.
std::map<int, cplx> time_domain_transfer(const SystemParams& params, const ToneSet& tones,
                                         const KerrModel& kerr, double omega,
                                         DriveChannel channel,
                                         const OracleConfig& config = {});

// Normal-ordered thermal output spectrum assembled from time-domain
// transfers, one integration per (grid point, harmonic). Parallelized.
SpectrumTrace oracle_spectrum(const SystemParams& params, const ToneSet& tones,
                              const KerrModel& kerr, const EnvironmentParams& env,
                              const std::vector<double>& grid,
                              const OracleConfig& config = {});

struct CompareReport {
  double max_rel_dev = 0.0;  // max |a-b| / max(|a|, floor)
  double at_freq = 0.0;      // grid frequency of the worst deviation
  bool pass = false;
};

// Pointwise relative comparison of two traces on identical grids.
CompareReport compare_spectra(const SpectrumTrace& a, const SpectrumTrace& b,
                              double rel_tol);

}  // namespace floq

#endif
