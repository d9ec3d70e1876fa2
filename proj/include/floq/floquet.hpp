#ifndef FLOQ_FLOQUET_HPP
#define FLOQ_FLOQUET_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "floq/model.hpp"
#include "floq/trace.hpp"

namespace floq {

// Fourier-mode truncation windows, inclusive on both ends. Index 0 carries
// the direct input and must be inside each window.
struct FloquetConfig {
  int opt_lo = -4;
  int opt_hi = 3;
  int mech_lo = -3;
  int mech_hi = 3;
  // Flips the sign of the conjugate thermal-modulation coupling. Breaks the
  // model on purpose so oracle comparisons have a failure to catch.
  bool debug_flip_conjugate = false;

  int n_opt() const { return opt_hi - opt_lo + 1; }
  int n_mech() const { return mech_hi - mech_lo + 1; }
  int dim() const { return n_opt() + n_mech(); }
};

// Smallest window that contains the two-tone physics: optical modes {-1, 0}
// and the mechanical carrier.
FloquetConfig minimal_window();

// Windows holding margin extra modes on each side of the populated optical
// pair {-1, 0} and of the mechanical carrier.
FloquetConfig window_with_margin(int margin);

// Assembled frequency-domain mode-coupling system for a two-tone drive with
// thermal modulation. The blue probe never enters; it is composed
// analytically downstream.
struct FloquetSystem {
  SystemParams params;
  ToneSet tones;
  FloquetConfig config;
  Susceptibilities sus;
  double g_r = 0.0;  // red-probe enhanced coupling
  double g_c = 0.0;  // cooling-tone enhanced coupling
  cplx dk;           // thermal modulation amplitude

  int dim() const { return config.dim(); }
  int opt_row(int n) const { return n - config.opt_lo; }
  int mech_row(int m) const { return config.n_opt() + (m - config.mech_lo); }

  // Writes the coupling matrix at frame frequency w into m (resized).
  void fill_matrix(double w, Eigen::MatrixXcd& m) const;
};

FloquetSystem assemble(const SystemParams& params, const ToneSet& tones,
                       const KerrModel& kerr, const FloquetConfig& config);

// Solves the truncated system at frame frequency w for unit inputs on the
// optical (column 0) and mechanical (column 1) index-0 ports, input rates
// sqrt(kappa) and sqrt(gamma_m) included. Near-singular systems raise a
// solver error naming the frequency.
Eigen::MatrixXcd solve_transfer(const FloquetSystem& sys, double w);

// Optical-output rows of a solved transfer: out_n = -sqrt(kappa_ex) * a_n,
// one row per optical Fourier index.
Eigen::MatrixXcd output_transfer(const FloquetSystem& sys,
                                 const Eigen::MatrixXcd& transfer);

enum class SpectrumAssembly { Full, DiagonalOnly };

// Normal-ordered output noise spectrum at a cavity-frame frequency: thermal
// occupancy times kappa*gamma_m times the summed squared transfer from the
// mechanical port into each optical Fourier harmonic, every harmonic read
// out at its own emission frequency. DiagonalOnly keeps the carrier
// harmonic alone.
double noise_spectrum_value(const FloquetSystem& sys, double n_th, double w_public,
                            SpectrumAssembly assembly = SpectrumAssembly::Full);

// Noise spectrum over a grid, parallelized over grid points.
SpectrumTrace noise_spectrum(const SystemParams& params, const ToneSet& tones,
                             const KerrModel& kerr, const EnvironmentParams& env,
                             const FloquetConfig& config, const std::vector<double>& grid,
                             SpectrumAssembly assembly = SpectrumAssembly::Full);

// Full-line integrated weight of one optical harmonic of the mechanical
// thermal channel, free of neighbouring-sideband tails.
double harmonic_weight(const FloquetSystem& sys, double n_th, int harmonic);

// 1 + eta * S with the frequency axis shifted by the local-oscillator
// detuning. Input must be normal ordered.
SpectrumTrace heterodyne_spectrum(const SpectrumTrace& sn, const DetectionParams& det);

// Recomputes the spectrum on growing windows (margins 0, 1, 2, 4, ...,
// doubling up to six times) until the largest relative change between
// consecutive windows drops below rel_tol. Returns the first stable trace
// and the window it was computed on. debug_flip_conjugate is forwarded to
// every window tried.
std::pair<SpectrumTrace, FloquetConfig> converged_spectrum(
    const SystemParams& params, const ToneSet& tones, const KerrModel& kerr,
    const EnvironmentParams& env, const std::vector<double>& grid, double rel_tol,
    SpectrumAssembly assembly = SpectrumAssembly::Full, bool debug_flip_conjugate = false);

}  // namespace floq

#endif
