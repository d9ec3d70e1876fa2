#include "floq/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "floq/errors.hpp"
#include "floq/parallel.hpp"
#include "floq/spectra.hpp"
#include "floq/units.hpp"

namespace floq {

FloquetConfig minimal_window() {
  FloquetConfig c;
  c.opt_lo = -1;
  c.opt_hi = 0;
  c.mech_lo = 0;
  c.mech_hi = 0;
  return c;
}

FloquetConfig window_with_margin(int margin) {
  if (margin < 0) throw config_error("window margin must be non-negative");
  FloquetConfig c;
  c.opt_lo = -1 - margin;
  c.opt_hi = margin;
  c.mech_lo = -margin;
  c.mech_hi = margin;
  return c;
}

void FloquetSystem::fill_matrix(double w, Eigen::MatrixXcd& m) const {
  const int d = dim();
  m.resize(d, d);
  m.setZero();
  const double om = tones.omega_mod;
  const cplx i_gr(0.0, g_r);
  const cplx i_gc(0.0, g_c);
  const cplx i_dk = cplx(0.0, 1.0) * dk;
  const cplx i_dk_conj =
      (config.debug_flip_conjugate ? -1.0 : 1.0) * cplx(0.0, 1.0) * std::conj(dk);

  for (int n = config.opt_lo; n <= config.opt_hi; ++n) {
    const int r = opt_row(n);
    m(r, r) = sus.chi_opt_inv(w - n * om);
    if (n >= config.mech_lo && n <= config.mech_hi) m(r, mech_row(n)) = -i_gr;
    if (n + 1 >= config.mech_lo && n + 1 <= config.mech_hi)
      m(r, mech_row(n + 1)) = -i_gc;
    if (n + 1 <= config.opt_hi) m(r, opt_row(n + 1)) = i_dk_conj;
    if (n - 1 >= config.opt_lo) m(r, opt_row(n - 1)) = i_dk;
  }
  for (int k = config.mech_lo; k <= config.mech_hi; ++k) {
    const int r = mech_row(k);
    m(r, r) = sus.chi_m_inv(w - k * om);
    if (k >= config.opt_lo && k <= config.opt_hi) m(r, opt_row(k)) = -i_gr;
    if (k - 1 >= config.opt_lo && k - 1 <= config.opt_hi)
      m(r, opt_row(k - 1)) = -i_gc;
  }
}

FloquetSystem assemble(const SystemParams& params, const ToneSet& tones,
                       const KerrModel& kerr, const FloquetConfig& config) {
  validate(params);
  validate(tones, params);
  validate(kerr);
  if (config.opt_lo > config.opt_hi || config.mech_lo > config.mech_hi)
    throw config_error("Fourier window bounds are inverted");
  if (config.opt_lo > 0 || config.opt_hi < 0 || config.mech_lo > 0 || config.mech_hi < 0)
    throw config_error("Fourier windows must contain index 0");
  if (!tones.has(ToneRole::RedProbe) && !tones.has(ToneRole::Cooling))
    throw config_error("lattice needs at least one red-side tone");
  if (tones.omega_mod <= 0.0 && config.dim() > 2)
    throw config_error("multi-mode window needs a positive omega_mod");

  FloquetSystem sys;
  sys.params = params;
  sys.tones = tones;
  sys.config = config;
  sys.sus = susceptibilities(params, tones);
  const Tone* red = tones.find(ToneRole::RedProbe);
  const Tone* cool = tones.find(ToneRole::Cooling);
  sys.g_r = red != nullptr ? enhanced_coupling(params.g0, red->n_photons) : 0.0;
  sys.g_c = cool != nullptr ? enhanced_coupling(params.g0, cool->n_photons) : 0.0;
  const double a_r = red != nullptr ? red->amplitude : 0.0;
  const double a_c = cool != nullptr ? cool->amplitude : 0.0;
  sys.dk = delta_k(kerr, a_c, a_r, tones.omega_mod);
  return sys;
}

Eigen::MatrixXcd solve_transfer(const FloquetSystem& sys, double w) {
  Eigen::MatrixXcd m;
  sys.fill_matrix(w, m);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-12)) {
    std::ostringstream msg;
    msg << "near-singular mode-coupling system at frame frequency " << w
        << " rad/s (rcond " << rcond << ")";
    throw solver_error(msg.str());
  }
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(sys.dim(), 2);
  rhs(sys.opt_row(0), 0) = std::sqrt(sys.params.kappa);
  rhs(sys.mech_row(0), 1) = std::sqrt(sys.params.gamma_m);
  return lu.solve(rhs);
}

Eigen::MatrixXcd output_transfer(const FloquetSystem& sys,
                                 const Eigen::MatrixXcd& transfer) {
  const int n_opt = sys.config.n_opt();
  Eigen::MatrixXcd out(n_opt, transfer.cols());
  const double root_kex = std::sqrt(sys.params.kappa_ex);
  for (int r = 0; r < n_opt; ++r) out.row(r) = -root_kex * transfer.row(r);
  return out;
}

double noise_spectrum_value(const FloquetSystem& sys, double n_th, double w_public,
                            SpectrumAssembly assembly) {
  const double w_frame = w_public + sys.tones.delta_probe;
  const double om = sys.tones.omega_mod;
  // The mechanical-port column already carries sqrt(gamma_m), so the thermal
  // prefactor reduces to n_th*kappa.
  const double scale = n_th * sys.params.kappa;
  if (assembly == SpectrumAssembly::DiagonalOnly) {
    const Eigen::MatrixXcd sol = solve_transfer(sys, w_frame);
    return scale * std::norm(sol(sys.opt_row(0), 1));
  }
  double s = 0.0;
  for (int n = sys.config.opt_lo; n <= sys.config.opt_hi; ++n) {
    const Eigen::MatrixXcd sol = solve_transfer(sys, w_frame + n * om);
    s += std::norm(sol(sys.opt_row(n), 1));
  }
  return scale * s;
}

SpectrumTrace noise_spectrum(const SystemParams& params, const ToneSet& tones,
                             const KerrModel& kerr, const EnvironmentParams& env,
                             const FloquetConfig& config, const std::vector<double>& grid,
                             SpectrumAssembly assembly) {
  validate(env);
  if (grid.size() < 2) throw config_error("noise_spectrum: grid needs at least 2 points");
  const FloquetSystem sys = assemble(params, tones, kerr, config);
  SpectrumTrace out;
  out.freq = grid;
  out.values.assign(grid.size(), 0.0);
  out.normalization = Normalization::NormalOrdered;
  parallel_for(grid.size(), [&](std::size_t i) {
    out.values[i] = noise_spectrum_value(sys, env.n_th, grid[i], assembly);
  });
  validate(out);
  return out;
}

double harmonic_weight(const FloquetSystem& sys, double n_th, int harmonic) {
  if (harmonic < sys.config.opt_lo || harmonic > sys.config.opt_hi)
    throw config_error("harmonic_weight: harmonic outside the optical window");
  const double scale = n_th * sys.params.kappa;
  const double hw = sys.sus.gamma_tot / 2.0;
  return integrate_peaked_line(
      [&](double nu) {
        const Eigen::MatrixXcd sol = solve_transfer(sys, nu);
        return scale * std::norm(sol(sys.opt_row(harmonic), 1));
      },
      0.0, hw);
}

SpectrumTrace heterodyne_spectrum(const SpectrumTrace& sn, const DetectionParams& det) {
  validate(sn);
  validate(det);
  if (sn.normalization != Normalization::NormalOrdered)
    throw config_error("heterodyne_spectrum: input must be normal ordered");
  SpectrumTrace out;
  out.freq.resize(sn.freq.size());
  out.values.resize(sn.values.size());
  out.normalization = Normalization::ShotNoiseNormalized;
  out.overlap_warning = sn.overlap_warning;
  for (std::size_t i = 0; i < sn.freq.size(); ++i) {
    out.freq[i] = sn.freq[i] + det.delta_lo;
    out.values[i] = 1.0 + det.eta * sn.values[i];
  }
  validate(out);
  return out;
}

std::pair<SpectrumTrace, FloquetConfig> converged_spectrum(
    const SystemParams& params, const ToneSet& tones, const KerrModel& kerr,
    const EnvironmentParams& env, const std::vector<double>& grid, double rel_tol,
    SpectrumAssembly assembly, bool debug_flip_conjugate) {
  if (!(rel_tol > 0.0)) throw config_error("converged_spectrum: rel_tol must be positive");
  std::vector<int> margins = {0, 1, 2, 4, 8, 16, 32};
  FloquetConfig first = minimal_window();
  first.debug_flip_conjugate = debug_flip_conjugate;
  SpectrumTrace prev = noise_spectrum(params, tones, kerr, env, first, grid, assembly);
  double last_change = 0.0;
  for (std::size_t k = 1; k < margins.size(); ++k) {
    FloquetConfig config = window_with_margin(margins[k]);
    config.debug_flip_conjugate = debug_flip_conjugate;
    SpectrumTrace cur = noise_spectrum(params, tones, kerr, env, config, grid, assembly);
    double change = 0.0;
    double scale = 1e-300;
    for (double v : cur.values) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < cur.values.size(); ++i)
      change = std::max(change, std::abs(cur.values[i] - prev.values[i]) / scale);
    if (change < rel_tol) return {std::move(cur), config};
    prev = std::move(cur);
    last_change = change;
  }
  std::ostringstream msg;
  msg << "Fourier window not converged after 6 doublings (margin "
      << margins.back() << ", last relative change " << last_change << ", rel_tol "
      << rel_tol << ")";
  throw solver_error(msg.str());
}

}  // namespace floq
