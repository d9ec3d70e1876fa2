#include "floq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "floq/errors.hpp"
#include "floq/ode.hpp"
#include "floq/parallel.hpp"
#include "floq/units.hpp"

namespace floq {
namespace {

struct TimeDomainSystem {
  double kappa = 0.0;
  double gamma_m = 0.0;
  double detuning = 0.0;  // residual cavity detuning
  double omega_mod = 0.0;
  double g_r = 0.0;
  double g_c = 0.0;
  cplx dk;
  double drive_a = 0.0;
  double drive_b = 0.0;
  double omega = 0.0;  // drive frequency, frame

  // Harmonic projection bookkeeping. Empty during settling.
  std::vector<int> harmonic_index;
  double window = 0.0;

  void rhs(double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) const {
    const cplx e_mod = std::exp(cplx(0.0, omega_mod * t));
    const cplx e_drive = std::exp(cplx(0.0, -omega * t));
    const cplx a = y[0];
    const cplx b = y[1];
    const double mod = 2.0 * std::real(dk * e_mod);
    dy[0] = cplx(-kappa / 2.0, detuning - mod) * a +
            cplx(0.0, 1.0) * (g_r + g_c * std::conj(e_mod)) * b + drive_a * e_drive;
    dy[1] = cplx(-gamma_m / 2.0, 0.0) * b +
            cplx(0.0, 1.0) * (g_r + g_c * e_mod) * a + drive_b * e_drive;
    if (!harmonic_index.empty()) {
      // phase_n = e^{i(omega - n*omega_mod) t}; harmonic_index is ascending,
      // so each phase follows from the previous by one multiply.
      const cplx step = std::conj(e_mod);
      cplx phase = std::conj(e_drive);
      const int first = harmonic_index.front();
      for (int k = 0; k < first; ++k) phase *= step;
      for (int k = 0; k > first; --k) phase *= e_mod;
      int cur = first;
      for (std::size_t j = 0; j < harmonic_index.size(); ++j) {
        while (cur < harmonic_index[j]) {
          phase *= step;
          ++cur;
        }
        dy[2 + static_cast<Eigen::Index>(j)] = a * phase / window;
      }
    }
  }

  double fastest_rate() const {
    double r = std::max(kappa, gamma_m);
    r = std::max(r, std::abs(detuning));
    r = std::max(r, omega_mod);
    r = std::max(r, std::abs(omega));
    r = std::max(r, 4.0 * std::max(g_r, g_c));
    r = std::max(r, 2.0 * std::abs(dk));
    return r;
  }
};

cplx shanks(cplx p1, cplx p2, cplx p3) {
  const cplx d1 = p2 - p1;
  const cplx d2 = p3 - p2;
  const cplx den = d2 - d1;
  if (std::abs(den) <= 1e-14 * (std::abs(d1) + std::abs(d2))) return p3;
  return p3 - d2 * d2 / den;
}

void check_stability(const TimeDomainSystem& base, double period, double h_max,
                     double rel_tol) {
  TimeDomainSystem hom = base;
  hom.drive_a = 0.0;
  hom.drive_b = 0.0;
  hom.harmonic_index.clear();
  Eigen::Matrix2cd phi;
  for (int col = 0; col < 2; ++col) {
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(2);
    y[col] = 1.0;
    integrate_ode([&](double t, const Eigen::VectorXcd& s,
                      Eigen::VectorXcd& ds) { hom.rhs(t, s, ds); },
                  0.0, period, y, rel_tol, 1e-30, h_max);
    phi(0, col) = y[0];
    phi(1, col) = y[1];
  }
  const cplx tr = phi(0, 0) + phi(1, 1);
  const cplx det = phi(0, 0) * phi(1, 1) - phi(0, 1) * phi(1, 0);
  const cplx disc = std::sqrt(tr * tr - 4.0 * det);
  const double m1 = std::abs((tr + disc) / 2.0);
  const double m2 = std::abs((tr - disc) / 2.0);
  if (m1 >= 1.0 || m2 >= 1.0) {
    std::ostringstream msg;
    msg << "periodic system is unstable (multiplier magnitudes " << m1 << ", " << m2
        << ")";
    throw solver_error(msg.str());
  }
}

}  // namespace

std::map<int, cplx> time_domain_transfer(const SystemParams& params, const ToneSet& tones,
                                         const KerrModel& kerr, double omega,
                                         DriveChannel channel,
                                         const OracleConfig& config) {
  validate(params);
  validate(tones, params);
  validate(kerr);
  if (tones.has(ToneRole::BlueProbe))
    throw config_error("time_domain_transfer: blue probe is composed analytically");
  if (!tones.has(ToneRole::RedProbe) && !tones.has(ToneRole::Cooling))
    throw config_error("time_domain_transfer: needs a red-side tone");
  if (config.sample_periods < 1 || config.harmonics < 0)
    throw config_error("time_domain_transfer: bad projection configuration");
  if (!(config.rel_tol > 0.0) || !(config.step_fraction > 0.0))
    throw config_error("time_domain_transfer: bad step control configuration");

  TimeDomainSystem sys;
  sys.kappa = params.kappa;
  sys.gamma_m = params.gamma_m;
  sys.detuning = tones.residual_detuning;
  sys.omega_mod = tones.omega_mod;
  const Tone* red = tones.find(ToneRole::RedProbe);
  const Tone* cool = tones.find(ToneRole::Cooling);
  sys.g_r = red != nullptr ? enhanced_coupling(params.g0, red->n_photons) : 0.0;
  sys.g_c = cool != nullptr ? enhanced_coupling(params.g0, cool->n_photons) : 0.0;
  sys.dk = delta_k(kerr, cool != nullptr ? cool->amplitude : 0.0,
                   red != nullptr ? red->amplitude : 0.0, tones.omega_mod);
  sys.drive_a = channel == DriveChannel::OpticalIn ? std::sqrt(params.kappa) : 0.0;
  sys.drive_b = channel == DriveChannel::MechanicalIn ? std::sqrt(params.gamma_m) : 0.0;
  sys.omega = omega;

  const double gamma_tot = gamma_total(params, tones);
  const bool modulated = tones.omega_mod > 0.0;
  const double period =
      modulated ? two_pi / tones.omega_mod : two_pi / std::max(gamma_tot, 1.0);

  std::vector<int> wanted;
  if (modulated)
    for (int n = -config.harmonics; n <= config.harmonics; ++n) wanted.push_back(n);
  else
    wanted.push_back(0);

  const double h_max = config.step_fraction * 6.0 / sys.fastest_rate();
  check_stability(sys, period, h_max, config.rel_tol);

  int settle = config.settle_periods;
  if (settle <= 0) {
    const double slow = std::min(params.kappa, gamma_tot) / 2.0;
    settle = static_cast<int>(std::ceil(3.0 / (slow * period))) + 1;
  }

  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(2);
  integrate_ode([&](double t, const Eigen::VectorXcd& s,
                    Eigen::VectorXcd& ds) { sys.rhs(t, s, ds); },
                0.0, settle * period, y, config.rel_tol, 1e-30, h_max);

  sys.harmonic_index = wanted;
  sys.window = config.sample_periods * period;
  const int nh = static_cast<int>(wanted.size());
  Eigen::VectorXcd z = Eigen::VectorXcd::Zero(2 + nh);
  z.head(2) = y;

  // Four consecutive projection windows; geometric extrapolation across them
  // removes the one slow Floquet transient the settle may have left.
  std::vector<std::vector<cplx>> proj(4, std::vector<cplx>(nh));
  double t_cursor = settle * period;
  for (int w = 0; w < 4; ++w) {
    z.tail(nh).setZero();
    integrate_ode([&](double t, const Eigen::VectorXcd& s,
                      Eigen::VectorXcd& ds) { sys.rhs(t, s, ds); },
                  t_cursor, t_cursor + sys.window, z, config.rel_tol, 1e-30, h_max);
    t_cursor += sys.window;
    for (int j = 0; j < nh; ++j) proj[w][j] = z[2 + j];
  }

  std::map<int, cplx> result;
  double scale = 0.0;
  double drift = 0.0;
  for (int j = 0; j < nh; ++j) {
    const cplx s1 = shanks(proj[0][j], proj[1][j], proj[2][j]);
    const cplx s2 = shanks(proj[1][j], proj[2][j], proj[3][j]);
    result[wanted[j]] = s2;
    scale = std::max(scale, std::abs(s2));
    drift = std::max(drift, std::abs(s2 - s1));
  }
  if (drift > config.drift_tol * std::max(scale, 1e-300)) {
    std::ostringstream msg;
    msg << "projection has not settled: residual drift " << drift / std::max(scale, 1e-300)
        << " exceeds " << config.drift_tol << " (extend settling or windows)";
    throw solver_error(msg.str());
  }
  return result;
}

SpectrumTrace oracle_spectrum(const SystemParams& params, const ToneSet& tones,
                              const KerrModel& kerr, const EnvironmentParams& env,
                              const std::vector<double>& grid,
                              const OracleConfig& config) {
  validate(env);
  if (grid.size() < 2) throw config_error("oracle_spectrum: grid needs at least 2 points");
  const bool modulated = tones.omega_mod > 0.0;
  const int h = modulated ? config.harmonics : 0;

  struct Job {
    std::size_t grid_index;
    int harmonic;
  };
  std::vector<Job> jobs;
  jobs.reserve(grid.size() * (2 * h + 1));
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (int n = -h; n <= h; ++n) jobs.push_back({i, n});

  std::vector<double> power(jobs.size(), 0.0);
  OracleConfig single = config;
  parallel_for(jobs.size(), [&](std::size_t j) {
    const Job job = jobs[j];
    const double nu = grid[job.grid_index] + tones.delta_probe;
    const auto amps = time_domain_transfer(params, tones, kerr,
                                           nu + job.harmonic * tones.omega_mod,
                                           DriveChannel::MechanicalIn, single);
    power[j] = std::norm(amps.at(job.harmonic));
  });

  SpectrumTrace out;
  out.freq = grid;
  out.values.assign(grid.size(), 0.0);
  out.normalization = Normalization::NormalOrdered;
  for (std::size_t j = 0; j < jobs.size(); ++j)
    out.values[jobs[j].grid_index] += env.n_th * params.kappa * power[j];
  validate(out);
  return out;
}

CompareReport compare_spectra(const SpectrumTrace& a, const SpectrumTrace& b,
                              double rel_tol) {
  validate(a);
  validate(b);
  if (!(rel_tol > 0.0)) throw config_error("compare_spectra: rel_tol must be positive");
  if (a.freq.size() != b.freq.size())
    throw config_error("compare_spectra: traces have different lengths");
  if (a.normalization != b.normalization)
    throw config_error("compare_spectra: traces have different normalizations");
  for (std::size_t i = 0; i < a.freq.size(); ++i)
    if (a.freq[i] != b.freq[i])
      throw config_error("compare_spectra: traces have different grids");

  CompareReport rep;
  rep.at_freq = a.freq.empty() ? 0.0 : a.freq.front();
  for (std::size_t i = 0; i < a.freq.size(); ++i) {
    const double dev =
        std::abs(a.values[i] - b.values[i]) / std::max(std::abs(a.values[i]), 1e-12);
    if (dev > rep.max_rel_dev) {
      rep.max_rel_dev = dev;
      rep.at_freq = a.freq[i];
    }
  }
  rep.pass = rep.max_rel_dev <= rel_tol;
  return rep;
}

}  // namespace floq
