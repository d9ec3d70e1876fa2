#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "floq/config.hpp"
#include "floq/csvio.hpp"
#include "floq/errors.hpp"
#include "floq/floquet.hpp"
#include "floq/kerrfit.hpp"
#include "floq/lorentz.hpp"
#include "floq/model.hpp"
#include "floq/oracle.hpp"
#include "floq/response.hpp"
#include "floq/spectra.hpp"
#include "floq/thermometry.hpp"
#include "floq/trace.hpp"
#include "floq/units.hpp"

namespace {

using floq::Normalization;
using floq::RunConfig;
using floq::SpectrumTrace;
using floq::ToneRole;

using ReportRows = std::vector<std::tuple<std::string, double, double>>;

// Engines evaluate on the cavity-frame axis; the CSV axis carries the local
// oscillator shift.
std::vector<double> cavity_grid(const RunConfig& cfg) {
  std::vector<double> grid = floq::heterodyne_grid(cfg);
  for (double& w : grid) w -= cfg.detection.delta_lo;
  return grid;
}

SpectrumTrace run_engine(const RunConfig& cfg, const std::string& engine) {
  const std::vector<double> grid = cavity_grid(cfg);
  if (engine == "ideal") {
    SpectrumTrace out =
        floq::ideal_spectrum(cfg.system, cfg.tones, cfg.environment, cfg.detection, grid);
    for (double& w : out.freq) w += cfg.detection.delta_lo;
    return out;
  }
  SpectrumTrace sn;
  if (engine == "three-mode") {
    sn.freq = grid;
    sn.normalization = Normalization::NormalOrdered;
    sn.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      sn.values[i] =
          floq::three_mode_sn(cfg.system, cfg.tones, cfg.kerr, cfg.environment, grid[i]);
  } else if (engine == "floquet") {
    sn = floq::noise_spectrum(cfg.system, cfg.tones, cfg.kerr, cfg.environment,
                              cfg.floquet, grid, cfg.assembly);
  } else if (engine == "oracle") {
    sn = floq::oracle_spectrum(cfg.system, cfg.tones, cfg.kerr, cfg.environment, grid);
  } else {
    throw floq::config_error("unknown engine: " + engine);
  }
  floq::compose_blue_sideband(sn, cfg.system, cfg.tones, cfg.environment);
  return floq::heterodyne_spectrum(sn, cfg.detection);
}

void add_multiplicative_noise(SpectrumTrace& trace, double rel, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (double& v : trace.values) v *= 1.0 + rel * unit(gen);
}

double mean_value(const SpectrumTrace& trace) {
  double acc = 0.0;
  for (double v : trace.values) acc += v;
  return acc / static_cast<double>(trace.values.size());
}

std::string residuals_path(const std::string& out) {
  const std::string suffix = ".csv";
  if (out.size() > suffix.size() &&
      out.compare(out.size() - suffix.size(), suffix.size(), suffix) == 0)
    return out.substr(0, out.size() - suffix.size()) + ".residuals.csv";
  return out + ".residuals.csv";
}

struct SpectrumArgs {
  std::string config;
  std::string out;
  std::string engine = "floquet";
  double noise = 0.0;
  unsigned seed = 1;
};

int cmd_spectrum(const SpectrumArgs& args) {
  const RunConfig cfg = floq::parse_config_file(args.config);
  SpectrumTrace trace = run_engine(cfg, args.engine);
  if (args.noise > 0.0) add_multiplicative_noise(trace, args.noise, args.seed);
  floq::write_spectrum_csv(args.out, trace);
  std::cout << "wrote " << args.out << " (" << trace.freq.size() << " points, engine "
            << args.engine << ")\n";
  return 0;
}

struct AsymmetryArgs {
  std::string config;
  std::string out;
  std::string spectrum;
  bool synthesize = false;
  std::string engine = "ideal";
  double noise = 0.0;
  unsigned seed = 1;
  double tuning_err_hz = 20e6;
};

struct ExpectedPeak {
  ToneRole role = ToneRole::RedProbe;
  std::string label;
  double center = 0.0;  // cavity-frame axis
  double coop = 0.0;
  double n_photons = 0.0;
};

int cmd_asymmetry(const AsymmetryArgs& args) {
  const RunConfig cfg = floq::parse_config_file(args.config);

  SpectrumTrace het;
  if (!args.spectrum.empty()) {
    het = floq::read_spectrum_csv(args.spectrum);
  } else if (args.synthesize) {
    het = run_engine(cfg, args.engine);
    if (args.noise > 0.0) add_multiplicative_noise(het, args.noise, args.seed);
  } else {
    throw floq::config_error("asymmetry needs --spectrum FILE or --synthesize");
  }
  if (het.freq.size() < 2) throw floq::solver_error("spectrum trace is empty");

  SpectrumTrace trace = het;
  for (double& w : trace.freq) w -= cfg.detection.delta_lo;

  const double delta = cfg.tones.delta_probe;
  const double om = cfg.tones.omega_mod;
  std::vector<ExpectedPeak> expected;
  if (const floq::Tone* t = cfg.tones.find(ToneRole::RedProbe))
    expected.push_back({ToneRole::RedProbe, "red", -delta,
                        floq::cooperativity(cfg.system, t->n_photons), t->n_photons});
  if (const floq::Tone* t = cfg.tones.find(ToneRole::Cooling))
    expected.push_back({ToneRole::Cooling, "cool", om - delta,
                        floq::cooperativity(cfg.system, t->n_photons), t->n_photons});
  if (const floq::Tone* t = cfg.tones.find(ToneRole::BlueProbe))
    expected.push_back({ToneRole::BlueProbe, "blue", delta,
                        floq::cooperativity(cfg.system, t->n_photons), t->n_photons});
  if (expected.empty()) throw floq::config_error("asymmetry needs at least one tone");
  std::sort(expected.begin(), expected.end(),
            [](const ExpectedPeak& a, const ExpectedPeak& b) { return a.center < b.center; });
  for (std::size_t i = 0; i + 1 < expected.size(); ++i)
    if (!(expected[i].center < expected[i + 1].center))
      throw floq::config_error("sideband centers coincide; peaks cannot be separated");
  for (const ExpectedPeak& p : expected)
    if (p.center < trace.freq.front() || p.center > trace.freq.back()) {
      std::ostringstream msg;
      msg << "expected " << p.label << " sideband at " << floq::rad_to_hz(p.center)
          << " Hz lies outside the spectrum grid";
      throw floq::config_error(msg.str());
    }

  std::vector<double> centers;
  for (const ExpectedPeak& p : expected) centers.push_back(p.center);
  const double sigma = args.noise > 0.0 ? args.noise * mean_value(trace) : 0.0;
  const std::vector<floq::LorentzianFit> fits =
      floq::fit_lorentzians(trace, static_cast<int>(expected.size()), centers, sigma);

  ReportRows rows;
  const floq::LorentzianFit* fit_of[3] = {nullptr, nullptr, nullptr};
  const ExpectedPeak* peak_of[3] = {nullptr, nullptr, nullptr};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const floq::LorentzianFit& f = fits[i];
    const ExpectedPeak& p = expected[i];
    fit_of[static_cast<int>(p.role)] = &f;
    peak_of[static_cast<int>(p.role)] = &p;
    rows.emplace_back("peak_" + p.label + "_center_hz", floq::rad_to_hz(f.center),
                      floq::rad_to_hz(std::sqrt(f.covariance(0, 0))));
    rows.emplace_back("peak_" + p.label + "_hwhm_hz", floq::rad_to_hz(f.hwhm),
                      floq::rad_to_hz(std::sqrt(f.covariance(1, 1))));
    rows.emplace_back("peak_" + p.label + "_area_hz", floq::rad_to_hz(f.area),
                      floq::rad_to_hz(std::sqrt(f.covariance(3, 3))));
  }

  const double tuning_scale = floq::hz_to_rad(args.tuning_err_hz);
  auto tuning_err = [&](const ExpectedPeak& p) {
    return floq::tuning_rel_error(cfg.system, p.center + cfg.tones.residual_detuning,
                                  tuning_scale);
  };
  auto weight_of = [](const floq::LorentzianFit& f) {
    return floq::WeightMeasurement{f.area, std::sqrt(f.covariance(3, 3))};
  };

  const auto* blue_fit = fit_of[static_cast<int>(ToneRole::BlueProbe)];
  const auto* blue_peak = peak_of[static_cast<int>(ToneRole::BlueProbe)];
  auto flavor = [&](ToneRole anti_role, const std::string& name) {
    const auto* anti_fit = fit_of[static_cast<int>(anti_role)];
    const auto* anti_peak = peak_of[static_cast<int>(anti_role)];
    if (anti_fit == nullptr || blue_fit == nullptr) return;
    const double extra =
        std::hypot(tuning_err(*anti_peak), tuning_err(*blue_peak));
    const floq::OccupancyEstimate est =
        floq::occupancy_estimate(weight_of(*anti_fit), weight_of(*blue_fit),
                                 anti_peak->coop, blue_peak->coop, extra);
    rows.emplace_back("r_prime_" + name, est.r_prime, est.r_prime_sigma);
    rows.emplace_back("n_bar_" + name, est.n_bar, est.sigma);
    rows.emplace_back("n_bar_" + name + "_ci95", est.n_bar, 1.96 * est.sigma);
  };
  flavor(ToneRole::RedProbe, "red_blue");
  flavor(ToneRole::Cooling, "cool_blue");

  if (cfg.detection.eta_set) {
    for (std::size_t i = 0; i < expected.size(); ++i) {
      const ExpectedPeak& p = expected[i];
      const floq::Tone* tone = cfg.tones.find(p.role);
      const double occ =
          floq::occupancy_from_weight(fits[i], cfg.system, *tone, cfg.detection);
      const double rel =
          fits[i].area > 0.0 ? std::sqrt(fits[i].covariance(3, 3)) / fits[i].area : 0.0;
      rows.emplace_back("n_bar_weight_" + p.label, occ, std::abs(occ) * rel);
    }
  }

  floq::write_report_csv(args.out, rows);
  std::cout << "wrote " << args.out << " (" << rows.size() << " rows, "
            << expected.size() << " peaks)\n";
  return 0;
}

struct FitArgs {
  std::string kind;
  std::string config;
  std::vector<std::string> data;
  std::string out;
};

void require_converged(bool converged, const std::string& what, double residual_norm) {
  if (converged) return;
  std::ostringstream msg;
  msg << what << " did not converge (residual norm " << residual_norm << ")";
  throw floq::fit_error(msg.str());
}

double pump_photons(const RunConfig& cfg) {
  const floq::Tone* red = cfg.tones.find(ToneRole::RedProbe);
  const floq::Tone* cool = cfg.tones.find(ToneRole::Cooling);
  if (red == nullptr || cool == nullptr)
    throw floq::config_error("this fit needs both red-side tones in the config");
  if (std::abs(red->n_photons - cool->n_photons) >
      1e-9 * std::max(1.0, red->n_photons))
    throw floq::config_error("this fit needs equal pump photon numbers");
  return red->n_photons;
}

int fit_kerr_ratio(const FitArgs& args) {
  const RunConfig cfg = floq::parse_config_file(args.config);
  const floq::CsvTable table = floq::read_csv(args.data.front());
  if (table.header != std::vector<std::string>{"omega_mod_hz", "ratio"})
    throw floq::config_error("kerr-ratio data needs header omega_mod_hz,ratio");
  std::vector<std::pair<double, double>> data;
  for (const auto& row : table.rows)
    data.emplace_back(floq::hz_to_rad(row[0]), row[1]);
  const double n_c = pump_photons(cfg);

  const floq::KerrFitResult fit = floq::fit_kerr_from_ratio(data, cfg.system, n_c);
  require_converged(fit.converged, "kerr-ratio fit", fit.residual_norm);

  const double sg = std::sqrt(std::max(0.0, fit.covariance(0, 0)));
  const double sp = std::sqrt(std::max(0.0, fit.covariance(1, 1)));
  const double corr =
      sg > 0.0 && sp > 0.0 ? fit.covariance(0, 1) / (sg * sp) : 0.0;
  ReportRows rows;
  rows.emplace_back("gamma_th_hz", floq::rad_to_hz(fit.gamma_th), floq::rad_to_hz(sg));
  rows.emplace_back("g_product_hz2", floq::rad2_to_hz2(fit.g_product),
                    floq::rad2_to_hz2(sp));
  rows.emplace_back("corr_gamma_g", corr, 0.0);
  rows.emplace_back("residual_norm", fit.residual_norm, 0.0);
  rows.emplace_back("converged", fit.converged ? 1.0 : 0.0, 0.0);
  rows.emplace_back("at_bounds", fit.at_bounds ? 1.0 : 0.0, 0.0);
  floq::write_report_csv(args.out, rows);

  floq::KerrModel fitted;
  fitted.gamma_th = fit.gamma_th;
  fitted.g_product = fit.g_product;
  std::vector<double> omegas;
  for (const auto& [w, r] : data) omegas.push_back(w);
  const std::vector<double> model =
      floq::normalized_peak_ratio(cfg.system, fitted, n_c, omegas);
  std::vector<std::vector<double>> res_rows;
  for (std::size_t i = 0; i < data.size(); ++i)
    res_rows.push_back({floq::rad_to_hz(data[i].first), data[i].second, model[i],
                        data[i].second - model[i]});
  floq::write_csv(residuals_path(args.out), {"omega_mod_hz", "ratio", "model", "residual"},
                  res_rows);
  std::cout << "wrote " << args.out << " (gamma_th "
            << floq::rad_to_hz(fit.gamma_th) << " Hz, g_product "
            << floq::rad2_to_hz2(fit.g_product) << " Hz^2)\n";
  return 0;
}

int fit_kerr_spectra(const FitArgs& args) {
  const RunConfig cfg = floq::parse_config_file(args.config);
  if (cfg.tones.has(ToneRole::BlueProbe))
    throw floq::config_error(
        "kerr-spectra fits the solved red-side spectrum; remove the blue probe");
  std::vector<SpectrumTrace> traces;
  for (const std::string& path : args.data) traces.push_back(floq::read_spectrum_csv(path));
  const std::vector<floq::ToneSet> tone_sets(traces.size(), cfg.tones);

  const floq::KerrFitResult fit = floq::fit_kerr_from_spectra(
      traces, tone_sets, cfg.system, cfg.environment, cfg.detection);
  require_converged(fit.converged, "kerr-spectra fit", fit.residual_norm);

  const double sg = std::sqrt(std::max(0.0, fit.covariance(0, 0)));
  const double sp = std::sqrt(std::max(0.0, fit.covariance(1, 1)));
  const double corr =
      sg > 0.0 && sp > 0.0 ? fit.covariance(0, 1) / (sg * sp) : 0.0;
  ReportRows rows;
  rows.emplace_back("gamma_th_hz", floq::rad_to_hz(fit.gamma_th), floq::rad_to_hz(sg));
  rows.emplace_back("g_product_hz2", floq::rad2_to_hz2(fit.g_product),
                    floq::rad2_to_hz2(sp));
  rows.emplace_back("corr_gamma_g", corr, 0.0);
  rows.emplace_back("residual_norm", fit.residual_norm, 0.0);
  rows.emplace_back("converged", fit.converged ? 1.0 : 0.0, 0.0);
  rows.emplace_back("at_bounds", fit.at_bounds ? 1.0 : 0.0, 0.0);
  floq::write_report_csv(args.out, rows);

  floq::KerrModel fitted;
  fitted.gamma_th = fit.gamma_th;
  fitted.g_product = fit.g_product;
  std::vector<std::vector<double>> res_rows;
  for (std::size_t t = 0; t < traces.size(); ++t) {
    std::vector<double> grid(traces[t].freq.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      grid[i] = traces[t].freq[i] - cfg.detection.delta_lo;
    auto [sn, window] = floq::converged_spectrum(cfg.system, tone_sets[t], fitted,
                                                 cfg.environment, grid, 1e-6);
    (void)window;
    const SpectrumTrace model = floq::heterodyne_spectrum(sn, cfg.detection);
    for (std::size_t i = 0; i < grid.size(); ++i)
      res_rows.push_back({static_cast<double>(t), floq::rad_to_hz(traces[t].freq[i]),
                          traces[t].values[i], model.values[i],
                          traces[t].values[i] - model.values[i]});
  }
  floq::write_csv(residuals_path(args.out),
                  {"trace", "freq_hz", "s_het", "model", "residual"}, res_rows);
  std::cout << "wrote " << args.out << " (gamma_th "
            << floq::rad_to_hz(fit.gamma_th) << " Hz, g_product "
            << floq::rad2_to_hz2(fit.g_product) << " Hz^2)\n";
  return 0;
}

int fit_cooling(const FitArgs& args) {
  const RunConfig cfg = floq::parse_config_file(args.config);
  const floq::CsvTable table = floq::read_csv(args.data.front());
  if (table.header != std::vector<std::string>{"n_c", "n_bar"})
    throw floq::config_error("cooling data needs header n_c,n_bar");
  std::vector<std::pair<double, double>> points;
  for (const auto& row : table.rows) points.emplace_back(row[0], row[1]);
  const double c0 = floq::cooperativity(cfg.system, 1.0);

  const floq::CoolingFitResult fit = floq::fit_cooling_curve(points, c0);
  require_converged(fit.converged, "cooling-curve fit", fit.residual_norm);

  const double sn = std::sqrt(std::max(0.0, fit.covariance(0, 0)));
  const double sa = std::sqrt(std::max(0.0, fit.covariance(1, 1)));
  const double corr =
      sn > 0.0 && sa > 0.0 ? fit.covariance(0, 1) / (sn * sa) : 0.0;
  ReportRows rows;
  rows.emplace_back("n_th", fit.n_th, sn);
  rows.emplace_back("alpha", fit.alpha, sa);
  rows.emplace_back("alpha_over_c0", fit.alpha / c0, sa / c0);
  rows.emplace_back("c0", c0, 0.0);
  rows.emplace_back("corr_nth_alpha", corr, 0.0);
  rows.emplace_back("residual_norm", fit.residual_norm, 0.0);
  rows.emplace_back("converged", fit.converged ? 1.0 : 0.0, 0.0);
  rows.emplace_back("at_bounds", fit.at_bounds ? 1.0 : 0.0, 0.0);
  floq::write_report_csv(args.out, rows);

  floq::EnvironmentParams fitted;
  fitted.n_th = fit.n_th;
  fitted.alpha_heating = fit.alpha;
  std::vector<std::vector<double>> res_rows;
  for (const auto& [n_c, n_bar] : points) {
    const double model = floq::cooling_occupancy(fitted, c0, n_c);
    res_rows.push_back({n_c, n_bar, model, n_bar - model});
  }
  floq::write_csv(residuals_path(args.out), {"n_c", "n_bar", "model", "residual"},
                  res_rows);
  std::cout << "wrote " << args.out << " (n_th " << fit.n_th << ", alpha " << fit.alpha
            << ")\n";
  return 0;
}

int fit_response_cmd(const FitArgs& args) {
  const floq::CsvTable table = floq::read_csv(args.data.front());
  if (table.header != std::vector<std::string>{"freq_hz", "magnitude"})
    throw floq::config_error("response data needs header freq_hz,magnitude");
  std::vector<std::pair<double, double>> samples;
  for (const auto& row : table.rows) samples.emplace_back(floq::hz_to_rad(row[0]), row[1]);

  const floq::ResponseFit fit = floq::fit_response(samples);
  require_converged(fit.converged, "response fit", fit.residual_norm);

  ReportRows rows;
  for (int i = 0; i < 3; ++i) {
    const double sa = std::sqrt(std::max(0.0, fit.covariance(i, i)));
    rows.emplace_back("amplitude_" + std::to_string(i),
                      fit.stack.amplitude[static_cast<std::size_t>(i)], sa);
  }
  for (int i = 0; i < 3; ++i) {
    const double sc = std::sqrt(std::max(0.0, fit.covariance(3 + i, 3 + i)));
    rows.emplace_back("corner_" + std::to_string(i) + "_hz",
                      floq::rad_to_hz(fit.stack.corner[static_cast<std::size_t>(i)]),
                      floq::rad_to_hz(sc));
  }
  rows.emplace_back("residual_norm", fit.residual_norm, 0.0);
  rows.emplace_back("converged", fit.converged ? 1.0 : 0.0, 0.0);
  rows.emplace_back("degenerate_corners", fit.degenerate_warning ? 1.0 : 0.0, 0.0);
  floq::write_report_csv(args.out, rows);

  std::vector<std::vector<double>> res_rows;
  for (const auto& [w, mag] : samples) {
    const double model = std::abs(floq::response(fit.stack, w));
    res_rows.push_back({floq::rad_to_hz(w), mag, model, mag - model});
  }
  floq::write_csv(residuals_path(args.out), {"freq_hz", "magnitude", "model", "residual"},
                  res_rows);

  if (fit.degenerate_warning)
    std::cerr << "warning: two fitted corners lie within a factor of 2\n";
  std::cout << "wrote " << args.out << " (corners";
  for (double c : fit.stack.corner) std::cout << ' ' << floq::rad_to_hz(c) << " Hz";
  std::cout << ")\n";
  if (!args.config.empty()) {
    const RunConfig cfg = floq::parse_config_file(args.config);
    if (cfg.kerr.g_product > 0.0) {
      const double top = fit.stack.corner[2];
      std::cout << "highest corner " << floq::rad_to_hz(top)
                << " Hz vs thermalization rate " << floq::rad_to_hz(cfg.kerr.gamma_th)
                << " Hz (ratio " << top / cfg.kerr.gamma_th << ")\n";
    }
  }
  return 0;
}

int cmd_fit(const FitArgs& args) {
  if (args.kind == "response") {
    if (args.data.size() != 1)
      throw floq::config_error("response takes exactly one --data file");
    return fit_response_cmd(args);
  }
  if (args.config.empty())
    throw floq::config_error("fit " + args.kind + " needs --config");
  if (args.kind == "kerr-spectra") return fit_kerr_spectra(args);
  if (args.data.size() != 1)
    throw floq::config_error(args.kind + " takes exactly one --data file");
  if (args.kind == "kerr-ratio") return fit_kerr_ratio(args);
  if (args.kind == "cooling") return fit_cooling(args);
  throw floq::config_error("unknown fit kind: " + args.kind);
}

struct CheckArgs {
  std::string config;
  double rel_tol = 1e-3;
  bool debug_flip_conjugate = false;
};

int cmd_check(const CheckArgs& args) {
  RunConfig cfg = floq::parse_config_file(args.config);
  // The blue probe is composed identically on both sides, so the comparison
  // runs on the solved red-side part alone.
  std::erase_if(cfg.tones.tones,
                [](const floq::Tone& t) { return t.role == ToneRole::BlueProbe; });
  const floq::Tone* red = cfg.tones.find(ToneRole::RedProbe);
  const floq::Tone* cool = cfg.tones.find(ToneRole::Cooling);
  if (red == nullptr || cool == nullptr)
    throw floq::config_error("check needs both red-side tones");
  const double gt = floq::gamma_total(cfg.system, cfg.tones);
  const double om = cfg.tones.omega_mod;
  if (!(gt / om > 1e-4)) {
    std::ostringstream msg;
    msg << "instance too stiff for the time-domain check: gamma_tot/omega_mod = "
        << gt / om << " (needs > 1e-4); use a smaller modulation or larger damping";
    throw floq::config_error(msg.str());
  }

  const double delta = cfg.tones.delta_probe;
  const double lo = -delta;
  const double hi = om - delta;
  std::vector<double> grid;
  for (double c : {lo, hi})
    for (double f : {0.0, 0.5, -0.5, 1.5, -1.5, 3.0, -3.0}) grid.push_back(c + f * gt);
  grid.push_back(0.5 * (lo + hi));
  grid.push_back(lo - 0.35 * om);
  grid.push_back(hi + 0.35 * om);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [&](double a, double b) { return std::abs(a - b) < 1e-6 * gt; }),
             grid.end());

  auto [sn, window] = floq::converged_spectrum(
      cfg.system, cfg.tones, cfg.kerr, cfg.environment, grid,
      std::min(cfg.floquet_rel_tol, args.rel_tol / 10.0), cfg.assembly,
      args.debug_flip_conjugate);
  const SpectrumTrace floq_het = floq::heterodyne_spectrum(sn, cfg.detection);

  const SpectrumTrace oracle_sn =
      floq::oracle_spectrum(cfg.system, cfg.tones, cfg.kerr, cfg.environment, grid);
  const SpectrumTrace oracle_het = floq::heterodyne_spectrum(oracle_sn, cfg.detection);

  const floq::CompareReport report =
      floq::compare_spectra(floq_het, oracle_het, args.rel_tol);
  std::cout << "check: window [" << window.opt_lo << "," << window.opt_hi
            << "] x [" << window.mech_lo << "," << window.mech_hi
            << "], max relative deviation " << report.max_rel_dev << " at "
            << floq::rad_to_hz(report.at_freq + cfg.detection.delta_lo)
            << " Hz (tolerance " << args.rel_tol << "): "
            << (report.pass ? "PASS" : "FAIL") << "\n";
  return report.pass ? 0 : 6;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heterodyne noise spectra of multi-tone driven optomechanical cavities"};
  app.require_subcommand(1);

  SpectrumArgs spectrum_args;
  CLI::App* spectrum = app.add_subcommand(
      "spectrum", "compute a heterodyne spectrum and write it as CSV");
  spectrum->add_option("--config", spectrum_args.config, "run configuration file")
      ->required();
  spectrum->add_option("--out", spectrum_args.out, "output CSV path")->required();
  spectrum
      ->add_option("--engine", spectrum_args.engine,
                   "spectrum engine: floquet, three-mode, ideal or oracle")
      ->check(CLI::IsMember({"floquet", "three-mode", "ideal", "oracle"}));
  spectrum->add_option("--noise", spectrum_args.noise,
                       "relative multiplicative noise level");
  spectrum->add_option("--seed", spectrum_args.seed, "noise seed");

  AsymmetryArgs asym_args;
  CLI::App* asym = app.add_subcommand(
      "asymmetry", "fit sideband peaks and report occupancy estimates");
  asym->add_option("--config", asym_args.config, "run configuration file")->required();
  asym->add_option("--out", asym_args.out, "report CSV path")->required();
  asym->add_option("--spectrum", asym_args.spectrum, "measured spectrum CSV");
  asym->add_flag("--synthesize", asym_args.synthesize,
                 "generate the spectrum from the config instead of reading one");
  asym->add_option("--engine", asym_args.engine, "engine used with --synthesize")
      ->check(CLI::IsMember({"ideal", "three-mode", "floquet"}));
  asym->add_option("--noise", asym_args.noise, "relative noise for --synthesize");
  asym->add_option("--seed", asym_args.seed, "noise seed");
  asym->add_option("--tuning-err-hz", asym_args.tuning_err_hz,
                   "cavity tuning error scale used for the ratio systematic");

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "fit model parameters to CSV data");
  fit->add_option("kind", fit_args.kind,
                  "one of kerr-ratio, kerr-spectra, cooling, response")
      ->required()
      ->check(CLI::IsMember({"kerr-ratio", "kerr-spectra", "cooling", "response"}));
  fit->add_option("--config", fit_args.config, "run configuration file");
  fit->add_option("--data", fit_args.data, "input data CSV (repeatable)")->required();
  fit->add_option("--out", fit_args.out, "report CSV path")->required();

  CheckArgs check_args;
  CLI::App* check = app.add_subcommand(
      "check", "compare the lattice solver against the time-domain integrator");
  check->add_option("--config", check_args.config, "run configuration file")->required();
  check->add_option("--rel-tol", check_args.rel_tol, "comparison tolerance")
      ->check(CLI::PositiveNumber);
  check->add_flag("--debug-flip-conjugate", check_args.debug_flip_conjugate,
                  "flip the conjugate modulation coupling (deliberate fault)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (spectrum->parsed()) return cmd_spectrum(spectrum_args);
    if (asym->parsed()) return cmd_asymmetry(asym_args);
    if (fit->parsed()) return cmd_fit(fit_args);
    if (check->parsed()) return cmd_check(check_args);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const floq::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const floq::asymmetry_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const floq::fit_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const floq::solver_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
