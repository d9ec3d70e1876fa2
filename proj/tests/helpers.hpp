#ifndef FLOQ_TEST_HELPERS_HPP
#define FLOQ_TEST_HELPERS_HPP

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "floq/model.hpp"
#include "floq/units.hpp"

namespace testutil {

// Membrane-in-cavity scale parameters used throughout the tests.
inline floq::SystemParams cavity_params() {
  floq::SystemParams p;
  p.kappa = floq::hz_to_rad(1.6e9);
  p.kappa_ex = p.kappa / 2.0;
  p.omega_m = floq::hz_to_rad(5.3e9);
  p.gamma_m = floq::hz_to_rad(1.5e5);
  p.g0 = floq::hz_to_rad(7.8e5);
  return p;
}

// Smaller instance with slow optical decay, cheap for time-domain runs.
inline floq::SystemParams soft_cavity_params() {
  floq::SystemParams p;
  p.kappa = floq::hz_to_rad(2e7);
  p.kappa_ex = p.kappa / 2.0;
  p.omega_m = floq::hz_to_rad(1e9);
  p.gamma_m = floq::hz_to_rad(1e4);
  p.g0 = floq::hz_to_rad(1e4);
  return p;
}

inline floq::ToneSet two_tone_set(const floq::SystemParams& p, double n_red, double n_cool,
                                  double omega_mod, double delta_probe) {
  floq::ToneSet ts;
  ts.omega_mod = omega_mod;
  ts.delta_probe = delta_probe;
  const double red_detuning = -(p.omega_m + delta_probe);
  ts.tones.push_back(floq::make_tone(floq::ToneRole::RedProbe, red_detuning, n_red));
  ts.tones.push_back(
      floq::make_tone(floq::ToneRole::Cooling, red_detuning + omega_mod, n_cool));
  return ts;
}

inline void add_blue(floq::ToneSet& ts, const floq::SystemParams& p, double n_blue) {
  ts.tones.push_back(floq::make_tone(floq::ToneRole::BlueProbe,
                                     p.omega_m + ts.delta_probe, n_blue));
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  out << body;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Runs the CLI binary with the given argument string; returns the exit code.
// Output streams go to the given file (empty discards them).
inline int run_cli(const std::string& args, const std::string& capture = "") {
  std::string cmd = std::string(FLOQ_CLI_PATH) + " " + args;
  if (capture.empty())
    cmd += " >/dev/null 2>&1";
  else
    cmd += " >" + capture + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WEXITSTATUS(status);
}

}  // namespace testutil

#endif
