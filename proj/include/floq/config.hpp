#ifndef FLOQ_CONFIG_HPP
#define FLOQ_CONFIG_HPP

#include <string>
#include <vector>

#include "floq/floquet.hpp"
#include "floq/model.hpp"

namespace floq {

// Parsed run configuration. Frequencies in the file are Hz (and Hz^2 for the
// thermal coupling product); everything here is already angular.

struct GridSpec {
  double start = 0.0;  // rad/s, heterodyne axis
  double stop = 0.0;
  int points = 4001;
};

// Material inputs for the intrinsic Kerr estimate, when given.
struct KerrEstimateInputs {
  bool given = false;
  double n0 = 0.0;
  double n2 = 0.0;      // m^2/W
  double v_mode = 0.0;  // m^3
};

struct RunConfig {
  SystemParams system;
  ToneSet tones;
  KerrModel kerr;
  KerrEstimateInputs kerr_inputs;
  EnvironmentParams environment;
  DetectionParams detection;
  FloquetConfig floquet;
  double floquet_rel_tol = 1e-6;
  SpectrumAssembly assembly = SpectrumAssembly::Full;
  GridSpec grid;
};

// INI-style parser: [section] headers, key = value lines, # or ; comments.
// Unknown sections or keys, missing required keys, unparseable values and
// physically invalid parameters all raise config errors naming the spot.
RunConfig parse_config_file(const std::string& path);

// The output frequency grid on the heterodyne axis.
std::vector<double> heterodyne_grid(const RunConfig& config);

}  // namespace floq

#endif
