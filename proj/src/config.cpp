#include "floq/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "floq/errors.hpp"
#include "floq/trace.hpp"
#include "floq/units.hpp"

namespace floq {
namespace {

struct RawEntry {
  std::string value;
  std::size_t line = 0;
  bool used = false;
};

using Section = std::map<std::string, RawEntry>;

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& s) {
  std::size_t pos = s.find_first_of("#;");
  return pos == std::string::npos ? s : s.substr(0, pos);
}

class ConfigReader {
 public:
  explicit ConfigReader(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      line = trim(strip_comment(line));
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          fail(line_no, "unterminated section header '" + line + "'");
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty()) fail(line_no, "empty section name");
        sections_[section];
        continue;
      }
      std::size_t eq = line.find('=');
      if (eq == std::string::npos) fail(line_no, "expected key = value, got '" + line + "'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) fail(line_no, "empty key");
      if (section.empty()) fail(line_no, "key '" + key + "' outside any section");
      auto [it, fresh] = sections_[section].insert({key, RawEntry{value, line_no, false}});
      if (!fresh) fail(line_no, "duplicate key '" + key + "' in [" + section + "]");
    }
  }

  bool has_section(const std::string& name) const {
    return sections_.count(name) != 0;
  }

  bool has_key(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) != 0;
  }

  std::string raw(const std::string& section, const std::string& key) {
    auto sit = sections_.find(section);
    if (sit == sections_.end() || sit->second.count(key) == 0)
      throw config_error("missing required key '" + key + "' in [" + section + "]");
    RawEntry& e = sit->second.at(key);
    e.used = true;
    return e.value;
  }

  double number(const std::string& section, const std::string& key) {
    const std::string v = raw(section, key);
    const char* begin = v.c_str();
    char* end = nullptr;
    const double x = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
      throw config_error("key '" + key + "' in [" + section + "]: '" + v +
                         "' is not a number");
    return x;
  }

  double number_or(const std::string& section, const std::string& key, double fallback) {
    return has_key(section, key) ? number(section, key) : fallback;
  }

  long integer(const std::string& section, const std::string& key) {
    const std::string v = raw(section, key);
    const char* begin = v.c_str();
    char* end = nullptr;
    const long x = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0')
      throw config_error("key '" + key + "' in [" + section + "]: '" + v +
                         "' is not an integer");
    return x;
  }

  long integer_or(const std::string& section, const std::string& key, long fallback) {
    return has_key(section, key) ? integer(section, key) : fallback;
  }

  bool boolean_or(const std::string& section, const std::string& key, bool fallback) {
    if (!has_key(section, key)) return fallback;
    const std::string v = raw(section, key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw config_error("key '" + key + "' in [" + section + "]: '" + v +
                       "' is not a boolean");
  }

  std::string text_or(const std::string& section, const std::string& key,
                      const std::string& fallback) {
    return has_key(section, key) ? raw(section, key) : fallback;
  }

  void finish(const std::set<std::string>& known_sections) {
    for (const auto& [name, entries] : sections_) {
      if (known_sections.count(name) == 0)
        throw config_error("unknown section [" + name + "]");
      for (const auto& [key, entry] : entries) {
        if (!entry.used) {
          std::ostringstream msg;
          msg << "unknown key '" << key << "' in [" << name << "] (line " << entry.line
              << ")";
          throw config_error(msg.str());
        }
      }
    }
  }

 private:
  [[noreturn]] void fail(std::size_t line_no, const std::string& what) {
    std::ostringstream msg;
    msg << "config line " << line_no << ": " << what;
    throw config_error(msg.str());
  }

  std::map<std::string, Section> sections_;
};

}  // namespace

RunConfig parse_config_file(const std::string& path) {
  ConfigReader reader(path);
  RunConfig cfg;

  cfg.system.kappa = hz_to_rad(reader.number("system", "kappa_hz"));
  cfg.system.kappa_ex =
      hz_to_rad(reader.number_or("system", "kappa_ex_hz",
                                 rad_to_hz(cfg.system.kappa / 2.0)));
  cfg.system.omega_m = hz_to_rad(reader.number("system", "omega_m_hz"));
  cfg.system.gamma_m = hz_to_rad(reader.number("system", "gamma_m_hz"));
  cfg.system.g0 = hz_to_rad(reader.number("system", "g0_hz"));
  cfg.system.omega_cav = hz_to_rad(reader.number_or("system", "omega_cav_hz", 0.0));

  cfg.tones.omega_mod = hz_to_rad(reader.number_or("system", "omega_mod_hz", 0.0));
  cfg.tones.delta_probe = hz_to_rad(reader.number_or("system", "delta_probe_hz", 0.0));
  cfg.tones.residual_detuning =
      hz_to_rad(reader.number_or("system", "residual_detuning_hz", 0.0));

  const double red_default = -(cfg.system.omega_m + cfg.tones.delta_probe);
  const double blue_default = cfg.system.omega_m + cfg.tones.delta_probe;

  if (reader.has_section("tones.red")) {
    const double n = reader.number("tones.red", "n_photons");
    const double det = reader.has_key("tones.red", "detuning_hz")
                           ? hz_to_rad(reader.number("tones.red", "detuning_hz"))
                           : red_default;
    cfg.tones.tones.push_back(make_tone(ToneRole::RedProbe, det, n));
  }
  if (reader.has_section("tones.cooling")) {
    const double n = reader.number("tones.cooling", "n_photons");
    const double det = reader.has_key("tones.cooling", "detuning_hz")
                           ? hz_to_rad(reader.number("tones.cooling", "detuning_hz"))
                           : red_default + cfg.tones.omega_mod;
    cfg.tones.tones.push_back(make_tone(ToneRole::Cooling, det, n));
  }
  if (reader.has_section("tones.blue")) {
    const double n = reader.number("tones.blue", "n_photons");
    const double det = reader.has_key("tones.blue", "detuning_hz")
                           ? hz_to_rad(reader.number("tones.blue", "detuning_hz"))
                           : blue_default;
    cfg.tones.tones.push_back(make_tone(ToneRole::BlueProbe, det, n));
  }

  if (reader.has_section("kerr")) {
    cfg.kerr.gamma_th = hz_to_rad(reader.number("kerr", "gamma_th_hz"));
    cfg.kerr.g_product = hz2_to_rad2(reader.number_or("kerr", "g_product_hz2", 0.0));
    cfg.kerr.g_kerr = hz_to_rad(reader.number_or("kerr", "g_kerr_hz", 0.0));
    if (reader.has_key("kerr", "n0") || reader.has_key("kerr", "n2_m2_per_w") ||
        reader.has_key("kerr", "v_mode_m3")) {
      cfg.kerr_inputs.given = true;
      cfg.kerr_inputs.n0 = reader.number("kerr", "n0");
      cfg.kerr_inputs.n2 = reader.number("kerr", "n2_m2_per_w");
      cfg.kerr_inputs.v_mode = reader.number("kerr", "v_mode_m3");
    }
  } else {
    // Inert nonlinearity: zero coupling with a harmless relaxation rate.
    cfg.kerr.gamma_th = 1.0;
    cfg.kerr.g_product = 0.0;
    cfg.kerr.g_kerr = 0.0;
  }

  if (reader.has_section("environment")) {
    cfg.environment.n_th = reader.number_or("environment", "n_th", 0.0);
    cfg.environment.alpha_heating =
        reader.number_or("environment", "alpha_heating", 0.0);
    cfg.environment.pressure_label =
        reader.text_or("environment", "pressure_label", "");
  }

  if (reader.has_section("detection")) {
    cfg.detection.eta_set = reader.has_key("detection", "eta");
    cfg.detection.eta = reader.number_or("detection", "eta", 1.0);
    cfg.detection.delta_lo = hz_to_rad(reader.number_or("detection", "delta_lo_hz", 0.0));
  } else {
    cfg.detection.eta_set = false;
  }

  if (reader.has_section("floquet")) {
    cfg.floquet.opt_lo =
        static_cast<int>(reader.integer_or("floquet", "opt_min", cfg.floquet.opt_lo));
    cfg.floquet.opt_hi =
        static_cast<int>(reader.integer_or("floquet", "opt_max", cfg.floquet.opt_hi));
    cfg.floquet.mech_lo =
        static_cast<int>(reader.integer_or("floquet", "mech_min", cfg.floquet.mech_lo));
    cfg.floquet.mech_hi =
        static_cast<int>(reader.integer_or("floquet", "mech_max", cfg.floquet.mech_hi));
    cfg.floquet.debug_flip_conjugate =
        reader.boolean_or("floquet", "debug_flip_conjugate", false);
    cfg.floquet_rel_tol = reader.number_or("floquet", "rel_tol", cfg.floquet_rel_tol);
    const std::string assembly = reader.text_or("floquet", "assembly", "full");
    if (assembly == "full")
      cfg.assembly = SpectrumAssembly::Full;
    else if (assembly == "diagonal")
      cfg.assembly = SpectrumAssembly::DiagonalOnly;
    else
      throw config_error("key 'assembly' in [floquet] must be full or diagonal");
  }

  validate(cfg.system);
  validate(cfg.tones, cfg.system);

  double default_span = 1.5 * cfg.tones.omega_mod;
  if (default_span <= 0.0) default_span = 30.0 * gamma_total(cfg.system, cfg.tones);
  cfg.grid.start = -default_span;
  cfg.grid.stop = default_span;
  if (reader.has_section("grid")) {
    cfg.grid.start = hz_to_rad(reader.number_or("grid", "start_hz", rad_to_hz(cfg.grid.start)));
    cfg.grid.stop = hz_to_rad(reader.number_or("grid", "stop_hz", rad_to_hz(cfg.grid.stop)));
    cfg.grid.points = static_cast<int>(reader.integer_or("grid", "points", cfg.grid.points));
  }

  reader.finish({"system", "tones.red", "tones.cooling", "tones.blue", "kerr",
                 "environment", "detection", "floquet", "grid"});

  validate(cfg.kerr);
  validate(cfg.environment);
  validate(cfg.detection);
  if (!(cfg.floquet_rel_tol > 0.0))
    throw config_error("key 'rel_tol' in [floquet] must be positive");
  if (cfg.grid.points < 2) throw config_error("key 'points' in [grid] must be at least 2");
  if (!(cfg.grid.stop > cfg.grid.start))
    throw config_error("[grid] stop_hz must exceed start_hz");
  return cfg;
}

std::vector<double> heterodyne_grid(const RunConfig& config) {
  return linspace(config.grid.start, config.grid.stop, config.grid.points);
}

}  // namespace floq
