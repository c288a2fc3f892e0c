#pragma once
// Line-oriented run configuration: `key = value` pairs grouped under
// `[section]` headers. '#' and ';' start comments.

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "plasmon/optimizer.hpp"

namespace plasmon {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0, std::string field = {})
      : std::runtime_error(format(what, line, field)), line_(line), field_(std::move(field)) {}

  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  static std::string format(const std::string& what, int line, const std::string& field) {
    std::string s = "config";
    if (line > 0) s += " line " + std::to_string(line);
    if (!field.empty()) s += " [" + field + "]";
    return s + ": " + what;
  }
  int line_;
  std::string field_;
};

/// Out-of-range physical input; maps to the validation exit status.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Scenario { dispersion, sweep, optimize, radiation, hom, check };
enum class OutputFormat { csv, json };

inline std::optional<Scenario> parse_scenario(const std::string& s) {
  if (s == "dispersion") return Scenario::dispersion;
  if (s == "sweep") return Scenario::sweep;
  if (s == "optimize") return Scenario::optimize;
  if (s == "radiation") return Scenario::radiation;
  if (s == "hom") return Scenario::hom;
  if (s == "check") return Scenario::check;
  return std::nullopt;
}

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::dispersion: return "dispersion";
    case Scenario::sweep: return "sweep";
    case Scenario::optimize: return "optimize";
    case Scenario::radiation: return "radiation";
    case Scenario::hom: return "hom";
    case Scenario::check: return "check";
  }
  return "?";
}

/// Raw parsed file: "section.key" -> (value, line).
struct ConfigFile {
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::map<std::string, Entry> entries;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string strip_comment(const std::string& s) {
  const auto p = s.find_first_of("#;");
  return p == std::string::npos ? s : s.substr(0, p);
}

}  // namespace detail

inline ConfigFile parse_config_text(const std::string& text) {
  ConfigFile cf;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = detail::trim(detail::strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("unterminated section header", line);
      section = detail::trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw ConfigError("empty section name", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string value = detail::trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key before '='", line);
    const std::string full = section.empty() ? key : section + "." + key;
    if (value.empty()) throw ConfigError("missing value", line, full);
    if (cf.entries.count(full)) throw ConfigError("duplicate key", line, full);
    cf.entries[full] = {value, line};
  }
  return cf;
}

inline ConfigFile load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

/// Everything a scenario run needs. Angles are degrees and wavelengths are
/// nanometres here; conversion happens when specs are built.
struct RunConfig {
  Scenario scenario = Scenario::check;

  // [interface]
  double lambda0_nm = 1500.0;
  double theta_deg = 0.0;
  double eps_di = 1.0;
  double eps_dj = 1.0;
  double omega_pi_rel = 1.0;
  double omega_pj_rel = 1.0;
  Side input_side = Side::i;

  // [axes]
  std::vector<double> axis_lambda0_nm;
  std::vector<double> axis_theta_deg;
  std::vector<double> axis_eps_di;
  std::vector<double> axis_eps_dj;
  std::vector<double> axis_omega_pi_rel;
  std::vector<double> axis_omega_pj_rel;
  bool refine_near_tir = false;
  int dispersion_points = 200;

  // [optimize]
  Target target;
  SearchSpace space;

  // [output]
  std::string out_path;
  OutputFormat format = OutputFormat::csv;
  bool timestamp = true;
  int n_modes = 200;
  unsigned workers = 0;

  InterfaceSpec spec() const {
    return make_spec({eps_di, eps_dj, omega_pi_rel, omega_pj_rel}, lambda0_nm * 1e-9, deg_to_rad(theta_deg), n_modes);
  }
};

namespace detail {

inline double parse_double(const std::string& v, int line, const std::string& field) {
  double x = 0.0;
  const char* b = v.data();
  const char* e = v.data() + v.size();
  const auto [p, ec] = std::from_chars(b, e, x);
  if (ec != std::errc() || p != e) throw ConfigError("not a number: '" + v + "'", line, field);
  return x;
}

inline int parse_int(const std::string& v, int line, const std::string& field) {
  int x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("not an integer: '" + v + "'", line, field);
  return x;
}

inline bool parse_bool(const std::string& v, int line, const std::string& field) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("not a boolean: '" + v + "'", line, field);
}

/// Either a comma-separated list or an inclusive `start:stop:step` range.
inline std::vector<double> parse_axis(const std::string& v, int line, const std::string& field) {
  std::vector<double> out;
  if (v.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(parse_double(trim(tok), line, field));
    if (parts.size() != 3) throw ConfigError("range must be start:stop:step", line, field);
    const double a = parts[0], b = parts[1], h = parts[2];
    if (!(h > 0.0) || b < a) throw ConfigError("range needs step > 0 and stop >= start", line, field);
    const long n = static_cast<long>(std::floor((b - a) / h + 1e-9));
    if (n > 1000000) throw ConfigError("range has too many points", line, field);
    for (long k = 0; k <= n; ++k) out.push_back(a + k * h);
    return out;
  }
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(parse_double(trim(tok), line, field));
  return out;
}

}  // namespace detail

/// Turns a parsed file into a RunConfig. Unknown keys are errors.
inline RunConfig build_run_config(const ConfigFile& cf) {
  RunConfig rc;
  bool have_scenario = false;
  for (const auto& [key, entry] : cf.entries) {
    const std::string& v = entry.value;
    const int ln = entry.line;
    auto num = [&] { return detail::parse_double(v, ln, key); };
    auto integer = [&] { return detail::parse_int(v, ln, key); };
    auto flag = [&] { return detail::parse_bool(v, ln, key); };
    auto axis = [&] { return detail::parse_axis(v, ln, key); };

    if (key == "scenario") {
      const auto s = parse_scenario(v);
      if (!s) throw ConfigError("unknown scenario '" + v + "'", ln, key);
      rc.scenario = *s;
      have_scenario = true;
    } else if (key == "interface.lambda0_nm") rc.lambda0_nm = num();
    else if (key == "interface.theta_deg") rc.theta_deg = num();
    else if (key == "interface.eps_di") rc.eps_di = num();
    else if (key == "interface.eps_dj") rc.eps_dj = num();
    else if (key == "interface.omega_pi_rel") rc.omega_pi_rel = num();
    else if (key == "interface.omega_pj_rel") rc.omega_pj_rel = num();
    else if (key == "interface.input_side") {
      if (v == "i") rc.input_side = Side::i;
      else if (v == "j") rc.input_side = Side::j;
      else throw ConfigError("input_side must be i or j", ln, key);
    } else if (key == "axes.lambda0_nm") rc.axis_lambda0_nm = axis();
    else if (key == "axes.theta_deg") rc.axis_theta_deg = axis();
    else if (key == "axes.eps_di") rc.axis_eps_di = axis();
    else if (key == "axes.eps_dj") rc.axis_eps_dj = axis();
    else if (key == "axes.omega_pi_rel") rc.axis_omega_pi_rel = axis();
    else if (key == "axes.omega_pj_rel") rc.axis_omega_pj_rel = axis();
    else if (key == "axes.refine_near_tir") rc.refine_near_tir = flag();
    else if (key == "axes.dispersion_points") rc.dispersion_points = integer();
    else if (key == "optimize.target_tau") rc.target.tau = num();
    else if (key == "optimize.target_rho") rc.target.rho = num();
    else if (key == "optimize.lock_metals") rc.space.lock_metals = flag();
    else if (key == "optimize.eps_di_min") rc.space.eps_di.lo = num();
    else if (key == "optimize.eps_di_max") rc.space.eps_di.hi = num();
    else if (key == "optimize.eps_dj_min") rc.space.eps_dj.lo = num();
    else if (key == "optimize.eps_dj_max") rc.space.eps_dj.hi = num();
    else if (key == "optimize.omega_p_min") rc.space.omega_pi_rel.lo = rc.space.omega_pj_rel.lo = num();
    else if (key == "optimize.omega_p_max") rc.space.omega_pi_rel.hi = rc.space.omega_pj_rel.hi = num();
    else if (key == "optimize.coarse_points") rc.space.coarse_points = integer();
    else if (key == "optimize.rounds") rc.space.rounds = integer();
    else if (key == "optimize.shrink") rc.space.shrink = num();
    else if (key == "optimize.sigma_max") rc.space.sigma_max = num();
    else if (key == "optimize.gap_max") rc.space.gap_max = num();
    else if (key == "optimize.balance_tol") rc.space.balance_tol = num();
    else if (key == "output.path") rc.out_path = v;
    else if (key == "output.format") {
      if (v == "csv") rc.format = OutputFormat::csv;
      else if (v == "json") rc.format = OutputFormat::json;
      else throw ConfigError("format must be csv or json", ln, key);
    } else if (key == "output.modes") rc.n_modes = integer();
    else if (key == "output.timestamp") rc.timestamp = flag();
    else if (key == "output.workers") rc.workers = static_cast<unsigned>(integer());
    else throw ConfigError("unknown key", ln, key);
  }
  if (!have_scenario) throw ConfigError("missing 'scenario'", 0, "scenario");
  return rc;
}

inline RunConfig parse_run_config(const std::string& text) { return build_run_config(parse_config_text(text)); }

/// Unit and range checks on the physical inputs.
inline void validate_units(const RunConfig& rc) {
  auto wavelength = [](double nm) {
    if (!(nm > 100.0 && nm < 10000.0))
      throw ValidationError("lambda0 must lie in (100 nm, 10 um), got " + std::to_string(nm) + " nm");
  };
  auto angle = [](double deg) {
    if (!(deg >= 0.0 && deg < 90.0)) throw ValidationError("angle must lie in [0, 90) degrees, got " + std::to_string(deg));
  };
  auto positive = [](double x, const char* what) {
    if (!(x > 0.0)) throw ValidationError(std::string(what) + " must be positive");
  };
  wavelength(rc.lambda0_nm);
  angle(rc.theta_deg);
  for (double l : rc.axis_lambda0_nm) wavelength(l);
  for (double t : rc.axis_theta_deg) angle(t);
  for (double e : rc.axis_eps_di) positive(e, "eps_di");
  for (double e : rc.axis_eps_dj) positive(e, "eps_dj");
  positive(rc.eps_di, "eps_di");
  positive(rc.eps_dj, "eps_dj");
  positive(rc.omega_pi_rel, "omega_pi_rel");
  positive(rc.omega_pj_rel, "omega_pj_rel");
  if (rc.n_modes < 2) throw ValidationError("modes must be at least 2");
  if (rc.dispersion_points < 2) throw ValidationError("dispersion_points must be at least 2");
}

}  // namespace plasmon
