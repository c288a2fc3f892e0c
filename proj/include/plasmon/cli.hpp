#pragma once
// Scenario execution behind the command-line tool. Each scenario produces one
// table; writers serialize it as CSV or JSON.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "plasmon/config.hpp"
#include "plasmon/fields.hpp"
#include "plasmon/optimizer.hpp"

namespace plasmon {

enum ExitStatus : int { kExitOk = 0, kExitParse = 1, kExitInfeasible = 2, kExitValidation = 3 };

using Cell = std::variant<double, long, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// 17 significant digits round-trip any binary64 value exactly.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* l = std::get_if<long>(&c)) return std::to_string(*l);
  if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  return std::get<std::string>(c);
}

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_csv(std::ostream& os, const Table& t, bool timestamp) {
  if (timestamp) os << "# generated " << utc_timestamp() << '\n';
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << cell_text(row[c]);
    os << '\n';
  }
}

/// Array of objects keyed by column name. Non-finite numbers become null.
inline nlohmann::ordered_json to_json(const Table& t) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>) {
              if (std::isfinite(v)) obj[t.columns[c]] = v;
              else obj[t.columns[c]] = nullptr;
            } else {
              obj[t.columns[c]] = v;
            }
          },
          row[c]);
    }
    arr.push_back(std::move(obj));
  }
  return arr;
}

inline void write_json(std::ostream& os, const Table& t) { os << to_json(t).dump(2) << '\n'; }

struct RunOutcome {
  int status = kExitOk;
  Table table;
  std::vector<std::string> messages;  // diagnostics for stderr
};

// ---------------------------------------------------------------------------
// Scenarios

namespace scenarios {

// Wavelengths travel through the solver in metres; report them back in the
// nanometres the user typed rather than the nm -> m -> nm round-off.
inline double in_nm(double metres) { return std::round(metres * 1e15) / 1e6; }

template <class T>
std::vector<T> or_default(const std::vector<T>& axis, T fallback) {
  return axis.empty() ? std::vector<T>{fallback} : axis;
}

/// SPP branch below the surface-plasmon frequency and the dielectric light
/// line bounding the radiation band, in units of the side-i plasma frequency.
inline RunOutcome dispersion(const RunConfig& rc) {
  RunOutcome out;
  out.table.columns = {"eps_d", "omega_rel", "k_spp_rel", "k_light_rel"};
  const double wp = rc.omega_pi_rel;  // internal frequencies are in units of silver's omega_p
  const auto eps_axis = rc.axis_eps_di.empty() ? std::vector<double>{1.0, 3.0} : rc.axis_eps_di;
  const int n = rc.dispersion_points;
  for (double ed : eps_axis) {
    const double w_sp = wp / std::sqrt(1.0 + ed);
    for (int k = 1; k <= n; ++k) {
      const double w = w_sp * k / (n + 1.0);
      const double em = drude_epsilon(w, wp);
      out.table.rows.push_back({ed, w / wp, spp_wavenumber(w, ed, em) / wp, w * std::sqrt(ed) / wp});
    }
  }
  return out;
}

inline RunOutcome sweep(const RunConfig& rc) {
  RunOutcome out;
  out.table.columns = {"lambda0_nm", "theta_i_deg", "eps_di", "eps_dj", "omega_pi_rel", "omega_pj_rel", "theta_t_deg",
                       "tau", "rho", "sigma", "tau_rev", "rho_rev", "sigma_rev", "conservation_residual"};

  SweepAxes base;
  base.lambda0_m.clear();
  for (double l : or_default(rc.axis_lambda0_nm, rc.lambda0_nm)) base.lambda0_m.push_back(l * 1e-9);
  base.eps_di = or_default(rc.axis_eps_di, rc.eps_di);
  base.eps_dj = or_default(rc.axis_eps_dj, rc.eps_dj);
  base.omega_pi_rel = or_default(rc.axis_omega_pi_rel, rc.omega_pi_rel);
  base.omega_pj_rel = or_default(rc.axis_omega_pj_rel, rc.omega_pj_rel);
  base.theta_deg = or_default(rc.axis_theta_deg, rc.theta_deg);
  base.n_modes = rc.n_modes;
  base.workers = rc.workers;

  std::vector<SweepTable> parts;
  if (!rc.refine_near_tir || base.theta_deg.size() < 2) {
    parts.push_back(plasmon::sweep(base));
  } else {
    // Each material point gets its own angle grid, refined below its own
    // stopping angle.
    const double lo = base.theta_deg.front(), hi = base.theta_deg.back();
    const double step = base.theta_deg[1] - base.theta_deg[0];
    for (double l : base.lambda0_m)
      for (double ei : base.eps_di)
        for (double ej : base.eps_dj)
          for (double wi : base.omega_pi_rel)
            for (double wj : base.omega_pj_rel) {
              SweepAxes one = base;
              one.lambda0_m = {l};
              one.eps_di = {ei};
              one.eps_dj = {ej};
              one.omega_pi_rel = {wi};
              one.omega_pj_rel = {wj};
              const auto s = make_spec({ei, ej, wi, wj}, l, 0.0, rc.n_modes);
              const double crit = rad_to_deg(std::min(tir_critical_angle(s), radiation_cutoff_angle(s)));
              one.theta_deg = refine_theta_grid(lo, hi, step, crit);
              parts.push_back(plasmon::sweep(one));
            }
  }

  std::size_t skipped = 0;
  for (const auto& part : parts) {
    for (const auto& r : part.rows) {
      const auto& c = r.eval.coeffs;
      out.table.rows.push_back({in_nm(r.lambda0), r.theta_deg, r.material.eps_di, r.material.eps_dj,
                                r.material.omega_pi_rel, r.material.omega_pj_rel, rad_to_deg(c.theta_t), c.tau, c.rho,
                                c.sigma, c.tau_r, c.rho_r, c.sigma_r, c.conservation_residual()});
      if (c.conservation_warning)
        out.messages.push_back("warning: conservation residual " + format_double(c.conservation_residual()) +
                               " at theta " + format_double(r.theta_deg));
    }
    for (const auto& r : part.skipped) {
      ++skipped;
      out.messages.push_back("skipped theta " + format_double(r.theta_deg) + " eps_di " +
                             format_double(r.material.eps_di) + ": " + to_string(r.eval.reason));
    }
  }
  if (skipped) out.messages.push_back(std::to_string(skipped) + " point(s) skipped");
  return out;
}

inline RunOutcome optimize(const RunConfig& rc) {
  RunOutcome out;
  out.table.columns = {"lambda0_nm", "theta_i_deg", "eps_di", "eps_dj", "omega_pi_rel", "omega_pj_rel", "tau", "rho",
                       "sigma", "max_reciprocity_gap", "constraints_met", "feasible", "objective"};
  SearchSpace space = rc.space;
  space.n_modes = rc.n_modes;
  space.workers = rc.workers;
  space.theta_deg = or_default(rc.axis_theta_deg, rc.theta_deg);
  space.lambda0_m.clear();
  for (double l : or_default(rc.axis_lambda0_nm, rc.lambda0_nm)) space.lambda0_m.push_back(l * 1e-9);

  const auto res = plasmon::optimize(rc.target, space);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : res.records) {
    if (!r.evaluated) {
      out.table.rows.push_back({in_nm(r.lambda0), r.theta_deg, nan, nan, nan, nan, nan, nan, nan, nan, false, false, nan});
      continue;
    }
    const auto& c = r.coeffs;
    out.table.rows.push_back({in_nm(r.lambda0), r.theta_deg, r.material.eps_di, r.material.eps_dj,
                              r.material.omega_pi_rel, r.material.omega_pj_rel, c.tau, c.rho, c.sigma,
                              reciprocity_report(c).max(), r.constraints_met, r.feasible, r.objective});
  }
  if (!res.feasible()) {
    out.status = kExitInfeasible;
    out.messages.push_back("no feasible configuration at any angle");
  }
  return out;
}

inline RunOutcome radiation(const RunConfig& rc) {
  RunOutcome out;
  out.table.columns = {"side", "polarization", "node", "q_over_k0", "ky_over_k0", "re_kx_over_k0", "im_kx_over_k0",
                       "power_fraction", "normalized_power"};
  const auto pat = radiation_pattern(rc.spec(), rc.input_side);
  const double k0 = pat.omega;
  for (const auto& e : pat.entries) {
    out.table.rows.push_back({std::string(e.side == Side::i ? "i" : "j"),
                              std::string(e.polarization == Polarization::tm ? "TM" : "TE"), static_cast<long>(e.node),
                              e.q / k0, e.k_y / k0, e.k_x.real() / k0, e.k_x.imag() / k0, e.power_fraction,
                              e.normalized_power});
  }
  return out;
}

inline RunOutcome hom(const RunConfig& rc) {
  RunOutcome out;
  out.table.columns = {"theta_i_deg", "tau", "rho", "sigma", "p_coincidence"};
  SweepAxes axes;
  axes.lambda0_m = {rc.lambda0_nm * 1e-9};
  axes.eps_di = {rc.eps_di};
  axes.eps_dj = {rc.eps_dj};
  axes.omega_pi_rel = {rc.omega_pi_rel};
  axes.omega_pj_rel = {rc.omega_pj_rel};
  axes.theta_deg = or_default(rc.axis_theta_deg, rc.theta_deg);
  axes.n_modes = rc.n_modes;
  axes.workers = rc.workers;
  const auto table = plasmon::sweep(axes);
  for (const auto& r : table.rows) {
    const auto& c = r.eval.coeffs;
    out.table.rows.push_back({r.theta_deg, c.tau, c.rho, c.sigma, hom_coincidence(c)});
  }
  for (const auto& r : table.skipped)
    out.messages.push_back("skipped theta " + format_double(r.theta_deg) + ": " + to_string(r.eval.reason));
  return out;
}

struct CheckItem {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double limit = 0.0;
};

/// Fast invariant suite on the configured interface plus fixed reference
/// points. Fails with the validation status if any item fails.
inline std::vector<CheckItem> run_checks(const RunConfig& rc) {
  std::vector<CheckItem> items;
  auto add = [&](std::string name, double value, double limit, bool le = true) {
    items.push_back({std::move(name), le ? value <= limit : value >= limit, value, limit});
  };

  {
    const auto g = gauss_legendre(rc.n_modes);
    double s = 0.0;
    for (double w : g.weights) s += w;
    add("quadrature weights sum to 2", std::abs(s - 2.0), 1e-12);
  }
  {
    auto s = make_spec({1.7, 1.7, 1.0, 1.0}, rc.lambda0_nm * 1e-9, deg_to_rad(30.0), rc.n_modes);
    const auto c = forward_coefficients(spp_response(s));
    add("identity interface transmits fully", 1.0 - c.tau, 1e-6);
  }
  {
    const auto s = rc.spec();
    if (screen(s) == SkipReason::none) {
      const auto c = extract_coefficients(s);
      add("conservation at configured point", std::abs(c.conservation_residual()), 0.02);
      add("reciprocity gap at configured point (informational limit)", reciprocity_report(c).max(), 1.0);
    } else {
      items.push_back({std::string("configured point screened out: ") + to_string(screen(s)), false, 0.0, 0.0});
    }
  }
  {
    const double w = omega_from_wavelength(rc.lambda0_nm * 1e-9);
    const auto m = Medium::at({1.8, kOmegaPSilver}, w);
    const auto sk = spp_kinematics(m, 1.0, deg_to_rad(25.0));
    const auto spp = Mode::spp(m, sk);
    const double q = 0.4 * w * std::sqrt(m.eps_d);
    const auto rk = radiation_kinematics(m, q, sk.k_y);
    const auto tm = Mode::radiation(ModeKind::tm, m, rk);
    const auto te = Mode::radiation(ModeKind::te, m, rk);
    double worst = 0.0;
    for (const auto& md : {spp, tm, te}) worst = std::max(worst, std::abs(self_overlap(md) - 1.0));
    add("mode normalization", worst, 1e-6);
    const double cross = std::max(std::abs(reciprocity_overlap(spp, tm).regular), std::abs(reciprocity_overlap(spp, te).regular));
    add("SPP-radiation orthogonality", cross, 1e-6);
  }
  {
    auto s = make_spec({2.0, 1.0, 1.0, 1.0}, rc.lambda0_nm * 1e-9, deg_to_rad(20.0), rc.n_modes);
    const double ki = spp_kinematics(s, Side::i, 0.0).k, kj = spp_kinematics(s, Side::j, 0.0).k;
    const double oracle = std::asin(ki * std::sin(s.theta_ii) / kj);
    add("matched angle equals k_y conservation", std::abs(matched_incidence_angle(s) - oracle), 1e-9);
  }
  {
    auto s = make_spec({2.0, 1.0, 1.0, 1.0}, rc.lambda0_nm * 1e-9, 0.0, rc.n_modes);
    const auto c = forward_coefficients(spp_response(s));
    add("no TE scattering at normal incidence", c.sigma_te, 1e-20);
  }
  {
    auto a = make_spec({2.0, 1.0, 1.0, 1.0}, 1500e-9, 0.0, 8);
    auto b = make_spec({1.0, 2.0, 1.0, 1.0}, 1500e-9, 0.0, 8);
    const bool ok = phase_rule(a) == 0.0 && phase_rule(b) == kPi;
    items.push_back({"phase rule follows eps_d ordering", ok, ok ? 1.0 : 0.0, 1.0});
  }
  return items;
}

inline RunOutcome check(const RunConfig& rc) {
  RunOutcome out;
  out.table.columns = {"check", "passed", "value", "limit"};
  bool all = true;
  for (const auto& it : run_checks(rc)) {
    out.table.rows.push_back({it.name, it.passed, it.value, it.limit});
    all = all && it.passed;
  }
  if (!all) out.status = kExitValidation;
  return out;
}

}  // namespace scenarios

/// Validates units and dispatches on the scenario. Throws ValidationError,
/// TirError or InvalidSpecError for unusable physical input.
inline RunOutcome run(const RunConfig& rc) {
  validate_units(rc);
  switch (rc.scenario) {
    case Scenario::dispersion: return scenarios::dispersion(rc);
    case Scenario::sweep: return scenarios::sweep(rc);
    case Scenario::optimize: return scenarios::optimize(rc);
    case Scenario::radiation: return scenarios::radiation(rc);
    case Scenario::hom: return scenarios::hom(rc);
    case Scenario::check: return scenarios::check(rc);
  }
  return {};
}

}  // namespace plasmon
