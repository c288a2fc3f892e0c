#pragma once
// Parameter sweeps and the constrained target-ratio search.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "plasmon/parallel.hpp"
#include "plasmon/splitter.hpp"

namespace plasmon {

inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

/// Material point of the search; plasma frequencies in units of silver's.
struct MaterialPoint {
  double eps_di = 1.0;
  double eps_dj = 1.0;
  double omega_pi_rel = 1.0;
  double omega_pj_rel = 1.0;
};

inline InterfaceSpec make_spec(const MaterialPoint& p, double lambda0, double theta_rad, int n_modes) {
  InterfaceSpec s;
  s.side_i = {p.eps_di, p.omega_pi_rel * kOmegaPSilver};
  s.side_j = {p.eps_dj, p.omega_pj_rel * kOmegaPSilver};
  s.lambda0 = lambda0;
  s.theta_ii = theta_rad;
  s.n_modes = n_modes;
  return s;
}

enum class SkipReason { none, tir, radiation_cutoff, singular, invalid };

inline const char* to_string(SkipReason r) {
  switch (r) {
    case SkipReason::none: return "ok";
    case SkipReason::tir: return "tir";
    case SkipReason::radiation_cutoff: return "radiation_cutoff";
    case SkipReason::singular: return "singular";
    case SkipReason::invalid: return "invalid";
  }
  return "?";
}

/// Classifies a spec before any matrix work. Points at or past the angle where
/// one side loses its propagating surface radiation are treated like TIR: the
/// computation stops there.
inline SkipReason screen(const InterfaceSpec& spec) {
  try {
    detail::validate(spec);
    if (spec.theta_ii >= tir_critical_angle(spec)) return SkipReason::tir;
    if (spec.theta_ii >= radiation_cutoff_angle(spec)) return SkipReason::radiation_cutoff;
    transmitted_angle(spec);
  } catch (const TirError&) {
    return SkipReason::tir;
  } catch (const std::exception&) {
    return SkipReason::invalid;
  }
  return SkipReason::none;
}

struct Evaluation {
  SkipReason reason = SkipReason::invalid;
  std::string detail;
  SplitterCoefficients coeffs;

  bool ok() const { return reason == SkipReason::none; }
};

inline Evaluation evaluate(const InterfaceSpec& spec) {
  Evaluation e;
  e.reason = screen(spec);
  if (!e.ok()) return e;
  try {
    e.coeffs = extract_coefficients(spec);
  } catch (const TirError& ex) {
    e.reason = SkipReason::tir;
    e.detail = ex.what();
  } catch (const SingularBracketError& ex) {
    e.reason = SkipReason::singular;
    e.detail = ex.what();
  } catch (const std::exception& ex) {
    e.reason = SkipReason::invalid;
    e.detail = ex.what();
  }
  return e;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepAxes {
  std::vector<double> lambda0_m{1500e-9};
  std::vector<double> theta_deg{0.0};
  std::vector<double> eps_di{1.0};
  std::vector<double> eps_dj{1.0};
  std::vector<double> omega_pi_rel{1.0};
  std::vector<double> omega_pj_rel{1.0};
  int n_modes = 200;
  unsigned workers = 0;
};

struct SweepRow {
  double lambda0 = 0.0;
  double theta_deg = 0.0;
  MaterialPoint material;
  Evaluation eval;
};

struct SweepTable {
  std::vector<SweepRow> rows;     // evaluated points, in axis order
  std::vector<SweepRow> skipped;  // screened out or failed, with reason codes
};

/// Dense table over the Cartesian product of the axes. Loop order, outermost
/// first: lambda0, eps_di, eps_dj, omega_pi, omega_pj, theta.
inline SweepTable sweep(const SweepAxes& axes) {
  std::vector<SweepRow> all;
  for (double l : axes.lambda0_m)
    for (double ei : axes.eps_di)
      for (double ej : axes.eps_dj)
        for (double wi : axes.omega_pi_rel)
          for (double wj : axes.omega_pj_rel)
            for (double t : axes.theta_deg) {
              SweepRow r;
              r.lambda0 = l;
              r.theta_deg = t;
              r.material = {ei, ej, wi, wj};
              all.push_back(r);
            }
  parallel_for(
      all.size(),
      [&](std::size_t k) {
        auto& r = all[k];
        r.eval = evaluate(make_spec(r.material, r.lambda0, deg_to_rad(r.theta_deg), axes.n_modes));
      },
      axes.workers);

  SweepTable table;
  for (auto& r : all) (r.eval.ok() ? table.rows : table.skipped).push_back(std::move(r));
  return table;
}

/// Uniform angle grid on [start, stop] with the step reduced to at most
/// fine_step inside the band of width `band` below the critical angle.
inline std::vector<double> refine_theta_grid(double start_deg, double stop_deg, double step_deg,
                                             double critical_deg, double band_deg = 5.0,
                                             double fine_step_deg = 0.1) {
  if (!(step_deg > 0.0) || !(fine_step_deg > 0.0) || stop_deg < start_deg)
    throw std::invalid_argument("refine_theta_grid: bad range or step");
  std::vector<double> out;
  const double fine_from = critical_deg - band_deg;
  double t = start_deg;
  while (t <= stop_deg + 1e-12) {
    out.push_back(t);
    const double step = (t >= fine_from - 1e-12) ? std::min(step_deg, fine_step_deg) : step_deg;
    double next = t + step;
    if (t < fine_from && next > fine_from) next = fine_from;
    t = next;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Target-ratio search

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  bool fixed() const { return !(hi > lo); }
  double clamp(double x) const { return std::clamp(x, lo, hi); }
};

struct SearchSpace {
  Range eps_di{1.0, 3.0};
  Range eps_dj{1.0, 1.0};
  Range omega_pi_rel{1.0, 2.0};
  Range omega_pj_rel{1.0, 2.0};
  bool lock_metals = true;  // both plasma frequencies pinned to silver
  std::vector<double> theta_deg;
  std::vector<double> lambda0_m{1500e-9};
  int n_modes = 200;

  int coarse_points = 25;
  int rounds = 3;
  double shrink = 5.0;

  double sigma_max = 0.05;
  double gap_max = 0.025;
  double balance_tol = 0.02;  // allowed |(tau - rho) - (tau* - rho*)| for the target to count as reached
  unsigned workers = 0;

  void validate() const {
    if (theta_deg.empty() || lambda0_m.empty()) throw std::invalid_argument("search space: empty angle or wavelength list");
    if (coarse_points < 2 || rounds < 0 || !(shrink > 1.0))
      throw std::invalid_argument("search space: bad coarse_points, rounds or shrink");
    for (const Range* r : {&eps_di, &eps_dj, &omega_pi_rel, &omega_pj_rel})
      if (r->hi < r->lo) throw std::invalid_argument("search space: range with hi < lo");
    if (eps_di.lo < 1.0 || eps_dj.lo < 1.0) throw std::invalid_argument("search space: eps_d below 1");
  }
};

struct Target {
  double tau = 0.5;
  double rho = 0.5;
};

struct OptimizationRecord {
  double lambda0 = 0.0;
  double theta_deg = 0.0;
  MaterialPoint material;
  SplitterCoefficients coeffs;
  bool constraints_met = false;  // sigma and reciprocity limits hold
  bool feasible = false;         // constraints met and the target split reached
  bool evaluated = false;        // false when no point at this angle was valid
  double objective = 0.0;
  int evaluations = 0;
};

struct OptimizationResult {
  std::vector<OptimizationRecord> records;

  bool feasible() const {
    return std::any_of(records.begin(), records.end(), [](const auto& r) { return r.feasible; });
  }

  /// Feasible record with the lowest objective.
  std::optional<OptimizationRecord> best() const {
    std::optional<OptimizationRecord> b;
    for (const auto& r : records)
      if (r.feasible && (!b || r.objective < b->objective)) b = r;
    return b;
  }
};

inline double objective(const SplitterCoefficients& c, const Target& t) {
  return std::abs(c.tau - t.tau) + std::abs(c.rho - t.rho);
}

inline bool satisfies_constraints(const SplitterCoefficients& c, double sigma_max, double gap_max) {
  return c.sigma <= sigma_max && reciprocity_report(c).max() <= gap_max;
}

inline double balance_error(const SplitterCoefficients& c, const Target& t) {
  return std::abs((c.tau - c.rho) - (t.tau - t.rho));
}

namespace detail {

struct Probe {
  MaterialPoint p;
  Evaluation e;
  double penalized = 0.0;
  bool constrained = false;  // within the sigma and reciprocity limits
};

class AngleSearch {
 public:
  AngleSearch(const SearchSpace& s, const Target& t, double lambda0, double theta_deg)
      : s_(s), t_(t), lambda0_(lambda0), theta_(deg_to_rad(theta_deg)) {}

  OptimizationRecord run(double theta_deg) {
    OptimizationRecord rec;
    rec.lambda0 = lambda0_;
    rec.theta_deg = theta_deg;

    coarse();
    if (best_any_) descend();

    rec.evaluations = evaluations_;
    const Probe* pick = best_constrained_ ? &*best_constrained_ : (best_any_ ? &*best_any_ : nullptr);
    if (pick) {
      rec.evaluated = true;
      rec.material = pick->p;
      rec.coeffs = pick->e.coeffs;
      rec.constraints_met = pick->constrained;
      rec.feasible = pick->constrained && balance_error(pick->e.coeffs, t_) <= s_.balance_tol;
      rec.objective = objective(pick->e.coeffs, t_);
    }
    return rec;
  }

 private:
  enum Axis { kEpsI, kEpsJ, kWpI, kWpJ };

  const Range& range(int a) const {
    switch (a) {
      case kEpsI: return s_.eps_di;
      case kEpsJ: return s_.eps_dj;
      case kWpI: return s_.omega_pi_rel;
      default: return s_.omega_pj_rel;
    }
  }
  static double& coord(MaterialPoint& p, int a) {
    switch (a) {
      case kEpsI: return p.eps_di;
      case kEpsJ: return p.eps_dj;
      case kWpI: return p.omega_pi_rel;
      default: return p.omega_pj_rel;
    }
  }
  bool metal_axis(int a) const { return a == kWpI || a == kWpJ; }
  bool free_axis(int a) const { return !(metal_axis(a) && s_.lock_metals) && !range(a).fixed(); }
  double fixed_value(int a) const { return metal_axis(a) && s_.lock_metals ? 1.0 : range(a).lo; }

  InterfaceSpec spec(const MaterialPoint& p) const { return make_spec(p, lambda0_, theta_, s_.n_modes); }
  bool valid(const MaterialPoint& p) const { return screen(spec(p)) == SkipReason::none; }

  /// Largest eps_di in range keeping the point valid, assuming validity is
  /// lost monotonically as eps_di grows. Empty when eps_di.lo is invalid.
  std::optional<double> eps_upper(MaterialPoint p) const {
    const Range& r = s_.eps_di;
    p.eps_di = r.hi;
    if (valid(p)) return r.hi;
    p.eps_di = r.lo;
    if (!valid(p)) return std::nullopt;
    double good = r.lo, bad = r.hi;
    for (int it = 0; it < 60 && bad - good > 1e-12 * bad; ++it) {
      p.eps_di = 0.5 * (good + bad);
      (valid(p) ? good : bad) = p.eps_di;
    }
    return good;
  }

  Probe probe(const MaterialPoint& p) const {
    Probe pr;
    pr.p = p;
    pr.e = evaluate(spec(p));
    if (pr.e.ok()) {
      const auto& c = pr.e.coeffs;
      const double excess = std::max(0.0, c.sigma - s_.sigma_max) +
                            std::max(0.0, reciprocity_report(c).max() - s_.gap_max);
      pr.penalized = objective(c, t_) + 10.0 * excess;
      pr.constrained = excess == 0.0;
    }
    return pr;
  }

  void record(const Probe& pr) {
    ++evaluations_;
    if (!pr.e.ok()) return;
    if (!best_any_ || pr.penalized < best_any_->penalized) best_any_ = pr;
    if (pr.constrained &&
        (!best_constrained_ || objective(pr.e.coeffs, t_) < objective(best_constrained_->e.coeffs, t_)))
      best_constrained_ = pr;
  }

  std::vector<double> axis_values(int a) const {
    if (!free_axis(a)) return {fixed_value(a)};
    const Range& r = range(a);
    std::vector<double> v(s_.coarse_points);
    for (int k = 0; k < s_.coarse_points; ++k) v[k] = r.lo + (r.hi - r.lo) * k / (s_.coarse_points - 1);
    return v;
  }

  /// Uniform grid over the free axes. The eps_di axis is laid out on its valid
  /// sub-interval so the resolution lands where the splitter can operate.
  void coarse() {
    std::vector<MaterialPoint> pts;
    const auto ej = axis_values(kEpsJ), wi = axis_values(kWpI), wj = axis_values(kWpJ);
    for (double a : ej)
      for (double b : wi)
        for (double c : wj) {
          MaterialPoint base{s_.eps_di.lo, a, b, c};
          double hi = s_.eps_di.hi;
          if (auto u = eps_upper(base)) hi = *u;
          if (!free_axis(kEpsI) || !(hi > s_.eps_di.lo)) {
            pts.push_back(base);
            continue;
          }
          for (int k = 0; k < s_.coarse_points; ++k) {
            MaterialPoint p = base;
            p.eps_di = s_.eps_di.lo + (hi - s_.eps_di.lo) * k / (s_.coarse_points - 1);
            pts.push_back(p);
          }
        }
    std::vector<Probe> out(pts.size());
    parallel_for(pts.size(), [&](std::size_t k) { out[k] = probe(pts[k]); }, s_.workers);
    for (const auto& pr : out) record(pr);
  }

  /// Coordinate descent on the penalized objective, step shrinking by `shrink`
  /// after each round.
  void descend() {
    std::array<double, 4> step{};
    for (int a = 0; a < 4; ++a)
      step[a] = free_axis(a) ? (range(a).hi - range(a).lo) / (s_.coarse_points - 1) : 0.0;
    if (free_axis(kEpsI)) {
      if (auto u = eps_upper(best_any_->p)) step[kEpsI] = (*u - s_.eps_di.lo) / (s_.coarse_points - 1);
    }
    for (int round = 0; round < s_.rounds; ++round) {
      for (int a = 0; a < 4; ++a) step[a] /= s_.shrink;
      for (int a = 0; a < 4; ++a) {
        if (step[a] <= 0.0) continue;
        for (double dir : {1.0, -1.0}) {
          for (int it = 0; it < 50; ++it) {
            MaterialPoint p = best_any_->p;
            double& x = coord(p, a);
            const double moved = range(a).clamp(x + dir * step[a]);
            if (moved == x) break;
            x = moved;
            const Probe pr = probe(p);
            const double before = best_any_->penalized;
            record(pr);
            if (!(pr.e.ok() && pr.penalized < before)) break;
          }
        }
      }
    }
  }

  const SearchSpace& s_;
  Target t_;
  double lambda0_;
  double theta_;
  std::optional<Probe> best_any_;
  std::optional<Probe> best_constrained_;
  int evaluations_ = 0;
};

}  // namespace detail

/// Per-angle constrained minimization of |tau - tau*| + |rho - rho*|. Each
/// angle is searched independently. A record is feasible when its point meets
/// the constraints and splits within balance_tol of the target. Records whose
/// constraints fail carry the least-violating point seen, or no point at all
/// when evaluated = false.
inline OptimizationResult optimize(const Target& target, const SearchSpace& space) {
  space.validate();
  OptimizationResult res;
  for (double l : space.lambda0_m)
    for (double t : space.theta_deg) {
      detail::AngleSearch search(space, target, l, t);
      res.records.push_back(search.run(t));
    }
  return res;
}

}  // namespace plasmon
