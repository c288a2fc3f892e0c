#pragma once
// Analytic coupling coefficients between SPP, TM and TE excitations on the two
// sides of the interface, and their assembly into the discretized C blocks.
//
// Block convention: rows index outgoing side-j modes, columns incoming side-i
// modes. Slot 0 is the SPP in TM blocks and a structural zero in TE blocks;
// slots 1..N+1 are the quadrature nodes in ascending q.

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

#include "plasmon/media.hpp"
#include "plasmon/quadrature.hpp"

namespace plasmon {

class SingularModeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class SingularCouplingError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct RadiationNode {
  RadiationKinematics kin;
  cplx r_tm;
  cplx r_te;
};

inline cplx r_tm_factor(const Medium& m, cplx nu, double q) {
  const cplx a = cplx(0.0, 1.0) * m.eps_d * nu;
  return (a - m.eps_m * q) / (a + m.eps_m * q);
}

inline cplx r_te_factor(cplx nu, double q) {
  const cplx a = cplx(0.0, 1.0) * nu;
  return (a - q) / (a + q);
}

struct SideContext {
  Medium medium;
  SppKinematics spp;
  std::vector<RadiationNode> nodes;
};

struct CouplingContext {
  double omega = 0.0;
  double k_y = 0.0;
  SideContext i;
  SideContext j;

  const SideContext& side(Side s) const { return s == Side::i ? i : j; }
};

inline CouplingContext make_context(const InterfaceSpec& spec, const ModeGrid& grid) {
  CouplingContext ctx;
  ctx.omega = spec.omega();
  ctx.k_y = grid.k_y;
  auto fill = [&](SideContext& sc, const HalfSpacePair& p) {
    sc.medium = Medium::at(p, ctx.omega);
    const double k = spp_wavenumber(ctx.omega, sc.medium.eps_d, sc.medium.eps_m);
    const double s = std::min(1.0, grid.k_y / k);
    sc.spp = spp_kinematics(sc.medium, p.omega_p_rel(), std::asin(s));
    sc.spp.k_y = grid.k_y;
    sc.spp.k_x = std::sqrt(std::max(0.0, k * k - grid.k_y * grid.k_y));
    sc.nodes.reserve(grid.nodes.size());
    for (double q : grid.nodes) {
      RadiationNode n;
      n.kin = radiation_kinematics(sc.medium, q, grid.k_y);
      n.r_tm = r_tm_factor(sc.medium, n.kin.nu, q);
      n.r_te = r_te_factor(n.kin.nu, q);
      sc.nodes.push_back(n);
    }
  };
  fill(ctx.i, spec.side_i);
  fill(ctx.j, spec.side_j);
  return ctx;
}

enum class Kind { p, tm, te };

/// Mode normalization factor. node is ignored for the SPP.
inline cplx mode_norm(Kind kind, const SideContext& sc, double omega, int node = 0) {
  const double ed = sc.medium.eps_d, em = sc.medium.eps_m;
  if (kind == Kind::p) {
    if (sc.spp.k_x == 0.0) throw SingularModeError("grazing SPP (k_x = 0)");
    return csqrt(omega * ed * em * em * sc.spp.nu0 / (kPi * sc.spp.k_x * (em * em - ed * ed)));
  }
  const auto& r = sc.nodes.at(node).kin;
  if (r.k_x == 0.0) throw SingularModeError("grazing radiation mode (k_x = 0)");
  const cplx ratio = std::conj(r.k) / r.k;
  if (kind == Kind::tm) return csqrt(omega * ed / (4.0 * kPi * kPi * std::conj(r.k_x)) * ratio);
  return csqrt(1.0 / (4.0 * kPi * kPi * omega * r.k_x) / ratio);
}

/// Discrete realization of 2 pi delta_+(s): the delta half lives on the
/// coincident-node diagonal as pi, the principal value i/s everywhere else.
inline cplx delta_plus_kernel(double s, bool coincident) {
  if (coincident) return kPi;
  if (s == 0.0) throw std::logic_error("delta_plus_kernel: zero argument off the diagonal");
  return cplx(0.0, 1.0 / s);
}

namespace detail {

inline cplx checked_inv(cplx d) {
  if (d == cplx(0.0)) throw SingularCouplingError("vanishing coupling denominator");
  return 1.0 / d;
}

}  // namespace detail

/// Overlap integral I_{out,in}(j-mode m; i-mode n). On a coincident
/// radiation pair (m == n) only the delta-supported terms are kept.
inline cplx overlap_integral(Kind out, Kind in, int m, int n, const CouplingContext& ctx) {
  using std::conj;
  const cplx I(0.0, 1.0);
  const double w = ctx.omega, ky = ctx.k_y;
  const auto& si = ctx.i;
  const auto& sj = ctx.j;
  const double edj = sj.medium.eps_d, emj = sj.medium.eps_m;
  auto X = [](double s, bool d) { return delta_plus_kernel(s, d); };
  auto inv = detail::checked_inv;

  if (out == Kind::te && in != Kind::te) return 0.0;

  if (out == Kind::p && in == Kind::p) {
    const double pre = 2.0 * kPi * si.spp.k_x / w * sj.spp.k / si.spp.k;
    return pre * (inv(emj * (sj.spp.nu + si.spp.nu)) + inv(edj * (sj.spp.nu0 + si.spp.nu0)));
  }
  if (out == Kind::p) {
    const auto& R = si.nodes.at(n);
    const double qi = R.kin.q;
    if (in == Kind::tm) {
      const cplx pre = 2.0 * kPi * conj(R.kin.k_x) / w * sj.spp.k / conj(R.kin.k);
      const cplx rc = conj(R.r_tm);
      return pre * ((inv(sj.spp.nu0 - I * qi) - rc * inv(sj.spp.nu0 + I * qi)) / edj +
                    (1.0 - rc) * inv(emj * (sj.spp.nu + R.kin.nu)));
    }
    const cplx kc = conj(R.kin.k);
    const cplx a = ky * I * sj.spp.nu0 * kc / (edj * sj.spp.k);
    const cplx b = ky * qi * sj.spp.k / (edj * kc);
    const cplx g = ky * I * sj.spp.nu * kc / (emj * sj.spp.k) - ky * conj(I * R.kin.nu) * sj.spp.k / (emj * kc);
    const cplx rc = conj(R.r_te);
    return 2.0 * kPi / w *
           ((a - b) * rc * inv(sj.spp.nu0 + I * qi) - (a + b) * inv(sj.spp.nu0 - I * qi) +
            g * (1.0 - rc) * inv(sj.spp.nu + R.kin.nu));
  }
  if (in == Kind::p) {  // out == tm
    const auto& R = sj.nodes.at(m);
    const double qj = R.kin.q;
    const double pre = 2.0 * kPi * si.spp.k_x / w / si.spp.k;
    return pre * R.kin.k *
           ((inv(si.spp.nu0 + I * qj) - R.r_tm * inv(si.spp.nu0 - I * qj)) / edj +
            (1.0 - R.r_tm) * inv(emj * (si.spp.nu + R.kin.nu)));
  }

  const auto& Rj = sj.nodes.at(m);
  const auto& Ri = si.nodes.at(n);
  const double qj = Rj.kin.q, qi = Ri.kin.q;
  const bool d = (m == n);

  if (out == Kind::tm && in == Kind::tm) {
    const cplx rj = Rj.r_tm, ric = conj(Ri.r_tm);
    cplx br = rj * ric * X(qj - qi, d) + X(qi - qj, d);
    cplx metal = 0.0;
    if (!d) {
      br += -rj * X(qj + qi, false) - ric * X(-qj - qi, false);
      metal = (1.0 - rj) * (1.0 - ric) * inv(emj * (Rj.kin.nu + Ri.kin.nu));
    }
    const cplx pre = 2.0 * kPi * conj(Ri.kin.k_x) / w * Rj.kin.k / conj(Ri.kin.k);
    return pre * (br / edj + metal);
  }
  if (out == Kind::te && in == Kind::te) {
    const cplx rj = Rj.r_te, ric = conj(Ri.r_te);
    cplx br = rj * ric * X(qj - qi, d) + X(qi - qj, d);
    if (!d) {
      br += -rj * X(qj + qi, false) - ric * X(-qj - qi, false) +
            (1.0 - rj) * (1.0 - ric) * inv(Rj.kin.nu + Ri.kin.nu);
    }
    return 2.0 * kPi * Rj.kin.k_x * w * conj(Ri.kin.k) / Rj.kin.k * br;
  }
  // TM out, TE in. The reflection factor of the outgoing TM mode is taken at
  // its own node q_j.
  const cplx kic = conj(Ri.kin.k);
  const cplx A1 = ky * qj * kic / (edj * Rj.kin.k);
  const cplx B1 = ky * qi * Rj.kin.k / (edj * kic);
  const cplx rj = Rj.r_tm, ric = conj(Ri.r_te);
  cplx br = (B1 - A1) * rj * ric * X(qj - qi, d) + (A1 - B1) * X(qi - qj, d);
  if (!d) {
    br += (A1 + B1) * rj * X(qj + qi, false) - (A1 + B1) * ric * X(-qj - qi, false);
    const cplx g = ky * I * Rj.kin.nu * kic / (emj * Rj.kin.k) - ky * conj(I * Ri.kin.nu) * Rj.kin.k / (emj * kic);
    br += g * (1.0 - rj) * (1.0 - ric) * inv(Rj.kin.nu + Ri.kin.nu);
  }
  return 2.0 * kPi / w * br;
}

/// C^{ji}_{out,in} = M_out,j M*_in,i I_{out,in}.
inline cplx coupling_C(Kind out, Kind in, int m, int n, const CouplingContext& ctx) {
  const cplx I = overlap_integral(out, in, m, n, ctx);
  if (I == cplx(0.0)) return 0.0;
  return mode_norm(out, ctx.j, ctx.omega, m) * std::conj(mode_norm(in, ctx.i, ctx.omega, n)) * I;
}

struct CBlocks {
  Eigen::MatrixXcd tmtm, tmte, tete, tetm;
};

/// Assemble the (N+2) x (N+2) coupling blocks. SPP borders carry sqrt(w'),
/// off-diagonal radiation pairs sqrt(w'_m w'_n), the diagonal no weight.
inline CBlocks build_C_blocks(const ModeGrid& grid, const CouplingContext& ctx) {
  const int N1 = grid.size();
  const int n2 = N1 + 1;
  CBlocks B;
  B.tmtm = Eigen::MatrixXcd::Zero(n2, n2);
  B.tmte = Eigen::MatrixXcd::Zero(n2, n2);
  B.tete = Eigen::MatrixXcd::Zero(n2, n2);
  B.tetm = Eigen::MatrixXcd::Zero(n2, n2);

  const double w = ctx.omega;
  std::vector<double> sw(N1);
  std::vector<cplx> mtm_i(N1), mte_i(N1), mtm_j(N1), mte_j(N1);
  for (int n = 0; n < N1; ++n) {
    sw[n] = std::sqrt(grid.weights_wp[n]);
    mtm_i[n] = std::conj(mode_norm(Kind::tm, ctx.i, w, n));
    mte_i[n] = std::conj(mode_norm(Kind::te, ctx.i, w, n));
    mtm_j[n] = mode_norm(Kind::tm, ctx.j, w, n);
    mte_j[n] = mode_norm(Kind::te, ctx.j, w, n);
  }
  const cplx mp_j = mode_norm(Kind::p, ctx.j, w);
  const cplx mp_i = std::conj(mode_norm(Kind::p, ctx.i, w));

  B.tmtm(0, 0) = mp_j * mp_i * overlap_integral(Kind::p, Kind::p, 0, 0, ctx);
  for (int n = 0; n < N1; ++n) {
    B.tmtm(0, n + 1) = mp_j * mtm_i[n] * overlap_integral(Kind::p, Kind::tm, 0, n, ctx) * sw[n];
    B.tmte(0, n + 1) = mp_j * mte_i[n] * overlap_integral(Kind::p, Kind::te, 0, n, ctx) * sw[n];
  }
  for (int m = 0; m < N1; ++m) {
    B.tmtm(m + 1, 0) = mtm_j[m] * mp_i * overlap_integral(Kind::tm, Kind::p, m, 0, ctx) * sw[m];
    for (int n = 0; n < N1; ++n) {
      const double wt = (m == n) ? 1.0 : sw[m] * sw[n];
      B.tmtm(m + 1, n + 1) = mtm_j[m] * mtm_i[n] * overlap_integral(Kind::tm, Kind::tm, m, n, ctx) * wt;
      B.tmte(m + 1, n + 1) = mtm_j[m] * mte_i[n] * overlap_integral(Kind::tm, Kind::te, m, n, ctx) * wt;
      B.tete(m + 1, n + 1) = mte_j[m] * mte_i[n] * overlap_integral(Kind::te, Kind::te, m, n, ctx) * wt;
    }
  }
  return B;
}

}  // namespace plasmon
