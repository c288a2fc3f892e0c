#pragma once
// Beamsplitter figures of merit extracted from the transfer matrix, the
// two-SPP interference output and the scattered radiation pattern.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "plasmon/transfer.hpp"

namespace plasmon {

/// SPP and radiation output for a unit SPP incident from side i.
struct ForwardCoefficients {
  double tau = 0.0;
  double rho = 0.0;
  double sigma = 0.0;
  double sigma_tm = 0.0;
  double sigma_te = 0.0;
  cplx t00;  // (T21)_00
  cplx r00;  // (T11)_00
};

/// Loss counts propagating radiation rows only: 1..mmax_i on side i and
/// 1..mmax_j on side j.
inline ForwardCoefficients forward_coefficients(const SppResponse& r) {
  ForwardCoefficients f;
  f.r00 = r.out[0](0);
  f.t00 = r.out[1](0);
  f.rho = std::norm(f.r00);
  f.tau = std::norm(f.t00);
  for (int l = 1; l <= r.grid.mmax_i; ++l) {
    f.sigma_tm += std::norm(r.out[0](l));
    f.sigma_te += std::norm(r.out[2](l));
  }
  for (int l = 1; l <= r.grid.mmax_j; ++l) {
    f.sigma_tm += std::norm(r.out[1](l));
    f.sigma_te += std::norm(r.out[3](l));
  }
  f.sigma = f.sigma_tm + f.sigma_te;
  return f;
}

/// Same figures read from column 0 of a full transfer matrix.
inline ForwardCoefficients forward_coefficients(const TransferMatrix& T) {
  SppResponse r;
  r.grid = T.grid;
  for (int b = 0; b < 4; ++b) r.out[b] = T.blocks[b][0].col(0);
  return forward_coefficients(r);
}

struct SplitterCoefficients {
  double tau = 0.0, rho = 0.0, sigma = 0.0;
  double tau_r = 0.0, rho_r = 0.0, sigma_r = 0.0;
  double phi = 0.0;
  double theta_t = 0.0;          // transmitted angle, also the reverse incidence angle
  double raw_reflection_phase = 0.0;  // arg (T11)_00 of the forward run, for diagnostics
  double sigma_te = 0.0, sigma_tm = 0.0;
  bool conservation_warning = false;

  double conservation_residual() const { return tau + rho + sigma - 1.0; }
};

/// Phase convention of the reflected SPP: 0 when side i is optically denser.
inline double phase_rule(const InterfaceSpec& spec) {
  return spec.side_i.eps_d > spec.side_j.eps_d ? 0.0 : kPi;
}

/// Forward run i -> j and reverse run j -> i at the matched angle.
inline SplitterCoefficients extract_coefficients(const InterfaceSpec& spec) {
  const double theta_t = transmitted_angle(spec).transmitted;
  const auto fwd = forward_coefficients(spp_response(spec));
  const auto rev = forward_coefficients(spp_response(spec.mirrored(theta_t)));
  SplitterCoefficients c;
  c.tau = fwd.tau;
  c.rho = fwd.rho;
  c.sigma = fwd.sigma;
  c.sigma_tm = fwd.sigma_tm;
  c.sigma_te = fwd.sigma_te;
  c.tau_r = rev.tau;
  c.rho_r = rev.rho;
  c.sigma_r = rev.sigma;
  c.theta_t = theta_t;
  c.phi = phase_rule(spec);
  c.raw_reflection_phase = std::arg(fwd.r00);
  c.conservation_warning = std::abs(c.conservation_residual()) > 0.05;
  return c;
}

struct ReciprocityGaps {
  double dtau = 0.0, drho = 0.0, dsigma = 0.0;

  double max() const { return std::max({dtau, drho, dsigma}); }
};

inline ReciprocityGaps reciprocity_report(const SplitterCoefficients& c) {
  return {std::abs(c.tau - c.tau_r), std::abs(c.rho - c.rho_r), std::abs(c.sigma - c.sigma_r)};
}

/// 2x2 SPP sub-matrix mapping (a^f, b^b) inputs to (a^b, b^f) outputs.
inline Eigen::Matrix2cd beamsplitter_matrix(const SplitterCoefficients& c) {
  const cplx e = std::polar(1.0, c.phi);
  Eigen::Matrix2cd B;
  B << e * std::sqrt(c.rho), std::sqrt(c.tau_r),
      std::sqrt(c.tau), -std::conj(e) * std::sqrt(c.rho_r);
  return B;
}

inline double hom_coincidence(const SplitterCoefficients& c) {
  const double d = c.tau - c.rho;
  return d * d;
}

/// Two-SPP output for one SPP entering from each side. Everything not in the
/// three pure-SPP outcomes is lumped into the radiation-loss sector.
struct TwoSppOutput {
  cplx amp_20;  // both SPPs on side i
  cplx amp_02;  // both SPPs on side j
  cplx amp_11;  // one on each side
  double loss_probability = 0.0;

  double probability_sum() const {
    return std::norm(amp_20) + std::norm(amp_02) + std::norm(amp_11) + loss_probability;
  }
};

inline TwoSppOutput two_spp_output(const SplitterCoefficients& c) {
  TwoSppOutput o;
  const double s = std::sqrt(2.0 * c.rho * c.tau);
  o.amp_20 = std::polar(s, c.phi);
  o.amp_02 = -std::polar(s, -c.phi);
  o.amp_11 = c.tau - c.rho;
  o.loss_probability = std::max(0.0, 1.0 - std::norm(o.amp_20) - std::norm(o.amp_02) - std::norm(o.amp_11));
  return o;
}

enum class Polarization { tm, te };

struct RadiationEntry {
  Side side = Side::i;
  Polarization polarization = Polarization::tm;
  int node = 0;  // 1-based quadrature index
  cplx k_x;
  double k_y = 0.0;
  double q = 0.0;
  double power_fraction = 0.0;
  double normalized_power = 0.0;
};

struct RadiationPattern {
  std::vector<RadiationEntry> entries;
  double omega = 0.0;

  double total(Polarization p) const {
    double s = 0.0;
    for (const auto& e : entries)
      if (e.polarization == p) s += e.power_fraction;
    return s;
  }
  double total() const { return total(Polarization::tm) + total(Polarization::te); }
};

/// Scattered propagating radiation for a unit SPP entering from input_side.
/// Entries keep the physical side labels of the original spec.
inline RadiationPattern radiation_pattern(const InterfaceSpec& spec, Side input_side = Side::i) {
  InterfaceSpec run = spec;
  if (input_side == Side::j) run = spec.mirrored(transmitted_angle(spec).transmitted);
  const auto grid = build_grid(run);
  const auto ctx = make_context(run, grid);
  const auto r = spp_response(build_DF(build_C_blocks(grid, ctx), ctx, grid), grid);

  auto physical = [input_side](Side s) {
    if (input_side == Side::i) return s;
    return s == Side::i ? Side::j : Side::i;
  };

  RadiationPattern pat;
  pat.omega = ctx.omega;
  auto collect = [&](int block, Side s, Polarization pol, int mmax) {
    const auto& nodes = ctx.side(s).nodes;
    for (int l = 1; l <= mmax; ++l) {
      RadiationEntry e;
      e.side = physical(s);
      e.polarization = pol;
      e.node = l;
      e.k_x = nodes[l - 1].kin.k_x;
      e.k_y = nodes[l - 1].kin.k_y;
      e.q = nodes[l - 1].kin.q;
      e.power_fraction = std::norm(r.out[block](l));
      pat.entries.push_back(e);
    }
  };
  collect(0, Side::i, Polarization::tm, grid.mmax_i);
  collect(2, Side::i, Polarization::te, grid.mmax_i);
  collect(1, Side::j, Polarization::tm, grid.mmax_j);
  collect(3, Side::j, Polarization::te, grid.mmax_j);

  double peak = 0.0;
  for (const auto& e : pat.entries) peak = std::max(peak, e.power_fraction);
  for (auto& e : pat.entries) e.normalized_power = peak > 0.0 ? e.power_fraction / peak : 0.0;
  return pat;
}

}  // namespace plasmon
