#pragma once
// Gauss-Legendre discretization of the surface-radiation continuum.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "plasmon/media.hpp"

namespace plasmon {

struct GaussLegendre {
  std::vector<double> nodes;    // ascending on [-1, 1]
  std::vector<double> weights;
};

/// Roots of P_n and the matching weights. Newton iteration from the
/// Chebyshev-angle guess, polished until |P_n(u)| < 1e-14.
inline GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussLegendre g;
  g.nodes.assign(n, 0.0);
  g.weights.assign(n, 0.0);

  auto legendre = [n](double u, double& p, double& dp) {
    double p0 = 1.0, p1 = u;
    if (n == 1) {
      p = p1;
      dp = 1.0;
      return;
    }
    for (int l = 2; l <= n; ++l) {
      const double p2 = ((2.0 * l - 1.0) * u * p1 - (l - 1.0) * p0) / l;
      p0 = p1;
      p1 = p2;
    }
    p = p1;
    dp = n * (u * p1 - p0) / (u * u - 1.0);
  };

  const int half = (n + 1) / 2;
  for (int m = 0; m < half; ++m) {
    double u = std::cos(kPi * (m + 0.75) / (n + 0.5));
    double p = 0.0, dp = 0.0;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      legendre(u, p, dp);
      const double du = p / dp;
      u -= du;
      if (std::abs(du) < 1e-16 * std::max(1.0, std::abs(u))) {
        converged = true;
        break;
      }
    }
    legendre(u, p, dp);
    if (!converged && std::abs(p) > 1e-14)
      throw std::runtime_error("gauss_legendre: Newton iteration did not converge");
    const double w = 2.0 / ((1.0 - u * u) * dp * dp);
    // Descending guesses fill from the right end.
    g.nodes[n - 1 - m] = u;
    g.nodes[m] = -u;
    g.weights[n - 1 - m] = w;
    g.weights[m] = w;
  }
  if (n % 2 == 1) g.nodes[n / 2] = 0.0;
  return g;
}

/// Quadrature grid on [0, q_cut] shared by both sides and both polarizations.
struct ModeGrid {
  double q_cut = 0.0;
  bool q_cut_clamped = false;  // true when the metal limit replaced the 10x rule
  double k_y = 0.0;
  std::vector<double> nodes;      // q_m, ascending
  std::vector<double> weights_w;  // raw Gauss-Legendre weights
  std::vector<double> weights_wp; // w'_m = w_m q_cut / 2
  int mmax_i = 0;
  int mmax_j = 0;

  int size() const { return static_cast<int>(nodes.size()); }
};

/// q_cut = 10 max_s sqrt(eps_d,s k_s^2 - k_y^2) with k_s the SPP wavenumber of
/// side s, capped at min_s omega sqrt(eps_d,s - eps_m,s). Throws TirError when
/// the incidence angle is past plasmonic TIR.
inline ModeGrid build_grid(const InterfaceSpec& spec) {
  transmitted_angle(spec);  // validates and rejects TIR
  const double w = spec.omega();
  const auto mi = Medium::at(spec.side_i, w);
  const auto mj = Medium::at(spec.side_j, w);
  const double ki = spp_wavenumber(w, mi.eps_d, mi.eps_m);
  const double kj = spp_wavenumber(w, mj.eps_d, mj.eps_m);

  ModeGrid g;
  g.k_y = ki * std::sin(spec.theta_ii);
  const double ky2 = g.k_y * g.k_y;
  g.q_cut = 10.0 * std::max(std::sqrt(mi.eps_d * ki * ki - ky2), std::sqrt(mj.eps_d * kj * kj - ky2));
  // Past omega sqrt(eps_d - eps_m) the metal-side nu turns imaginary and the
  // decaying-profile normalization no longer applies, so the grid stops there.
  const double q_metal = w * std::min(std::sqrt(mi.eps_d - mi.eps_m), std::sqrt(mj.eps_d - mj.eps_m));
  g.q_cut_clamped = q_metal < g.q_cut;
  g.q_cut = std::min(g.q_cut, q_metal);

  const auto gl = gauss_legendre(spec.n_modes);
  const double h = 0.5 * g.q_cut;
  g.nodes.resize(gl.nodes.size());
  g.weights_w = gl.weights;
  g.weights_wp.resize(gl.weights.size());
  for (std::size_t m = 0; m < gl.nodes.size(); ++m) {
    g.nodes[m] = (gl.nodes[m] + 1.0) * h;
    g.weights_wp[m] = gl.weights[m] * h;
  }
  // Propagating nodes form a prefix because k_x^2 decreases with q.
  for (double q : g.nodes) {
    if (radiation_kinematics(mi, q, g.k_y).propagating) ++g.mmax_i;
    if (radiation_kinematics(mj, q, g.k_y).propagating) ++g.mmax_j;
  }
  return g;
}

}  // namespace plasmon
