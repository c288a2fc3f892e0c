#pragma once
// Material models and scattering kinematics for a compound metal/dielectric
// interface. Everything below works in normalized units: c = hbar = eps0 = 1,
// frequencies in units of the silver plasma frequency and wavenumbers in units
// of omega_p_silver / c.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace plasmon {

using cplx = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;   // m/s
inline constexpr double kOmegaPSilver = 1.402e16;      // rad/s
inline constexpr double kPi = std::numbers::pi;

/// Raised when an SPP bound mode cannot exist (eps_m + eps_d >= 0).
class NonBoundModeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when the conserved k_y exceeds the transmitted-side SPP wavenumber.
class TirError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised for configurations outside the model's validity (omega >= omega_p,
/// non-positive permittivity, bad angle).
class InvalidSpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Principal square root with Re >= 0; on the imaginary axis the root with
/// Im >= 0 is chosen so that evanescent components decay toward +x.
inline cplx csqrt(cplx z) {
  cplx s = std::sqrt(z);
  if (s.real() == 0.0) s = cplx(0.0, std::abs(s.imag()));
  return s;
}

/// Normalized angular frequency for a vacuum wavelength in metres.
inline double omega_from_wavelength(double lambda0_m) {
  return 2.0 * kPi * kSpeedOfLight / lambda0_m / kOmegaPSilver;
}

inline double wavelength_from_omega(double omega) {
  return 2.0 * kPi * kSpeedOfLight / (omega * kOmegaPSilver);
}

/// Lossless Drude permittivity. Any consistent unit for omega and omega_p.
inline double drude_epsilon(double omega, double omega_p) {
  const double r = omega_p / omega;
  return 1.0 - r * r;
}

/// SPP wavenumber from the bound-mode dispersion relation.
inline double spp_wavenumber(double omega, double eps_d, double eps_m) {
  if (eps_m + eps_d >= 0.0)
    throw NonBoundModeError("no bound SPP: eps_m + eps_d = " + std::to_string(eps_m + eps_d));
  return omega * std::sqrt(eps_d * eps_m / (eps_d + eps_m));
}

/// One half-space: a dielectric of permittivity eps_d on top of a Drude metal.
/// omega_p is in rad/s.
struct HalfSpacePair {
  double eps_d = 1.0;
  double omega_p = kOmegaPSilver;

  double omega_p_rel() const { return omega_p / kOmegaPSilver; }
};

enum class Side { i, j };

struct InterfaceSpec {
  HalfSpacePair side_i;
  HalfSpacePair side_j;
  double lambda0 = 1500e-9;  // m
  double theta_ii = 0.0;     // rad
  int n_modes = 200;         // quadrature points per side and polarization

  double omega() const { return omega_from_wavelength(lambda0); }
  const HalfSpacePair& side(Side s) const { return s == Side::i ? side_i : side_j; }

  /// The reverse configuration: sides swapped, incidence angle replaced.
  InterfaceSpec mirrored(double theta) const {
    InterfaceSpec m = *this;
    m.side_i = side_j;
    m.side_j = side_i;
    m.theta_ii = theta;
    return m;
  }
};

/// Material constants of one side evaluated at a fixed normalized frequency.
struct Medium {
  double omega = 0.0;
  double eps_d = 1.0;
  double eps_m = -1.0;

  static Medium at(const HalfSpacePair& p, double omega) {
    return {omega, p.eps_d, drude_epsilon(omega, p.omega_p_rel())};
  }
};

struct SppKinematics {
  double k = 0.0;
  double k_x = 0.0;
  double k_y = 0.0;
  double nu = 0.0;
  double nu0 = 0.0;
  double theta = 0.0;
  double v_g = 0.0;  // units of c
};

struct RadiationKinematics {
  double q = 0.0;
  cplx k;
  cplx k_x;
  double k_y = 0.0;
  cplx nu;
  bool propagating = false;  // real k_x
  bool k_real = false;       // real total wavenumber (q below the bulk light line)
};

/// d(omega)/dk along the SPP dispersion relation with Drude dispersion.
/// omega_p is normalized.
inline double spp_group_velocity(double omega, double eps_d, double omega_p) {
  const double em = drude_epsilon(omega, omega_p);
  const double dem = 2.0 * omega_p * omega_p / (omega * omega * omega);
  const double s = eps_d + em;
  const double f = eps_d * em / s;
  const double df = eps_d * eps_d * dem / (s * s);
  const double k = omega * std::sqrt(f);
  // k^2 = omega^2 f  =>  2k dk = (2 omega f + omega^2 f') d omega
  const double dk2 = 2.0 * omega * f + omega * omega * df;
  return 2.0 * k / dk2;
}

inline SppKinematics spp_kinematics(const Medium& m, double omega_p_rel, double theta) {
  SppKinematics s;
  s.k = spp_wavenumber(m.omega, m.eps_d, m.eps_m);
  s.theta = theta;
  s.k_x = s.k * std::cos(theta);
  s.k_y = s.k * std::sin(theta);
  const double w2 = m.omega * m.omega;
  s.nu = std::sqrt(s.k * s.k - w2 * m.eps_m);
  s.nu0 = std::sqrt(s.k * s.k - w2 * m.eps_d);
  s.v_g = spp_group_velocity(m.omega, m.eps_d, omega_p_rel);
  return s;
}

inline SppKinematics spp_kinematics(const InterfaceSpec& spec, Side side, double theta) {
  const auto& p = spec.side(side);
  return spp_kinematics(Medium::at(p, spec.omega()), p.omega_p_rel(), theta);
}

/// Surface-photon kinematics at continuum label q for a conserved k_y.
inline RadiationKinematics radiation_kinematics(double omega, double eps_d, double eps_m,
                                                double q, double k_y) {
  RadiationKinematics r;
  r.q = q;
  r.k_y = k_y;
  const double k2 = omega * omega * eps_d - q * q;
  const double kx2 = k2 - k_y * k_y;
  r.k = csqrt(k2);
  r.k_x = csqrt(kx2);
  r.nu = csqrt(omega * omega * (eps_d - eps_m) - q * q);
  r.propagating = kx2 > 0.0;
  r.k_real = k2 > 0.0;
  return r;
}

inline RadiationKinematics radiation_kinematics(const Medium& m, double q, double k_y) {
  return radiation_kinematics(m.omega, m.eps_d, m.eps_m, q, k_y);
}

namespace detail {

inline void validate(const InterfaceSpec& spec) {
  const double w = spec.omega();
  for (const auto* p : {&spec.side_i, &spec.side_j}) {
    if (!(p->eps_d > 0.0)) throw InvalidSpecError("eps_d must be positive");
    if (!(p->omega_p > 0.0)) throw InvalidSpecError("omega_p must be positive");
    if (w >= p->omega_p_rel()) throw InvalidSpecError("operating frequency must lie below omega_p");
  }
  if (!(spec.theta_ii >= 0.0 && spec.theta_ii < kPi / 2))
    throw InvalidSpecError("incidence angle must lie in [0, pi/2)");
}

inline double spp_k(const InterfaceSpec& spec, Side s) {
  const auto m = Medium::at(spec.side(s), spec.omega());
  return spp_wavenumber(m.omega, m.eps_d, m.eps_m);
}

}  // namespace detail

struct RefractionAngles {
  double transmitted = 0.0;
  double reflected = 0.0;
};

/// Transmitted and reflected SPP angles from k_y conservation.
inline RefractionAngles transmitted_angle(const InterfaceSpec& spec) {
  detail::validate(spec);
  const double ki = detail::spp_k(spec, Side::i);
  const double kj = detail::spp_k(spec, Side::j);
  const double s = ki * std::sin(spec.theta_ii) / kj;
  if (s > 1.0) throw TirError("plasmonic total internal reflection: k_i sin(theta) > k_j");
  return {std::asin(s), spec.theta_ii};
}

/// Closed-form incidence angle on side j whose transmitted direction coincides
/// with the side-i reflected direction.
inline double matched_incidence_angle(const InterfaceSpec& spec) {
  detail::validate(spec);
  const double w = spec.omega();
  const auto mi = Medium::at(spec.side_i, w);
  const auto mj = Medium::at(spec.side_j, w);
  const double s = std::sin(spec.theta_ii);
  const double ratio = mi.eps_d * mi.eps_m * (mj.eps_d + mj.eps_m) * s * s /
                       (mj.eps_d * (mi.eps_d + mi.eps_m) * mj.eps_m);
  if (ratio > 1.0) throw TirError("plasmonic total internal reflection in matched-angle form");
  return std::acos(std::sqrt(1.0 - ratio));
}

/// Incidence angle at which the SPP undergoes total internal reflection.
inline double tir_critical_angle(const InterfaceSpec& spec) {
  const double ki = detail::spp_k(spec, Side::i);
  const double kj = detail::spp_k(spec, Side::j);
  if (kj >= ki) return kPi / 2;
  return std::asin(kj / ki);
}

/// Incidence angle beyond which one side stops supporting propagating surface
/// radiation (k_y exceeds omega sqrt(eps_d) on the lower-index side).
inline double radiation_cutoff_angle(const InterfaceSpec& spec) {
  const double ki = detail::spp_k(spec, Side::i);
  const double n = std::sqrt(std::min(spec.side_i.eps_d, spec.side_j.eps_d));
  const double s = spec.omega() * n / ki;
  return s >= 1.0 ? kPi / 2 : std::asin(s);
}

}  // namespace plasmon
