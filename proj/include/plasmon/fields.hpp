#pragma once
// Quantized mode profiles and their x-directed Poynting overlaps.
//
// Each profile is held as a finite sum of exponentials c * exp(kappa z) on the
// metal side (z < 0) and on the dielectric side (z > 0). Curls and overlap
// integrals are then exact algebra on the terms. The oscillatory dielectric
// integrals are reduced with
//     int_0^inf exp(i s z) dz = pi delta(s) + i P(1/s),
// and the two parts are reported separately.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "plasmon/media.hpp"

namespace plasmon {

using ComplexField3 = Eigen::Vector3cd;

enum class ModeKind { spp, tm, te };

inline const char* to_string(ModeKind k) {
  switch (k) {
    case ModeKind::spp: return "SPP";
    case ModeKind::tm: return "TM";
    case ModeKind::te: return "TE";
  }
  return "?";
}

/// Everything needed to write down one mode's z-profile at fixed (omega, k_y).
struct Mode {
  ModeKind kind = ModeKind::spp;
  Medium medium;
  cplx k;
  cplx k_x;
  double k_y = 0.0;
  double q = 0.0;   // radiation only
  cplx nu;          // metal-side decay
  double nu0 = 0.0; // SPP dielectric-side decay
  double v_g = 0.0; // SPP group velocity

  static Mode spp(const Medium& m, const SppKinematics& s) {
    Mode md;
    md.kind = ModeKind::spp;
    md.medium = m;
    md.k = s.k;
    md.k_x = s.k_x;
    md.k_y = s.k_y;
    md.nu = s.nu;
    md.nu0 = s.nu0;
    md.v_g = s.v_g;
    return md;
  }

  static Mode radiation(ModeKind kind, const Medium& m, const RadiationKinematics& r) {
    Mode md;
    md.kind = kind;
    md.medium = m;
    md.k = r.k;
    md.k_x = r.k_x;
    md.k_y = r.k_y;
    md.q = r.q;
    md.nu = r.nu;
    return md;
  }

  ComplexField3 k_hat() const { return ComplexField3(k_x / k, k_y / k, 0.0); }
};

struct ExpTerm {
  ComplexField3 c;
  cplx kappa;
};

struct ZProfile {
  std::vector<ExpTerm> metal;       // z < 0
  std::vector<ExpTerm> dielectric;  // z >= 0

  ComplexField3 operator()(double z) const {
    ComplexField3 v = ComplexField3::Zero();
    for (const auto& t : (z < 0.0 ? metal : dielectric)) v += t.c * std::exp(t.kappa * z);
    return v;
  }
};

namespace detail {

inline const ComplexField3 kZ(0.0, 0.0, 1.0);

/// Bilinear cross product. Eigen's cross() conjugates complex results.
inline ComplexField3 cross(const ComplexField3& a, const ComplexField3& b) {
  return {a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0)};
}

inline void push_cos(std::vector<ExpTerm>& v, double q, const ComplexField3& c) {
  v.push_back({0.5 * c, cplx(0.0, q)});
  v.push_back({0.5 * c, cplx(0.0, -q)});
}

inline void push_sin(std::vector<ExpTerm>& v, double q, const ComplexField3& c) {
  const cplx h = 1.0 / cplx(0.0, 2.0);
  v.push_back({h * c, cplx(0.0, q)});
  v.push_back({-h * c, cplx(0.0, -q)});
}

inline cplx gamma_tm(const Mode& m) {
  const double ed = m.medium.eps_d, em = m.medium.eps_m;
  return m.nu / csqrt(ed * ed * m.nu * m.nu + em * em * m.q * m.q);
}

inline double gamma_te(const Mode& m) {
  const double ed = m.medium.eps_d, em = m.medium.eps_m;
  return 1.0 / std::sqrt(ed * (ed - em));
}

inline cplx eta(const Mode& m) { return m.q * m.medium.eps_m / (m.nu * m.medium.eps_d); }

}  // namespace detail

/// Vector-potential profile phi(z) (the exp(i k.r) factor is implicit).
inline ZProfile wavefunction(const Mode& m) {
  using detail::kZ;
  const ComplexField3 kh = m.k_hat();
  const cplx I(0.0, 1.0);
  ZProfile p;
  switch (m.kind) {
    case ModeKind::spp:
      p.metal.push_back({I * kh + (m.k / m.nu) * kZ, m.nu});
      p.dielectric.push_back({I * kh - (m.k / m.nu0) * kZ, -m.nu0});
      break;
    case ModeKind::tm: {
      const cplx g = detail::gamma_tm(m), e = detail::eta(m);
      p.metal.push_back({g * (I * kh + (m.k / m.nu) * kZ), m.nu});
      detail::push_cos(p.dielectric, m.q, g * I * kh);
      detail::push_sin(p.dielectric, m.q, -g * e * I * kh);
      detail::push_sin(p.dielectric, m.q, g * (m.k / m.q) * kZ);
      detail::push_cos(p.dielectric, m.q, g * e * (m.k / m.q) * kZ);
      break;
    }
    case ModeKind::te: {
      const ComplexField3 v = detail::gamma_te(m) * I * detail::cross(kZ, kh);
      p.metal.push_back({v, m.nu});
      detail::push_cos(p.dielectric, m.q, v);
      detail::push_sin(p.dielectric, m.q, (m.nu / m.q) * v);
      break;
    }
  }
  return p;
}

/// psi(z) from psi exp(-i chi) = curl(phi exp(i k.r - i omega t)), that is
/// psi = -i (i k x V + z x dV/dz) term by term.
inline ZProfile curl_profile(const Mode& m, const ZProfile& phi) {
  const ComplexField3 kv(m.k_x, m.k_y, 0.0);
  const cplx I(0.0, 1.0);
  auto map = [&](const std::vector<ExpTerm>& in) {
    std::vector<ExpTerm> out;
    out.reserve(in.size());
    for (const auto& t : in)
      out.push_back({-I * (I * detail::cross(kv, t.c) + detail::cross(detail::kZ, t.kappa * t.c)), t.kappa});
    return out;
  };
  return {map(phi.metal), map(phi.dielectric)};
}

inline ComplexField3 spp_wavefunction(const Mode& m, double z) { return wavefunction(m)(z); }
inline ComplexField3 radiation_wavefunction(const Mode& m, double z) { return wavefunction(m)(z); }

/// Closed-form magnetic profiles psi_p, psi_TM, psi_TE.
inline ComplexField3 magnetic_profile(const Mode& m, double z) {
  using detail::kZ;
  const ComplexField3 kh = m.k_hat();
  const ComplexField3 transverse(m.k_y / m.k, -m.k_x / m.k, 0.0);
  const cplx I(0.0, 1.0);
  const double q = m.q;
  switch (m.kind) {
    case ModeKind::spp: {
      const cplx a = (m.k * m.k - m.nu * m.nu) / m.nu;
      const cplx f = z < 0.0 ? std::exp(m.nu * z) : cplx(std::exp(-m.nu0 * z));
      return a * f * transverse;
    }
    case ModeKind::tm: {
      const cplx a = (m.k * m.k - m.nu * m.nu) / m.nu * detail::gamma_tm(m);
      const cplx f = z < 0.0 ? std::exp(m.nu * z)
                             : std::cos(q * z) + std::sin(q * z) / detail::eta(m);
      return a * f * transverse;
    }
    case ModeKind::te: {
      const cplx a = I * m.nu * detail::gamma_te(m);
      if (z < 0.0) return a * (I * kh + (m.k / m.nu) * kZ) * std::exp(m.nu * z);
      const double c = std::cos(q * z), s = std::sin(q * z);
      return a * (I * kh * (c - q / m.nu * s) + (m.k / m.nu) * kZ * (c + m.nu / q * s));
    }
  }
  return ComplexField3::Zero();
}

/// z-integral of (conj(a) x b).x split into its delta(q_a - q_b) coefficient and
/// the regular remainder. Coincident oscillatory exponents contribute only to
/// the delta part; their principal value vanishes by symmetry.
struct OverlapParts {
  cplx delta;
  cplx regular;
};

inline OverlapParts cross_x_integral(const ZProfile& a, const ZProfile& b) {
  OverlapParts r{};
  for (const auto& ta : a.metal)
    for (const auto& tb : b.metal) {
      const cplx c = detail::cross(ta.c.conjugate(), tb.c)(0);
      r.regular += c / (std::conj(ta.kappa) + tb.kappa);
    }
  for (const auto& ta : a.dielectric)
    for (const auto& tb : b.dielectric) {
      const cplx c = detail::cross(ta.c.conjugate(), tb.c)(0);
      const cplx kap = std::conj(ta.kappa) + tb.kappa;
      const double scale = std::abs(ta.kappa) + std::abs(tb.kappa);
      if (std::abs(kap.real()) > 1e-13 * scale) {
        r.regular += -c / kap;
      } else if (std::abs(kap.imag()) <= 1e-12 * scale) {
        r.delta += kPi * c;
      } else {
        r.regular += c * cplx(0.0, 1.0) / kap.imag();
      }
    }
  return r;
}

/// z-integral of (conj(phi_a) x psi_b).x for two modes sharing omega and k_y.
inline OverlapParts poynting_overlap(const Mode& a, const Mode& b) {
  const auto phi_a = wavefunction(a);
  const auto phi_b = wavefunction(b);
  return cross_x_integral(phi_a, curl_profile(b, phi_b));
}

namespace detail {

/// Product of the E and H quantization prefactors.
inline double field_prefactor(const Mode& m) {
  const double w = m.medium.omega, ed = m.medium.eps_d, em = m.medium.eps_m;
  if (m.kind == ModeKind::spp) {
    const double t = (em * em + ed) * (em * em - ed * ed);
    const double p = t / (2.0 * w * em * em * ed * std::sqrt(-(em + ed)));
    return 1.0 / (2.0 * p);
  }
  return m.q * m.q / (kPi * w * w);
}

/// d omega / d k_x at fixed k_y (and fixed q for radiation).
inline cplx domega_dkx(const Mode& m) {
  if (m.kind == ModeKind::spp) return m.v_g * m.k_x / m.k;
  return m.k_x / (m.medium.omega * m.medium.eps_d);
}

inline cplx self_coefficient(const Mode& m) {
  const auto o = poynting_overlap(m, m);
  return m.kind == ModeKind::spp ? o.regular : o.delta;
}

}  // namespace detail

/// |N|^2 / (2 pi^2 omega) computed from the field profiles: 1 for a correctly
/// normalized propagating mode.
inline cplx self_overlap(const Mode& m) {
  const cplx n2 = 4.0 * kPi * kPi * detail::field_prefactor(m) * detail::self_coefficient(m) /
                  detail::domega_dkx(m);
  return n2 / (2.0 * kPi * kPi * m.medium.omega);
}

/// Reciprocity-form overlap int (conj(E_a) x H_b + E_b x conj(H_a)).x dz between
/// two modes of the same side, scaled by their self coefficients. Zero for
/// distinct modes.
inline OverlapParts reciprocity_overlap(const Mode& a, const Mode& b) {
  const auto ab = poynting_overlap(a, b);
  const auto ba = poynting_overlap(b, a);
  const double s = std::sqrt(std::abs(detail::self_coefficient(a)) * std::abs(detail::self_coefficient(b)));
  return {(ab.delta + std::conj(ba.delta)) / s, (ab.regular + std::conj(ba.regular)) / s};
}

/// Field-matching projection of an incoming side-i mode onto an outgoing side-j
/// mode: int (conj(phi_j) x psi_i).x dz over the geometric mean of the two self
/// coefficients. For radiation pairs on the same quadrature node only the delta
/// part survives; otherwise the regular part is returned.
inline cplx field_projection(const Mode& mode_j, const Mode& mode_i, bool same_node) {
  const auto o = poynting_overlap(mode_j, mode_i);
  const cplx v = same_node ? o.delta : o.regular;
  return v / std::sqrt(detail::self_coefficient(mode_j) * detail::self_coefficient(mode_i));
}

}  // namespace plasmon
