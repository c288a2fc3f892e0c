#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace plasmon;
using Catch::Approx;

TEST_CASE("principal square root branch", "[media]") {
  CHECK(csqrt(cplx(4.0, 0.0)) == cplx(2.0, 0.0));
  CHECK(csqrt(cplx(-4.0, 0.0)) == cplx(0.0, 2.0));
  CHECK(csqrt(cplx(-4.0, -0.0)) == cplx(0.0, 2.0));
  const cplx z = csqrt(cplx(-3.0, -4.0));
  CHECK(z.real() >= 0.0);
  CHECK(std::abs(z * z - cplx(-3.0, -4.0)) < 1e-14);
}

TEST_CASE("Drude permittivity", "[media]") {
  CHECK(drude_epsilon(1.0, 2.0) == Approx(-3.0));
  CHECK(drude_epsilon(0.5, 0.5) == Approx(0.0).margin(1e-15));
  // Reference values from an independent 30-digit evaluation.
  const double w1500 = omega_from_wavelength(1500e-9);
  CHECK(w1500 == Approx(0.0895697369143534606).epsilon(1e-14));
  CHECK(drude_epsilon(w1500, 1.0) == Approx(-123.645729245492903).epsilon(1e-13));
  CHECK(drude_epsilon(omega_from_wavelength(790e-9), 1.0) == Approx(-33.5739553876053871).epsilon(1e-13));
  CHECK(wavelength_from_omega(w1500) == Approx(1500e-9).epsilon(1e-14));
}

TEST_CASE("SPP wavenumber", "[media]") {
  const double w = omega_from_wavelength(1500e-9);
  const double em = drude_epsilon(w, 1.0);
  CHECK(spp_wavenumber(w, 1.0, em) == Approx(0.0899341519650961816).epsilon(1e-13));
  CHECK(spp_wavenumber(w, 1.5, em) == Approx(0.110371601673871502).epsilon(1e-13));
  CHECK(spp_wavenumber(w, 3.0, em) == Approx(0.157056353429283014).epsilon(1e-13));
  const double w790 = omega_from_wavelength(790e-9);
  CHECK(spp_wavenumber(w790, 1.5, drude_epsilon(w790, 1.0)) == Approx(0.213106202436636436).epsilon(1e-13));

  SECTION("bound mode lies beyond the dielectric light line") {
    testing::RandomMedia r(7);
    for (int t = 0; t < 200; ++t) {
      const double ed = r.uniform(1.0, 3.0);
      const double wp = r.uniform(1.0, 2.0);
      const double wv = r.uniform(0.05, 0.95) * wp / std::sqrt(1.0 + ed);
      CHECK(spp_wavenumber(wv, ed, drude_epsilon(wv, wp)) > wv * std::sqrt(ed));
    }
  }
  SECTION("no bound mode above the surface plasmon frequency") {
    CHECK_THROWS_AS(spp_wavenumber(0.8, 1.0, drude_epsilon(0.8, 1.0)), NonBoundModeError);
  }
}

TEST_CASE("group velocity matches the numerical derivative", "[media]") {
  const double w = omega_from_wavelength(1500e-9);
  CHECK(spp_group_velocity(w, 1.5, 1.0) == Approx(0.801605173802840445).epsilon(1e-11));
  CHECK(spp_group_velocity(w, 1.5, 1.3) == Approx(0.807721979729419794).epsilon(1e-11));

  testing::RandomMedia r(11);
  for (int t = 0; t < 50; ++t) {
    const double ed = r.uniform(1.0, 3.0), wp = r.uniform(1.0, 2.0);
    const double wv = r.uniform(0.05, 0.5) * wp / std::sqrt(1.0 + ed);
    const double h = 1e-6 * wv;
    auto k = [&](double x) { return spp_wavenumber(x, ed, drude_epsilon(x, wp)); };
    const double fd = 2.0 * h / (k(wv + h) - k(wv - h));
    CHECK(spp_group_velocity(wv, ed, wp) == Approx(fd).epsilon(1e-7));
    CHECK(spp_group_velocity(wv, ed, wp) < 1.0 / std::sqrt(ed));
  }
}

TEST_CASE("SPP kinematics", "[media]") {
  const auto spec = testing::silver_spec(1.5, 1.0, 1500, 30);
  const auto s = spp_kinematics(spec, Side::i, spec.theta_ii);
  CHECK(s.k_x * s.k_x + s.k_y * s.k_y == Approx(s.k * s.k).epsilon(1e-14));
  CHECK(s.k_y == Approx(s.k * 0.5).epsilon(1e-14));
  const auto m = Medium::at(spec.side_i, spec.omega());
  // nu and nu0 are the decay constants solving the wave equation in each half-space.
  CHECK(s.nu * s.nu == Approx(s.k * s.k - m.omega * m.omega * m.eps_m).epsilon(1e-13));
  CHECK(s.nu0 * s.nu0 == Approx(s.k * s.k - m.omega * m.omega * m.eps_d).epsilon(1e-13));
  // Boundary condition for a bound TM surface wave.
  CHECK(s.nu / m.eps_m == Approx(-s.nu0 / m.eps_d).epsilon(1e-12));
}

TEST_CASE("radiation kinematics", "[media]") {
  const double w = omega_from_wavelength(1500e-9);
  const auto m = Medium{w, 2.0, drude_epsilon(w, 1.0)};
  const double ky = 0.5 * w;
  const auto prop = radiation_kinematics(m, 0.3 * w, ky);
  CHECK(prop.propagating);
  CHECK(prop.k_real);
  CHECK(std::abs(prop.k_x * prop.k_x + ky * ky + 0.09 * w * w - 2.0 * w * w) < 1e-15);

  const auto evan = radiation_kinematics(m, 1.35 * w, ky);  // k real, k_x imaginary
  CHECK_FALSE(evan.propagating);
  CHECK(evan.k_real);
  CHECK(evan.k_x.real() == 0.0);
  CHECK(evan.k_x.imag() > 0.0);

  const auto deep = radiation_kinematics(m, 2.0 * w, ky);
  CHECK_FALSE(deep.k_real);
  CHECK(deep.k.imag() > 0.0);
  CHECK(deep.nu.real() > 0.0);
}

TEST_CASE("refraction and plasmonic TIR", "[media]") {
  CHECK(rad_to_deg(tir_critical_angle(testing::silver_spec(1.5, 1.0, 1500, 0))) ==
        Approx(54.5706096689265837).epsilon(1e-12));
  CHECK(rad_to_deg(tir_critical_angle(testing::silver_spec(1.5, 1.0, 790, 0))) ==
        Approx(54.1160497839378153).epsilon(1e-12));
  CHECK(rad_to_deg(radiation_cutoff_angle(testing::silver_spec(1.5, 1.0, 1500, 0))) ==
        Approx(54.2455724337458979).epsilon(1e-12));
  CHECK(rad_to_deg(radiation_cutoff_angle(testing::silver_spec(1.5, 1.0, 790, 0))) ==
        Approx(52.9441656934023240).epsilon(1e-12));
  CHECK(rad_to_deg(transmitted_angle(testing::silver_spec(2.0, 1.0, 1500, 20)).transmitted) ==
        Approx(29.0566118808566895).epsilon(1e-12));

  CHECK_THROWS_AS(transmitted_angle(testing::silver_spec(1.5, 1.0, 1500, 55)), TirError);
  CHECK_NOTHROW(transmitted_angle(testing::silver_spec(1.0, 1.5, 1500, 89)));
  CHECK(tir_critical_angle(testing::silver_spec(1.0, 1.5, 1500, 0)) == Approx(kPi / 2));

  SECTION("identical media refract without bending") {
    const auto r = transmitted_angle(testing::silver_spec(2.2, 2.2, 790, 37));
    CHECK(r.transmitted == Approx(deg_to_rad(37)).epsilon(1e-14));
    CHECK(r.reflected == Approx(deg_to_rad(37)).epsilon(1e-14));
  }
}

TEST_CASE("matched angle equals k_y conservation", "[media]") {
  testing::RandomMedia r(3);
  int checked = 0;
  while (checked < 200) {
    InterfaceSpec s;
    s.side_i = r.side();
    s.side_j = r.side();
    s.lambda0 = r.lambda_nm() * 1e-9;
    s.theta_ii = r.uniform(0.0, 1.5);
    const double ki = spp_kinematics(s, Side::i, 0).k, kj = spp_kinematics(s, Side::j, 0).k;
    const double sn = ki * std::sin(s.theta_ii) / kj;
    if (sn >= 1.0) {
      CHECK_THROWS_AS(matched_incidence_angle(s), TirError);
      continue;
    }
    CHECK(std::abs(matched_incidence_angle(s) - std::asin(sn)) < 1e-9);
    ++checked;
  }
}

TEST_CASE("spec validation", "[media]") {
  auto s = testing::silver_spec(1.5, 1.0, 1500, 10);
  s.side_i.eps_d = -1.0;
  CHECK_THROWS_AS(transmitted_angle(s), InvalidSpecError);
  s = testing::silver_spec(1.5, 1.0, 1500, 10);
  s.theta_ii = kPi / 2;
  CHECK_THROWS_AS(transmitted_angle(s), InvalidSpecError);
  s = testing::silver_spec(1.5, 1.0, 50, 10);  // above the plasma frequency
  CHECK_THROWS_AS(transmitted_angle(s), InvalidSpecError);
}

TEST_CASE("mirrored spec swaps the sides", "[media]") {
  const auto s = make_spec({2.0, 1.0, 1.2, 1.7}, 790e-9, 0.3, 50);
  const auto m = s.mirrored(0.4);
  CHECK(m.side_i.eps_d == 1.0);
  CHECK(m.side_j.eps_d == 2.0);
  CHECK(m.side_i.omega_p_rel() == Approx(1.7));
  CHECK(m.theta_ii == 0.4);
  CHECK(m.n_modes == 50);
  CHECK(m.mirrored(0.3).side_i.eps_d == 2.0);
}
