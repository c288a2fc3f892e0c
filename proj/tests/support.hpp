#pragma once
// Shared fixtures for the unit tests.

#include <random>

#include "plasmon/optimizer.hpp"

namespace plasmon::testing {

inline InterfaceSpec silver_spec(double eps_di, double eps_dj, double lambda_nm, double theta_deg, int n_modes = 200) {
  return make_spec({eps_di, eps_dj, 1.0, 1.0}, lambda_nm * 1e-9, deg_to_rad(theta_deg), n_modes);
}

/// Random propagating-regime media: eps_d in [1, 3], omega_p in [1, 2] x silver,
/// one of the two reference wavelengths.
struct RandomMedia {
  std::mt19937_64 rng;
  explicit RandomMedia(unsigned long long seed) : rng(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  double lambda_nm() { return std::bernoulli_distribution(0.5)(rng) ? 790.0 : 1500.0; }
  HalfSpacePair side() { return {uniform(1.0, 3.0), uniform(1.0, 2.0) * kOmegaPSilver}; }
};

}  // namespace plasmon::testing
