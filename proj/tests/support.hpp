#pragma once

// Shared helpers for the test binaries: seeded random parameter draws per
// regime and small numeric utilities.  Test-only code; not part of the
// library surface.

#include <cmath>
#include <random>

#include "candual/scalar.hpp"

namespace test_support {

inline double rel_gap(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

// Log-uniform alpha, mu, nu in [0.1, 10] filtered to the double-well range,
// with tau placed inside the requested regime.  SuperCritical tau is capped
// at 2*sqrt(eta) to keep the draw distribution proper; loads carry a random
// sign.  Draws that land outside the intended classification (e.g. inside
// the Critical tolerance band) are rejected and retried.
inline candual::ScalarParams draw_params(std::mt19937_64& rng,
                                         candual::Regime want) {
  std::uniform_real_distribution<double> lg(-1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    candual::ScalarParams P;
    P.alpha = std::pow(10.0, lg(rng));
    P.mu = std::pow(10.0, lg(rng));
    P.nu = std::pow(10.0, lg(rng));
    P.tau = 0.0;
    if (!(2.0 * P.mu < P.nu * P.alpha * P.alpha)) continue;
    const double eta = candual::eta_of(P);
    switch (want) {
      case candual::Regime::ZeroLoad:
        break;
      case candual::Regime::SubCritical:
        P.tau = std::sqrt(eta * (0.02 + 0.96 * unit(rng)));
        break;
      case candual::Regime::SuperCritical:
        P.tau = std::sqrt(eta * (1.01 + 2.99 * unit(rng)));
        break;
      case candual::Regime::Critical:
        P.tau = std::sqrt(eta);
        break;
    }
    if (P.tau != 0.0 && unit(rng) < 0.5) P.tau = -P.tau;
    if (candual::regime_info(P).regime != want) continue;
    return P;
  }
}

}  // namespace test_support
