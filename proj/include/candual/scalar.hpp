#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "candual/errors.hpp"

namespace candual {

// ---------------------------------------------------------------------------
// Scalar model
//
// Primal energy density (one radial direction, load tau):
//     p(y) = mu/2 y^2 + nu/2 (y^2/2 - alpha y)^2 - (tau + alpha mu) y
// Its canonical dual on sigma > -nu alpha^2 / 2, sigma != -mu:
//     h(sigma) = -1/2 (tau^2/(sigma+mu) + 2 alpha tau + alpha^2 (sigma+mu)
//                + sigma^2/nu)
// and the dual stationarity equation f(sigma) = tau^2 with
//     f(sigma) = (2 sigma/nu + alpha^2)(mu + sigma)^2.
// ---------------------------------------------------------------------------

struct ScalarParams {
  double alpha = 0.0;  // geometric offset, > 0
  double mu = 0.0;     // shear modulus, > 0
  double nu = 0.0;     // hardening modulus, > 0
  double tau = 0.0;    // dead load, any sign

  void validate() const {
    if (!(alpha > 0.0) || !(mu > 0.0) || !(nu > 0.0)) {
      throw std::invalid_argument("ScalarParams: alpha, mu, nu must be > 0");
    }
    if (!std::isfinite(alpha) || !std::isfinite(mu) || !std::isfinite(nu) ||
        !std::isfinite(tau)) {
      throw std::invalid_argument("ScalarParams: parameters must be finite");
    }
  }
};

enum class Regime {
  SuperCritical,  // tau^2 > eta: single well survives, unique dual root
  Critical,       // tau^2 == eta within band: double root at rho
  SubCritical,    // 0 < tau^2 < eta: three distinct dual roots
  ZeroLoad,       // tau == 0: double root collapses onto the pole at -mu
};

inline const char* regime_name(Regime r) noexcept {
  switch (r) {
    case Regime::SuperCritical: return "SuperCritical";
    case Regime::Critical: return "Critical";
    case Regime::SubCritical: return "SubCritical";
    case Regime::ZeroLoad: return "ZeroLoad";
  }
  return "?";
}

struct RegimeInfo {
  double rho = 0.0;  // stationary point of f right of the pole
  double eta = 0.0;  // critical load squared, f(rho)
  Regime regime = Regime::ZeroLoad;
};

// Relative half-width of the band around tau^2 == eta classified as Critical.
// Root separation scales like sqrt(|tau^2 - eta|); inside this band the two
// inner roots are numerically indistinguishable from the double root at rho.
inline constexpr double kCriticalBand = 1e-12;

[[nodiscard]] inline double eval_p(const ScalarParams& P, double y) noexcept {
  const double w = 0.5 * y * y - P.alpha * y;
  return 0.5 * P.mu * y * y + 0.5 * P.nu * w * w - (P.tau + P.alpha * P.mu) * y;
}

// order 1 or 2; the factored forms share the well term w = y^2/2 - alpha y.
[[nodiscard]] inline double eval_p_deriv(const ScalarParams& P, double y,
                                         int order) {
  const double w = 0.5 * y * y - P.alpha * y;
  if (order == 1) {
    return P.mu * y + P.nu * w * (y - P.alpha) - (P.tau + P.alpha * P.mu);
  }
  if (order == 2) {
    const double d = y - P.alpha;
    return P.mu + P.nu * (w + d * d);
  }
  throw std::invalid_argument("eval_p_deriv: order must be 1 or 2");
}

// Dual density.  The tau^2/(sigma+mu) term is singular at -mu; with tau == 0
// the term vanishes identically and the evaluation extends continuously.
[[nodiscard]] inline double eval_h(const ScalarParams& P, double sigma) {
  const double s = sigma + P.mu;
  double pole_term = 0.0;
  if (P.tau != 0.0) {
    if (s == 0.0) {
      throw PoleAtMinusMu("eval_h: sigma == -mu with nonzero load");
    }
    pole_term = P.tau * P.tau / s;
  }
  return -0.5 * (pole_term + 2.0 * P.alpha * P.tau + P.alpha * P.alpha * s +
                 sigma * sigma / P.nu);
}

[[nodiscard]] inline double eval_f(const ScalarParams& P,
                                   double sigma) noexcept {
  const double s = sigma + P.mu;
  return (2.0 * sigma / P.nu + P.alpha * P.alpha) * s * s;
}

// Total complementary function; saddle structure in (u, sigma) is the object
// the extremality scans probe.
[[nodiscard]] inline double eval_xi(const ScalarParams& P, double u,
                                    double sigma) noexcept {
  return 0.5 * u * u * (sigma + P.mu) - P.alpha * u * sigma -
         0.5 * sigma * sigma / P.nu - (P.tau + P.alpha * P.mu) * u;
}

// Stationarity of Xi in sigma at fixed u.
[[nodiscard]] inline double sigma_of_u(const ScalarParams& P,
                                       double u) noexcept {
  return P.nu * (0.5 * u * u - P.alpha * u);
}

// Stationarity of Xi in u at fixed sigma.  The 0/0 limit at the zero-load
// double root is resolved to the well centre alpha; a genuine pole (tau != 0)
// is an error.
[[nodiscard]] inline double u_of_sigma(const ScalarParams& P, double sigma) {
  const double s = sigma + P.mu;
  if (P.tau == 0.0) {
    return P.alpha;
  }
  if (s == 0.0) {
    throw PoleAtMinusMu("u_of_sigma: sigma == -mu with nonzero load");
  }
  return P.alpha + P.tau / s;
}

[[nodiscard]] inline double rho_of(const ScalarParams& P) noexcept {
  return -(P.mu + P.nu * P.alpha * P.alpha) / 3.0;
}

[[nodiscard]] inline double eta_of(const ScalarParams& P) noexcept {
  const double g = P.nu * P.alpha * P.alpha - 2.0 * P.mu;
  return g * g * g / (27.0 * P.nu);
}

// Classifies the load against the critical value eta = f(rho).  Requires the
// double-well condition 2 mu < nu alpha^2.
[[nodiscard]] inline RegimeInfo regime_info(const ScalarParams& P) {
  P.validate();
  if (!(2.0 * P.mu < P.nu * P.alpha * P.alpha)) {
    throw NotDoubleWell("regime_info: requires 2*mu < nu*alpha^2");
  }
  RegimeInfo info;
  info.rho = rho_of(P);
  info.eta = eta_of(P);
  const double t2 = P.tau * P.tau;
  if (P.tau == 0.0) {
    info.regime = Regime::ZeroLoad;
  } else if (std::abs(t2 - info.eta) <=
             kCriticalBand * std::max(1.0, info.eta)) {
    info.regime = Regime::Critical;
  } else if (t2 > info.eta) {
    info.regime = Regime::SuperCritical;
  } else {
    info.regime = Regime::SubCritical;
  }
  return info;
}

}  // namespace candual
