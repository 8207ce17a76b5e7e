#pragma once

#include <algorithm>
#include <vector>

#include "candual/scalar.hpp"

namespace candual {

// Branches of the dual stationarity equation f(sigma) = tau^2, named by their
// bracket intervals right of the lower domain edge -nu alpha^2 / 2:
//   Upper  : sigma > -mu
//   Middle : rho < sigma < -mu
//   Lower  : -nu alpha^2/2 < sigma < rho
enum class Branch { Upper, Middle, Lower };

inline const char* branch_name(Branch b) noexcept {
  switch (b) {
    case Branch::Upper: return "Upper";
    case Branch::Middle: return "Middle";
    case Branch::Lower: return "Lower";
  }
  return "?";
}

enum class PointLabel {
  GlobalMin,
  LocalMin,
  LocalMax,
  Inflection,           // merged double root at rho (critical load)
  DoubleRootAtMinusMu,  // zero-load double root sitting on the pole
};

inline const char* label_name(PointLabel l) noexcept {
  switch (l) {
    case PointLabel::GlobalMin: return "GlobalMin";
    case PointLabel::LocalMin: return "LocalMin";
    case PointLabel::LocalMax: return "LocalMax";
    case PointLabel::Inflection: return "Inflection";
    case PointLabel::DoubleRootAtMinusMu: return "DoubleRootAtMinusMu";
  }
  return "?";
}

struct DualRoot {
  double sigma = 0.0;
  Branch branch = Branch::Upper;
  int multiplicity = 1;
  PointLabel label = PointLabel::GlobalMin;
};

struct CriticalPoint {
  double sigma_bar = 0.0;
  double u_bar = 0.0;
  double p_value = 0.0;
  double h_value = 0.0;
  double p_second = 0.0;  // p''(u_bar)
  PointLabel label = PointLabel::GlobalMin;
  Branch branch = Branch::Upper;
};

// Residual tolerance for accepting a dual root, scaled to the two natural
// magnitudes of f - tau^2.
[[nodiscard]] inline double dual_root_tol(const ScalarParams& P) noexcept {
  return 1e-12 * std::max({1.0, P.tau * P.tau, eta_of(P)});
}

// All real roots of f(sigma) = tau^2 on (-nu alpha^2/2, infinity), one per
// monotone branch of f, ordered Upper, Middle, Lower.  Double roots are
// reported once with multiplicity 2.  Throws NotDoubleWell outside the
// double-well parameter range and BracketFailure if the open upper bracket
// cannot be expanded to enclose the root.
[[nodiscard]] std::vector<DualRoot> solve_dual_equation(const ScalarParams& P);

// Critical points of p recovered from the dual roots through u = alpha +
// tau/(sigma+mu).  The zero-load double root at -mu expands into the two
// well minima alpha +- sqrt(alpha^2 - 2 mu/nu).
[[nodiscard]] std::vector<CriticalPoint> critical_points(const ScalarParams& P);

// Extremality identities re-evaluated from scratch at one critical point.
// Every residual is scaled by the natural magnitude of its identity, floored
// at 1, so the entries coincide with absolute errors for O(1) parameters but
// stay meaningful for heavy parameter draws.
struct DualityReport {
  double gap_p_h = 0.0;       // |p(u) - h(sigma)| / max(1, |p|, |h|)
  double gap_p_xi = 0.0;      // |p(u) - Xi(u, sigma)| / max(1, |p|, |Xi|)
  double stationarity = 0.0;  // |p'(u)| / max(1, sum of |terms of p'|)
  double dual_residual = 0.0; // |f(sigma) - tau^2| / max(1, tau^2, eta)
  double curvature_gap = 0.0; // |p''(u) - 3 (sigma - rho)|, same scaling

  static constexpr double tol = 1e-9;

  [[nodiscard]] double max_residual() const noexcept {
    return std::max({gap_p_h, gap_p_xi, stationarity, dual_residual,
                     curvature_gap});
  }
  [[nodiscard]] bool pass() const noexcept { return max_residual() <= tol; }
};

[[nodiscard]] DualityReport verify_duality(const ScalarParams& P,
                                           const CriticalPoint& cp);

}  // namespace candual
