#include "candual/dual_solver.hpp"

#include <cmath>
#include <string>

namespace candual {
namespace {

double f_residual(const ScalarParams& P, double s) {
  return eval_f(P, s) - P.tau * P.tau;
}

double f_prime(const ScalarParams& P, double s) {
  return 6.0 / P.nu * (s + P.mu) * (s - rho_of(P));
}

// Bisection on a sign-changing bracket down to absolute width
// 1e-14 * max(1, initial width), then a few safeguarded Newton steps to pull
// the residual to the acceptance tolerance.  f is strictly monotone on each
// branch interval, so plain bisection cannot stall.
double solve_on_bracket(const ScalarParams& P, double lo, double hi,
                        const char* which) {
  double glo = f_residual(P, lo);
  double ghi = f_residual(P, hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if ((glo < 0.0) == (ghi < 0.0)) {
    throw BracketFailure(std::string("solve_dual_equation: no sign change on ") +
                         which + " bracket");
  }
  const double width_tol = 1e-14 * std::max(1.0, hi - lo);
  while (hi - lo > width_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval exhausted in precision
    const double gmid = f_residual(P, mid);
    if (gmid == 0.0) return mid;
    if ((gmid < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gmid;
    } else {
      hi = mid;
      ghi = gmid;
    }
  }
  double s = 0.5 * (lo + hi);
  const double tol = dual_root_tol(P);
  for (int it = 0; it < 5; ++it) {
    const double g = f_residual(P, s);
    if (std::abs(g) <= 0.01 * tol) break;
    const double dg = f_prime(P, s);
    if (dg == 0.0) break;
    const double next = s - g / dg;
    if (!(next > lo && next < hi)) break;  // keep the certified bracket
    s = next;
  }
  if (std::abs(f_residual(P, s)) > tol) {
    throw BracketFailure(std::string("solve_dual_equation: ") + which +
                         " root failed to meet residual tolerance");
  }
  return s;
}

double upper_root(const ScalarParams& P) {
  // f(-mu) = 0 < tau^2 and f grows like 2 sigma^3/nu, so the bracket
  // [-mu, -mu + w] closes after finitely many doublings of w.
  const double t2 = P.tau * P.tau;
  double w = 1.0;
  int doublings = 0;
  while (eval_f(P, -P.mu + w) <= t2) {
    w *= 2.0;
    if (++doublings > 200) {
      throw BracketFailure("solve_dual_equation: Upper bracket expansion cap");
    }
  }
  return solve_on_bracket(P, -P.mu, -P.mu + w, "Upper");
}

}  // namespace

std::vector<DualRoot> solve_dual_equation(const ScalarParams& P) {
  const RegimeInfo info = regime_info(P);
  const double rho = info.rho;
  const double lower_edge = -0.5 * P.nu * P.alpha * P.alpha;
  std::vector<DualRoot> roots;

  switch (info.regime) {
    case Regime::ZeroLoad:
      // f(sigma) = 0: double root on the pole plus the simple root at the
      // lower domain edge; both are exact.
      roots.push_back({-P.mu, Branch::Upper, 2, PointLabel::DoubleRootAtMinusMu});
      roots.push_back({lower_edge, Branch::Lower, 1, PointLabel::LocalMax});
      break;
    case Regime::SuperCritical:
      roots.push_back({upper_root(P), Branch::Upper, 1, PointLabel::GlobalMin});
      break;
    case Regime::Critical:
      roots.push_back({upper_root(P), Branch::Upper, 1, PointLabel::GlobalMin});
      // Middle and Lower branches merge at the stationary point of f.
      roots.push_back({rho, Branch::Middle, 2, PointLabel::Inflection});
      break;
    case Regime::SubCritical:
      roots.push_back({upper_root(P), Branch::Upper, 1, PointLabel::GlobalMin});
      roots.push_back({solve_on_bracket(P, rho, -P.mu, "Middle"), Branch::Middle,
                       1, PointLabel::LocalMin});
      roots.push_back({solve_on_bracket(P, lower_edge, rho, "Lower"),
                       Branch::Lower, 1, PointLabel::LocalMax});
      break;
  }
  return roots;
}

std::vector<CriticalPoint> critical_points(const ScalarParams& P) {
  const std::vector<DualRoot> roots = solve_dual_equation(P);
  std::vector<CriticalPoint> cps;

  auto emit = [&](double sigma, double u, PointLabel label, Branch branch) {
    CriticalPoint cp;
    cp.sigma_bar = sigma;
    cp.u_bar = u;
    cp.p_value = eval_p(P, u);
    cp.h_value = eval_h(P, sigma);
    cp.p_second = eval_p_deriv(P, u, 2);
    cp.label = label;
    cp.branch = branch;
    cps.push_back(cp);
  };

  for (const DualRoot& r : roots) {
    if (r.label == PointLabel::DoubleRootAtMinusMu) {
      // Zero load: the double root unfolds into the two well minima.
      const double spread =
          std::sqrt(P.alpha * P.alpha - 2.0 * P.mu / P.nu);
      emit(r.sigma, P.alpha + spread, PointLabel::GlobalMin, r.branch);
      emit(r.sigma, P.alpha - spread, PointLabel::GlobalMin, r.branch);
    } else {
      emit(r.sigma, u_of_sigma(P, r.sigma), r.label, r.branch);
    }
  }
  return cps;
}

// Each residual is scaled by the natural magnitude of its identity (floored
// at 1): an absolute 1e-9 would be unattainable for heavy parameter draws,
// where one ulp of the root already moves f by more than that, while the
// scaled residual stays a few ulps across the whole admissible range.
DualityReport verify_duality(const ScalarParams& P, const CriticalPoint& cp) {
  DualityReport rep;
  const double p = eval_p(P, cp.u_bar);
  const double h = eval_h(P, cp.sigma_bar);
  const double xi = eval_xi(P, cp.u_bar, cp.sigma_bar);
  rep.gap_p_h = std::abs(p - h) / std::max({1.0, std::abs(p), std::abs(h)});
  rep.gap_p_xi =
      std::abs(p - xi) / std::max({1.0, std::abs(p), std::abs(xi)});

  const double w = 0.5 * cp.u_bar * cp.u_bar - P.alpha * cp.u_bar;
  const double slope_scale =
      std::max(1.0, P.mu * std::abs(cp.u_bar) +
                        P.nu * std::abs(w) * std::abs(cp.u_bar - P.alpha) +
                        std::abs(P.tau + P.alpha * P.mu));
  rep.stationarity = std::abs(eval_p_deriv(P, cp.u_bar, 1)) / slope_scale;

  rep.dual_residual = std::abs(eval_f(P, cp.sigma_bar) - P.tau * P.tau) /
                      std::max({1.0, P.tau * P.tau, eta_of(P)});

  const double curv = eval_p_deriv(P, cp.u_bar, 2);
  const double curv_dual = 3.0 * (cp.sigma_bar - rho_of(P));
  rep.curvature_gap = std::abs(curv - curv_dual) /
                      std::max({1.0, std::abs(curv), std::abs(curv_dual)});
  return rep;
}

}  // namespace candual
