#include "candual/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "candual/parallel.hpp"

namespace candual {
namespace {

double sample_at(double lo, double hi, std::int64_t n, std::int64_t i) {
  if (i == n - 1) return hi;
  return lo + static_cast<double>(i) * (hi - lo) / static_cast<double>(n - 1);
}

void check_scan_box(double lo, double hi, std::int64_t n) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("scan: requires finite lo < hi");
  }
  if (n < 2) {
    throw std::invalid_argument("scan: requires at least 2 samples");
  }
}

// Golden refinement of a grid argmin.  Only a strict V-shaped interior triple
// certifies a bracketed interior minimum; a boundary argmin (or a flat
// neighbour) stays on the grid point.
BruteMin refine_grid_min(const ScalarParams& P, double y_lo, double y_hi,
                         std::int64_t n, const par::ArgMin& best) {
  const double y = sample_at(y_lo, y_hi, n, best.index);
  if (best.index > 0 && best.index < n - 1) {
    const double left = sample_at(y_lo, y_hi, n, best.index - 1);
    const double right = sample_at(y_lo, y_hi, n, best.index + 1);
    if (eval_p(P, left) > best.value && eval_p(P, right) > best.value) {
      const GoldenResult g = golden_min(
          [&](double t) { return eval_p(P, t); }, left, right, 1e-10);
      if (g.value < best.value) return {g.x, g.value};
    }
  }
  return {y, best.value};
}

}  // namespace

GoldenResult golden_min(const std::function<double(double)>& f, double a,
                        double b, double tol) {
  if (!(a < b) || !(tol > 0.0)) {
    throw std::invalid_argument("golden_min: requires a < b and tol > 0");
  }
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 400 && b - a > tol; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 < f2 ? GoldenResult{x1, f1} : GoldenResult{x2, f2};
}

BruteMin brute_min_p(const ScalarParams& P, double y_lo, double y_hi,
                     std::int64_t n) {
  P.validate();
  check_scan_box(y_lo, y_hi, n);
  if (n < 3) {
    throw std::invalid_argument("brute_min_p: requires at least 3 samples");
  }
  const par::ArgMin best = par::deterministic_argmin(
      n, [&](std::int64_t i) { return eval_p(P, sample_at(y_lo, y_hi, n, i)); });
  return refine_grid_min(P, y_lo, y_hi, n, best);
}

std::vector<GridExtremum> grid_extrema_h(const ScalarParams& P, double lo,
                                         double hi, int n) {
  P.validate();
  check_scan_box(lo, hi, n);
  if (n < 3) {
    throw std::invalid_argument("grid_extrema_h: requires at least 3 samples");
  }
  if (P.tau != 0.0 && lo <= -P.mu && -P.mu <= hi) {
    throw IntervalContainsPole("grid_extrema_h: interval straddles -mu");
  }
  std::vector<double> hs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    hs[static_cast<std::size_t>(i)] = eval_h(P, sample_at(lo, hi, n, i));
  }
  const double tol = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
  std::vector<GridExtremum> out;
  for (int i = 1; i + 1 < n; ++i) {
    const double hm = hs[static_cast<std::size_t>(i - 1)];
    const double h0 = hs[static_cast<std::size_t>(i)];
    const double hp = hs[static_cast<std::size_t>(i + 1)];
    const double a = sample_at(lo, hi, n, i - 1);
    const double b = sample_at(lo, hi, n, i + 1);
    if (h0 < hm && h0 < hp) {
      const GoldenResult g =
          golden_min([&](double s) { return eval_h(P, s); }, a, b, tol);
      out.push_back({g.x, g.value, ExtremumKind::Minimum});
    } else if (h0 > hm && h0 > hp) {
      const GoldenResult g =
          golden_min([&](double s) { return -eval_h(P, s); }, a, b, tol);
      out.push_back({g.x, -g.value, ExtremumKind::Maximum});
    }
  }
  return out;
}

double fd_derivative(const std::function<double(double)>& f, double x,
                     int order, double h) {
  if (!(h > 0.0)) {
    throw std::invalid_argument("fd_derivative: requires h > 0");
  }
  if (order == 1) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
  }
  if (order == 2) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
  }
  throw std::invalid_argument("fd_derivative: order must be 1 or 2");
}

namespace {

struct SaddleScan {
  double u_lo, u_hi, s_lo, s_hi, xi0, slack;
  std::int64_t n;
};

SaddleScan saddle_setup(const ScalarParams& P, const CriticalPoint& cp,
                        double half_width, std::int64_t n) {
  P.validate();
  if (!(cp.sigma_bar > -P.mu)) {
    throw std::invalid_argument(
        "scan_xi_saddle: requires an Upper-branch point (sigma_bar > -mu)");
  }
  if (!(half_width > 0.0) || n < 2) {
    throw std::invalid_argument("scan_xi_saddle: bad scan box");
  }
  SaddleScan s;
  s.u_lo = cp.u_bar - half_width;
  s.u_hi = cp.u_bar + half_width;
  // Clip the sigma axis to the pole side the critical point lives on.
  s.s_lo = std::max(cp.sigma_bar - half_width,
                    -P.mu + 1e-12 * std::max(1.0, P.mu));
  s.s_hi = cp.sigma_bar + half_width;
  s.xi0 = eval_xi(P, cp.u_bar, cp.sigma_bar);
  s.slack = 1e-9 * std::max(1.0, std::abs(s.xi0));
  s.n = n;
  return s;
}

}  // namespace

bool scan_xi_saddle(const ScalarParams& P, const CriticalPoint& cp,
                    double half_width, int n) {
  const SaddleScan s = saddle_setup(P, cp, half_width, n);
  const bool u_side = par::deterministic_all(s.n, [&](std::int64_t i) {
    const double u = sample_at(s.u_lo, s.u_hi, s.n, i);
    return eval_xi(P, u, cp.sigma_bar) >= s.xi0 - s.slack;
  });
  if (!u_side) return false;
  return par::deterministic_all(s.n, [&](std::int64_t j) {
    const double sg = sample_at(s.s_lo, s.s_hi, s.n, j);
    return eval_xi(P, cp.u_bar, sg) <= s.xi0 + s.slack;
  });
}

namespace serial_ref {

BruteMin brute_min_p(const ScalarParams& P, double y_lo, double y_hi,
                     std::int64_t n) {
  P.validate();
  check_scan_box(y_lo, y_hi, n);
  if (n < 3) {
    throw std::invalid_argument("brute_min_p: requires at least 3 samples");
  }
  par::ArgMin best{0, eval_p(P, sample_at(y_lo, y_hi, n, 0))};
  for (std::int64_t i = 1; i < n; ++i) {
    const double v = eval_p(P, sample_at(y_lo, y_hi, n, i));
    if (v < best.value) {
      best.value = v;
      best.index = i;
    }
  }
  return refine_grid_min(P, y_lo, y_hi, n, best);
}

bool scan_xi_saddle(const ScalarParams& P, const CriticalPoint& cp,
                    double half_width, int n) {
  const SaddleScan s = saddle_setup(P, cp, half_width, n);
  for (std::int64_t i = 0; i < s.n; ++i) {
    const double u = sample_at(s.u_lo, s.u_hi, s.n, i);
    if (!(eval_xi(P, u, cp.sigma_bar) >= s.xi0 - s.slack)) return false;
  }
  for (std::int64_t j = 0; j < s.n; ++j) {
    const double sg = sample_at(s.s_lo, s.s_hi, s.n, j);
    if (!(eval_xi(P, cp.u_bar, sg) <= s.xi0 + s.slack)) return false;
  }
  return true;
}

}  // namespace serial_ref

std::vector<double> cubic_real_roots(double c3, double c2, double c1,
                                     double c0) {
  if (c3 == 0.0) {
    throw std::invalid_argument("cubic_real_roots: leading coefficient is 0");
  }
  const double a = c2 / c3;
  const double b = c1 / c3;
  const double c = c0 / c3;
  const double shift = a / 3.0;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;

  std::vector<double> ts;
  if (p == 0.0 && q == 0.0) {
    ts = {0.0, 0.0, 0.0};
  } else {
    const double disc = 0.25 * q * q + p * p * p / 27.0;
    if (disc < 0.0) {
      // Three distinct real roots: trigonometric form (p < 0 is implied).
      const double m = 2.0 * std::sqrt(-p / 3.0);
      const double arg =
          std::clamp(1.5 * q / p * std::sqrt(-3.0 / p), -1.0, 1.0);
      const double theta = std::acos(arg) / 3.0;
      constexpr double two_pi_3 = 2.0943951023931953;
      ts = {m * std::cos(theta), m * std::cos(theta - two_pi_3),
            m * std::cos(theta - 2.0 * two_pi_3)};
    } else if (disc == 0.0) {
      // Double root plus a simple one.
      ts = {3.0 * q / p, -1.5 * q / p, -1.5 * q / p};
    } else {
      // One real root: Cardano with the cancellation-free cube root.
      const double s = std::sqrt(disc);
      const double A = -std::copysign(std::cbrt(std::abs(q) / 2.0 + s), q);
      const double B = A == 0.0 ? 0.0 : -p / (3.0 * A);
      ts = {A + B};
    }
  }

  std::vector<double> roots;
  roots.reserve(ts.size());
  for (double t : ts) {
    double x = t - shift;
    // Two Newton corrections on the original polynomial; accepted only if
    // they reduce the residual, so double roots are left untouched.
    for (int it = 0; it < 2; ++it) {
      const double val = ((c3 * x + c2) * x + c1) * x + c0;
      const double der = (3.0 * c3 * x + 2.0 * c2) * x + c1;
      if (der == 0.0) break;
      const double next = x - val / der;
      const double val_next = ((c3 * next + c2) * next + c1) * next + c0;
      if (!std::isfinite(next) || std::abs(val_next) >= std::abs(val)) break;
      x = next;
    }
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::vector<double> dual_cubic_roots(const ScalarParams& P) {
  P.validate();
  const double a2 = P.alpha * P.alpha;
  return cubic_real_roots(2.0 / P.nu, a2 + 4.0 * P.mu / P.nu,
                          2.0 * P.mu * (a2 + P.mu / P.nu),
                          a2 * P.mu * P.mu - P.tau * P.tau);
}

}  // namespace candual
