#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "candual/dual_solver.hpp"
#include "candual/scalar.hpp"

namespace candual {

// ---------------------------------------------------------------------------
// Brute-force oracles.  Everything in this header trades speed for
// independence from the closed-form machinery: dense scans, golden-section
// refinement, central differences and a direct cubic formula.  The solver
// modules are tested against these, never the other way around.
// ---------------------------------------------------------------------------

struct BruteMin {
  double y_star = 0.0;
  double p_star = 0.0;
};

struct GoldenResult {
  double x = 0.0;
  double value = 0.0;
};

// Golden-section minimisation of f on [a, b] down to bracket width tol.
[[nodiscard]] GoldenResult golden_min(const std::function<double(double)>& f,
                                      double a, double b, double tol);

// Dense scan of p over n uniform samples of [y_lo, y_hi]; an interior grid
// argmin with a strict V-shaped neighbour triple is refined by golden
// section, a boundary argmin is returned as the bare grid point.
[[nodiscard]] BruteMin brute_min_p(const ScalarParams& P, double y_lo,
                                   double y_hi, std::int64_t n);

enum class ExtremumKind { Minimum, Maximum };

struct GridExtremum {
  double sigma = 0.0;
  double h = 0.0;
  ExtremumKind kind = ExtremumKind::Minimum;
};

// Interior local extrema of the dual density on [lo, hi] located by an
// n-sample scan and sharpened by golden section.  Throws IntervalContainsPole
// if tau != 0 and the interval straddles -mu.
[[nodiscard]] std::vector<GridExtremum> grid_extrema_h(const ScalarParams& P,
                                                       double lo, double hi,
                                                       int n);

// Central finite difference of the given order (1 or 2) with step h.
[[nodiscard]] double fd_derivative(const std::function<double(double)>& f,
                                   double x, int order, double h);

// Grid confirmation of the saddle chain Xi(u_bar, s) <= Xi(u_bar, s_bar)
// <= Xi(u, s_bar) around an Upper-branch critical point (sigma_bar > -mu).
// Scans n points per axis over +-half_width; the sigma axis is clipped to
// stay above the pole.
[[nodiscard]] bool scan_xi_saddle(const ScalarParams& P,
                                  const CriticalPoint& cp, double half_width,
                                  int n);

// All real roots of c3 x^3 + c2 x^2 + c1 x + c0 (c3 != 0), with multiplicity,
// ascending.  Trigonometric form for three real roots, Cardano otherwise.
[[nodiscard]] std::vector<double> cubic_real_roots(double c3, double c2,
                                                   double c1, double c0);

// Roots of the dual equation obtained from the expanded cubic
//   (2/nu) s^3 + (alpha^2 + 4 mu/nu) s^2 + 2 mu (alpha^2 + mu/nu) s
//   + alpha^2 mu^2 - tau^2 = 0
// via cubic_real_roots; independent of the bracketing solver.
[[nodiscard]] std::vector<double> dual_cubic_roots(const ScalarParams& P);

// Plain single-threaded reference implementations of the scan kernels, kept
// for agreement tests and benchmarks against the chunked parallel versions.
namespace serial_ref {

[[nodiscard]] BruteMin brute_min_p(const ScalarParams& P, double y_lo,
                                   double y_hi, std::int64_t n);

[[nodiscard]] bool scan_xi_saddle(const ScalarParams& P,
                                  const CriticalPoint& cp, double half_width,
                                  int n);

}  // namespace serial_ref

}  // namespace candual
