#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "candual/errors.hpp"

namespace candual {

enum class QuadRule { CompositeSimpson, GaussLegendreComposite };

inline const char* rule_name(QuadRule r) noexcept {
  switch (r) {
    case QuadRule::CompositeSimpson: return "CompositeSimpson";
    case QuadRule::GaussLegendreComposite: return "GaussLegendreComposite";
  }
  return "?";
}

struct QuadResult {
  double value = 0.0;
  // One-refinement Richardson estimate plus a summation rounding floor; see
  // RadialGrid::integrate.
  double error_estimate = 0.0;
};

// A function of r on [a, b], sampled at grid nodes, normed in L^p.
struct Field {
  std::vector<double> values;
  double norm_exponent = 4.0;
};

// Quadrature grid on [a, b].  Every grid carries two weight vectors over the
// same node set: the fine rule and an embedded coarse rule one refinement
// level up, so integrate() can report a Richardson error estimate from a
// single pass over sampled values.
class RadialGrid {
 public:
  // Composite Simpson with `nodes` points (odd, >= 3).  The embedded coarse
  // rule uses every other node and exists when (nodes-1) % 4 == 0; otherwise
  // the error estimate degrades to the rounding floor alone.
  static RadialGrid simpson(double a, double b, int nodes);

  // Composite Gauss-Legendre with `cells` cells of `points` nodes each
  // (points in 2..5).  The node list is the union of the fine cells' nodes,
  // the nodes of the cells/2 coarse rule (cells even), and the two interval
  // endpoints carried with zero weight.
  static RadialGrid gauss_legendre(double a, double b, int cells,
                                   int points = 4);

  [[nodiscard]] double a() const noexcept { return a_; }
  [[nodiscard]] double b() const noexcept { return b_; }
  [[nodiscard]] QuadRule rule() const noexcept { return rule_; }
  [[nodiscard]] const std::vector<double>& nodes() const noexcept {
    return nodes_;
  }
  [[nodiscard]] const std::vector<double>& fine_weights() const noexcept {
    return w_fine_;
  }
  [[nodiscard]] std::int64_t size() const noexcept {
    return static_cast<std::int64_t>(nodes_.size());
  }

  // Integral of node-sampled values by the fine rule; error_estimate is
  // |fine - coarse| / (2^order - 1) plus a floor of a few ulps of the
  // absolute weighted sum, so downstream "<= k x estimate" checks cannot be
  // defeated by pure rounding noise.
  [[nodiscard]] QuadResult integrate(const std::vector<double>& values) const;
  [[nodiscard]] QuadResult integrate(const Field& f) const;

  void check_field(const Field& f) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> w_fine_;
  std::vector<double> w_coarse_;
  double richardson_gain_ = 0.0;  // 2^order - 1; 0 when no coarse rule
  QuadRule rule_ = QuadRule::CompositeSimpson;
  double a_ = 0.0;
  double b_ = 0.0;
};

// L^p distance of two fields over the grid (p = norm_exponent, default 4).
// Throws ExponentMismatch if the fields disagree on p.
[[nodiscard]] double l4_distance(const Field& u, const Field& v,
                                 const RadialGrid& grid);

// CSV import/export, columns "r,value", 17 significant digits (lossless
// decimal round-trip for binary64).
void write_field_csv(const std::string& path, const RadialGrid& grid,
                     const Field& f);
struct FieldCsv {
  std::vector<double> r;
  Field field;
};
[[nodiscard]] FieldCsv read_field_csv(const std::string& path);

namespace serial_ref {
// Plain left-to-right weighted sum; reference for the chunked reduction.
[[nodiscard]] double integrate_value(const RadialGrid& grid,
                                     const std::vector<double>& values);
}  // namespace serial_ref

}  // namespace candual
