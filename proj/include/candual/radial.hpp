#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "candual/dual_solver.hpp"
#include "candual/grid.hpp"
#include "candual/scalar.hpp"

namespace candual {

// ---------------------------------------------------------------------------
// Radial shear layer: an annulus [a, b] under boundary shear stress
// tau_theta.  The stress profile sigma(r) = b^2 tau_theta / r^2 induces the
// pointwise load -beta(r) = sigma(r) - alpha mu, so every node carries its
// own scalar problem and the functionals become weighted integrals
//   P_hat(v)  = 2 pi Int r p_{-beta(r)}(r v(r)) dr
//   P_dual(z) = -pi Int r ((sigma + alpha z)^2/(z + mu) + z^2/nu) dr.
// ---------------------------------------------------------------------------

struct MaterialParams {
  double alpha = 0.0;
  double mu = 0.0;
  double nu = 0.0;
  double tau_theta = 0.0;  // boundary shear stress, > 0
  double a = 0.0;          // inner radius
  double b = 0.0;          // outer radius

  void validate() const;

  // The scalar problem seen at radius r (tau = -beta(r)).
  [[nodiscard]] ScalarParams scalar_at(double r) const;
};

[[nodiscard]] double sigma_r(const MaterialParams& mp, double r) noexcept;
[[nodiscard]] double beta_r(const MaterialParams& mp, double r) noexcept;

// CaseA: beta^2 > eta on all of [a,b] (single dual branch, global minimum).
// CaseB: 0 < beta^2 < eta on all of [a,b] (three branches).
// Mixed: anything else, including beta vanishing inside the annulus.
enum class RadialRegime { CaseA, CaseB, Mixed };

inline const char* radial_regime_name(RadialRegime r) noexcept {
  switch (r) {
    case RadialRegime::CaseA: return "CaseA";
    case RadialRegime::CaseB: return "CaseB";
    case RadialRegime::Mixed: return "Mixed";
  }
  return "?";
}

// Classification by the endpoint values of beta^2 (beta is monotone
// increasing in r) with a zero-crossing check.  Comparisons against eta keep
// a margin of twice the scalar Critical band, so a certified CaseA/CaseB
// never contains nodes inside the band where branch counts are ambiguous.
[[nodiscard]] RadialRegime regime_check(const MaterialParams& mp);

// Pointwise dual root / primal velocity at radius r on the given branch.
// Throws BranchUnavailable if the node's regime lacks the branch.
[[nodiscard]] double zeta_at(const MaterialParams& mp, double r, Branch branch);
[[nodiscard]] double v_at(const MaterialParams& mp, double r, Branch branch);

struct PointwiseSolution {
  Field zeta;
  Field v;
};

// Nodewise dual solve over the grid.  Requires regime_check to be CaseA
// (Upper branch only) or CaseB (all three branches); Mixed throws
// WrongRegime.
[[nodiscard]] PointwiseSolution solve_pointwise(const MaterialParams& mp,
                                                const RadialGrid& grid,
                                                Branch branch);

// P_hat(v) with Richardson error estimate (both scaled by 2 pi).
[[nodiscard]] QuadResult p_hat(const MaterialParams& mp, const RadialGrid& grid,
                               const Field& v);

// P_dual(zeta): evaluated in the quotient form above and re-evaluated in the
// equivalent dual-density form; disagreement beyond 1e-9 relative signals a
// broken build and throws std::logic_error.  Throws NodeAtPole when a node
// sits exactly on zeta = -mu.
[[nodiscard]] QuadResult p_dual(const MaterialParams& mp, const RadialGrid& grid,
                                const Field& zeta);

// Divergence probe for Int beta^2/(zeta + mu) dr, the membership test for
// the dual functional's natural domain.
struct ProbeResult {
  bool converges = false;
  double limit = 0.0;   // last estimate (the extrapolated value if Cauchy)
  double trend = 0.0;   // least-squares slope of estimate vs level
  std::vector<double> estimates;
  std::vector<std::int64_t> node_counts;
};

// Evaluates the integral on `levels` successively refined grids: every cell
// splits once per level and a fixed extra budget goes to the cells whose
// nodes carry the smallest |zeta + mu|.  Converges iff the final relative
// change is <= 1e-6 with finite estimates and no node ever sampled an
// integrand magnitude beyond 1e12 (which means the refinement chased a pole
// of zeta + mu to machine resolution, where the cell width floors out and
// the stalled estimates would fake a Cauchy sequence).  Anything else,
// including overflow to non-finite values, is Diverges with the fitted
// trend.
[[nodiscard]] ProbeResult a1_membership_probe(
    const MaterialParams& mp, const std::function<double(double)>& zeta_rule,
    int levels);

namespace serial_ref {
// Naive single-threaded nodewise solve; reference for the parallel kernel.
[[nodiscard]] PointwiseSolution solve_pointwise(const MaterialParams& mp,
                                                const RadialGrid& grid,
                                                Branch branch);
}  // namespace serial_ref

}  // namespace candual
