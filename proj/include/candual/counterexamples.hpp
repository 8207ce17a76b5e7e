#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "candual/grid.hpp"
#include "candual/radial.hpp"

namespace candual {

// ---------------------------------------------------------------------------
// Constructions that break the naive extremality claims for the radial
// functionals: a dual sequence driving the dual functional to +inf, a field
// on which the dual integral is not even defined, and piecewise swaps showing
// the middle/lower pointwise branches are not local extrema of the primal
// functional in the L4 topology.
// ---------------------------------------------------------------------------

// zeta_n(r) = -mu - gamma * max(r - a, (b-a)/n).  Lies strictly inside
// (-nu*alpha^2/2, -mu) for 0 < gamma < gamma_max; the flat inner segment
// keeps 1/(zeta_n + mu) bounded so the dual integral stays finite for each n
// while growing like log n.
double blowup_gamma_max(const MaterialParams& mp);
double default_blowup_gamma(const MaterialParams& mp);
double blowup_zeta(const MaterialParams& mp, double gamma, std::int64_t n,
                   double r);

// Samples zeta_n on the nodes of `grid` (throws GammaOutOfRange outside the
// admissible range, std::invalid_argument for n < 1).  The grid-free
// overload samples on a uniform default grid over [a, b].
Field build_blowup_sequence(const MaterialParams& mp, double gamma,
                            std::int64_t n, const RadialGrid& grid);
Field build_blowup_sequence(const MaterialParams& mp, double gamma,
                            std::int64_t n);

struct BlowupReport {
  double gamma = 0.0;
  double gamma_max = 0.0;
  std::vector<std::int64_t> n_values;
  std::vector<double> pd_values;
  double slope_vs_log_n = 0.0;  // least-squares slope of pd against ln n
};

// Evaluates the dual functional on zeta_n for each n in n_list.  Requires
// beta^2 bounded away from zero on [a,b] (throws WrongRegime on a mixed
// regime).  The integral is done segment-wise: one Gauss panel on the flat
// inner piece, then octave-graded panels along the ramp where the integrand
// steepens toward r = a; every panel sees an analytic integrand, so the
// ladder values are accurate to near machine precision even at large n.
BlowupReport blowup_report(const MaterialParams& mp, double gamma,
                           const std::vector<std::int64_t>& n_list);

struct PerturbationRow {
  double eps = 0.0;
  double gap = 0.0;        // P_hat(v_bar) - P_hat(v_eps)
  double gap_error = 0.0;  // quadrature error estimate for gap
  double norm = 0.0;       // ||v_eps - v_bar||_4 (integral norm over [a,b])
  double norm_bound = 0.0; // eps^{1/4} * sup|difference| + tolerance
};

struct PerturbationReport {
  std::string kind;  // "mix" or "spike"
  std::vector<PerturbationRow> rows;
  double diff_sup = 0.0;  // sup of |difference field| over scanned nodes
  double diff_l4 = 0.0;   // ||difference field||_4 over the whole of [a,b]
  // spike-only certificate data (zero for kind == "mix"):
  double y_bar = 0.0;   // constant spike value
  double y0 = 0.0;      // threshold past which p_m exceeds big_m
  double big_m = 0.0;   // max over nodes of p_{-beta(r)}(r * v3(r))
  double m_load = 0.0;  // max |beta| over [a,b]
};

// v_eps = v1 on [a, a+eps], v2 elsewhere; rows carry
// P_hat(v2) - P_hat(v_eps) > 0 for every eps, with the norm of the
// perturbation shrinking like eps^{1/4}.  Requires the three-branch regime
// on all of [a,b] (throws WrongRegime otherwise); eps in (0, b-a], where
// eps = b-a swaps the whole field.
PerturbationReport mix_perturbation_report(const MaterialParams& mp,
                                           const std::vector<double>& eps_list);

// v_eps = y_bar on [a, a+eps], v3 elsewhere, with y_bar certified node-wise
// so that p_{-beta(r)}(r*y_bar) exceeds every value p takes along r*v3(r);
// rows carry P_hat(v3) - P_hat(v_eps) < 0 for every eps.  y_scale >= 1
// multiplies the certified spike (doubling it makes every gap strictly more
// negative).
PerturbationReport spike_perturbation_report(
    const MaterialParams& mp, const std::vector<double>& eps_list,
    double y_scale = 1.0);

struct DomgresitReport {
  double c = 0.0;       // subinterval where beta^2 >= gamma0 > 0
  double d = 0.0;
  double gamma0 = 0.0;  // min of beta^2 over [c,d]
  ProbeResult witness;  // zeta = -mu + (r-c) on (c,d): must diverge
  ProbeResult control;  // same field shifted by +0.1: must converge
};

// Witness that the constraint set of the dual functional contains fields on
// which the defining integral diverges: beta^2/(zeta+mu) ~ gamma0/(r-c) near
// r = c is non-integrable.  The shifted control field keeps the denominator
// >= 0.1 and the same probe settles, so the divergence verdict is not an
// artifact of the refinement scheme.
DomgresitReport domgresit_witness(const MaterialParams& mp, int levels = 11);

// --- serialization ---------------------------------------------------------

std::string to_json(const BlowupReport& rep);
std::string to_json(const PerturbationReport& rep);
std::string to_json(const DomgresitReport& rep);
std::string to_json(const ProbeResult& probe);

struct LadderRow {
  double parameter = 0.0;
  double gap = 0.0;
  double norm = 0.0;
};

std::vector<LadderRow> ladder_rows(const BlowupReport& rep);
std::vector<LadderRow> ladder_rows(const PerturbationReport& rep);

// CSV with header "parameter,gap,norm", one row per ladder entry, %.17g.
void write_ladder_csv(const std::string& path,
                      const std::vector<LadderRow>& rows);

}  // namespace candual
