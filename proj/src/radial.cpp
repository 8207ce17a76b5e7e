#include "candual/radial.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>

#include "candual/detail/gauss.hpp"
#include "candual/parallel.hpp"

namespace candual {

void MaterialParams::validate() const {
  if (!(alpha > 0.0) || !(mu > 0.0) || !(nu > 0.0) || !(tau_theta > 0.0)) {
    throw std::invalid_argument(
        "MaterialParams: alpha, mu, nu, tau_theta must be > 0");
  }
  if (!(0.0 < a) || !(a < b) || !std::isfinite(b)) {
    throw std::invalid_argument("MaterialParams: requires 0 < a < b < inf");
  }
}

ScalarParams MaterialParams::scalar_at(double r) const {
  return ScalarParams{alpha, mu, nu, -beta_r(*this, r)};
}

double sigma_r(const MaterialParams& mp, double r) noexcept {
  return mp.b * mp.b * mp.tau_theta / (r * r);
}

double beta_r(const MaterialParams& mp, double r) noexcept {
  return mp.alpha * mp.mu - sigma_r(mp, r);
}

RadialRegime regime_check(const MaterialParams& mp) {
  mp.validate();
  ScalarParams base{mp.alpha, mp.mu, mp.nu, 0.0};
  if (!(2.0 * mp.mu < mp.nu * mp.alpha * mp.alpha)) {
    throw NotDoubleWell("regime_check: requires 2*mu < nu*alpha^2");
  }
  const double eta = eta_of(base);
  const double ba = beta_r(mp, mp.a);
  const double bb = beta_r(mp, mp.b);
  if (ba == 0.0 || bb == 0.0 || (ba < 0.0) != (bb < 0.0)) {
    return RadialRegime::Mixed;  // beta vanishes somewhere on [a, b]
  }
  const double lo2 = std::min(ba * ba, bb * bb);
  const double hi2 = std::max(ba * ba, bb * bb);
  const double band = 2.0 * kCriticalBand * std::max(1.0, eta);
  if (lo2 > eta + band) return RadialRegime::CaseA;
  if (hi2 < eta - band) return RadialRegime::CaseB;
  return RadialRegime::Mixed;
}

double zeta_at(const MaterialParams& mp, double r, Branch branch) {
  const ScalarParams P = mp.scalar_at(r);
  for (const DualRoot& root : solve_dual_equation(P)) {
    if (root.branch == branch && root.multiplicity == 1) return root.sigma;
  }
  throw BranchUnavailable("zeta_at: branch has no root at this radius");
}

namespace {

double v_from(const MaterialParams& mp, double r, double beta, double zeta) {
  if (beta == 0.0) return mp.alpha / r;  // 0/0 := 0 convention
  return (mp.alpha - beta / (zeta + mp.mu)) / r;
}

void check_solve_regime(const MaterialParams& mp, Branch branch) {
  const RadialRegime regime = regime_check(mp);
  if (regime == RadialRegime::Mixed) {
    throw WrongRegime("solve_pointwise: Mixed regime has no certified case");
  }
  if (regime == RadialRegime::CaseA && branch != Branch::Upper) {
    throw BranchUnavailable(
        "solve_pointwise: only the Upper branch exists in CaseA");
  }
}

}  // namespace

double v_at(const MaterialParams& mp, double r, Branch branch) {
  return v_from(mp, r, beta_r(mp, r), zeta_at(mp, r, branch));
}

PointwiseSolution solve_pointwise(const MaterialParams& mp,
                                  const RadialGrid& grid, Branch branch) {
  check_solve_regime(mp, branch);
  const std::int64_t n = grid.size();
  PointwiseSolution sol;
  sol.zeta.values.resize(static_cast<std::size_t>(n));
  sol.v.values.resize(static_cast<std::size_t>(n));

  std::exception_ptr first_error;
  std::mutex error_mutex;
  par::parallel_for(n, [&](std::int64_t i) {
    try {
      const double r = grid.nodes()[static_cast<std::size_t>(i)];
      const double z = zeta_at(mp, r, branch);
      sol.zeta.values[static_cast<std::size_t>(i)] = z;
      sol.v.values[static_cast<std::size_t>(i)] =
          v_from(mp, r, beta_r(mp, r), z);
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  });
  if (first_error) std::rethrow_exception(first_error);
  return sol;
}

namespace serial_ref {

PointwiseSolution solve_pointwise(const MaterialParams& mp,
                                  const RadialGrid& grid, Branch branch) {
  check_solve_regime(mp, branch);
  PointwiseSolution sol;
  const std::size_t n = grid.nodes().size();
  sol.zeta.values.resize(n);
  sol.v.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid.nodes()[i];
    const double z = zeta_at(mp, r, branch);
    sol.zeta.values[i] = z;
    sol.v.values[i] = v_from(mp, r, beta_r(mp, r), z);
  }
  return sol;
}

}  // namespace serial_ref

QuadResult p_hat(const MaterialParams& mp, const RadialGrid& grid,
                 const Field& v) {
  mp.validate();
  grid.check_field(v);
  const std::int64_t n = grid.size();
  std::vector<double> integrand(static_cast<std::size_t>(n));
  par::parallel_for(n, [&](std::int64_t i) {
    const double r = grid.nodes()[static_cast<std::size_t>(i)];
    integrand[static_cast<std::size_t>(i)] =
        r * eval_p(mp.scalar_at(r), r * v.values[static_cast<std::size_t>(i)]);
  });
  QuadResult q = grid.integrate(integrand);
  constexpr double two_pi = 6.283185307179586;
  return {two_pi * q.value, two_pi * q.error_estimate};
}

QuadResult p_dual(const MaterialParams& mp, const RadialGrid& grid,
                  const Field& zeta) {
  mp.validate();
  grid.check_field(zeta);
  const std::int64_t n = grid.size();
  for (std::int64_t i = 0; i < n; ++i) {
    if (zeta.values[static_cast<std::size_t>(i)] == -mp.mu) {
      throw NodeAtPole("p_dual: field touches the pole at -mu");
    }
  }
  std::vector<double> quotient_form(static_cast<std::size_t>(n));
  std::vector<double> density_form(static_cast<std::size_t>(n));
  par::parallel_for(n, [&](std::int64_t i) {
    const std::size_t k = static_cast<std::size_t>(i);
    const double r = grid.nodes()[k];
    const double z = zeta.values[k];
    const double s = sigma_r(mp, r);
    const double num = s + mp.alpha * z;
    quotient_form[k] =
        -0.5 * r * (num * num / (z + mp.mu) + z * z / mp.nu);
    density_form[k] = r * eval_h(mp.scalar_at(r), z);
  });
  const QuadResult q1 = grid.integrate(quotient_form);
  const QuadResult q2 = grid.integrate(density_form);
  if (std::abs(q1.value - q2.value) > 1e-9 * std::max(1.0, std::abs(q1.value))) {
    throw std::logic_error("p_dual: integrand forms disagree");
  }
  constexpr double two_pi = 6.283185307179586;
  return {two_pi * q1.value, two_pi * q1.error_estimate};
}

// ---------------------------------------------------------------------------
// Divergence probe
// ---------------------------------------------------------------------------

namespace {

struct ProbeCell {
  double lo = 0.0;
  double hi = 0.0;
  double contrib = 0.0;    // 8-point Gauss-Legendre of beta^2/(zeta+mu)
  double min_denom = 0.0;  // min |zeta+mu| over the cell's nodes
  double max_ratio = 0.0;  // max beta^2/|zeta+mu| over the cell's nodes
};

constexpr int kProbeInitialCells = 64;
constexpr int kProbeExtraSplits = 4;  // per level, after the uniform pass
// Once a sampled integrand value exceeds this, the refinement has chased a
// pole of zeta+mu down to machine resolution: the cell holding it is about to
// hit the width floor, its Gauss value freezes, and the Cauchy test would
// stall into a false Converges.  Latch Diverges instead.
constexpr double kProbePoleRatio = 1e12;

using detail::kGl8Node;
using detail::kGl8Weight;

ProbeCell make_probe_cell(const MaterialParams& mp,
                          const std::function<double(double)>& zeta_rule,
                          double lo, double hi) {
  ProbeCell cell;
  cell.lo = lo;
  cell.hi = hi;
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double acc = 0.0;
  double min_denom = std::numeric_limits<double>::infinity();
  double max_ratio = 0.0;
  for (int k = 0; k < 8; ++k) {
    const double r = mid + half * kGl8Node[k];
    const double beta = beta_r(mp, r);
    const double denom = zeta_rule(r) + mp.mu;
    const double abs_denom = std::abs(denom);
    min_denom = std::min(min_denom, abs_denom);
    max_ratio = std::max(max_ratio, beta * beta / abs_denom);
    acc += half * kGl8Weight[k] * (beta * beta / denom);
  }
  cell.contrib = acc;
  cell.min_denom = min_denom;
  cell.max_ratio = max_ratio;
  return cell;
}

}  // namespace

ProbeResult a1_membership_probe(
    const MaterialParams& mp, const std::function<double(double)>& zeta_rule,
    int levels) {
  mp.validate();
  if (levels < 2) {
    throw std::invalid_argument("a1_membership_probe: requires levels >= 2");
  }

  std::vector<ProbeCell> cells;
  cells.reserve(static_cast<std::size_t>(kProbeInitialCells) << levels);
  for (int c = 0; c < kProbeInitialCells; ++c) {
    const double lo =
        mp.a + (mp.b - mp.a) * static_cast<double>(c) / kProbeInitialCells;
    const double hi = mp.a + (mp.b - mp.a) * static_cast<double>(c + 1) /
                                kProbeInitialCells;
    cells.push_back(make_probe_cell(mp, zeta_rule, lo, hi));
  }
  const double width_floor =
      64.0 * std::numeric_limits<double>::epsilon() *
      std::max({1.0, std::abs(mp.a), std::abs(mp.b)});

  auto split_cell = [&](std::size_t idx) {
    const ProbeCell cell = cells[idx];
    const double mid = 0.5 * (cell.lo + cell.hi);
    cells[idx] = make_probe_cell(mp, zeta_rule, cell.lo, mid);
    cells.push_back(make_probe_cell(mp, zeta_rule, mid, cell.hi));
  };

  ProbeResult out;
  bool poisoned = false;
  for (int level = 0; level < levels; ++level) {
    if (level > 0) {
      // Uniform pass: split every cell once.
      const std::size_t count = cells.size();
      for (std::size_t i = 0; i < count; ++i) {
        if (cells[i].hi - cells[i].lo > width_floor) split_cell(i);
      }
      // Concentration pass: a fixed extra budget on the smallest |zeta+mu|.
      for (int extra = 0; extra < kProbeExtraSplits; ++extra) {
        std::size_t worst = cells.size();
        for (std::size_t i = 0; i < cells.size(); ++i) {
          if (cells[i].hi - cells[i].lo <= width_floor) continue;
          if (worst == cells.size() ||
              cells[i].min_denom < cells[worst].min_denom ||
              (cells[i].min_denom == cells[worst].min_denom &&
               cells[i].lo < cells[worst].lo)) {
            worst = i;
          }
        }
        if (worst == cells.size()) break;
        split_cell(worst);
      }
    }
    std::sort(cells.begin(), cells.end(),
              [](const ProbeCell& x, const ProbeCell& y) { return x.lo < y.lo; });
    double estimate = 0.0;
    for (const ProbeCell& cell : cells) estimate += cell.contrib;
    if (!std::isfinite(estimate)) poisoned = true;
    out.estimates.push_back(estimate);
    out.node_counts.push_back(static_cast<std::int64_t>(cells.size()) * 8);
  }

  // Least-squares slope of estimate against level index.
  const std::size_t m = out.estimates.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(out.estimates[i])) break;
    const double x = static_cast<double>(i);
    sx += x;
    sy += out.estimates[i];
    sxx += x * x;
    sxy += x * out.estimates[i];
    ++used;
  }
  if (used >= 2) {
    const double denom = used * sxx - sx * sx;
    out.trend = denom == 0.0 ? 0.0 : (used * sxy - sx * sy) / denom;
  }

  bool pole_limited = false;
  for (const ProbeCell& cell : cells) {
    if (cell.max_ratio >= kProbePoleRatio) pole_limited = true;
  }

  const double last = out.estimates[m - 1];
  const double prev = out.estimates[m - 2];
  const bool cauchy =
      std::isfinite(last) && std::isfinite(prev) &&
      std::abs(last - prev) <= 1e-6 * std::max(1.0, std::abs(last));
  out.converges = cauchy && !poisoned && !pole_limited;
  out.limit = last;
  return out;
}

}  // namespace candual
