#include "candual/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "candual/parallel.hpp"

namespace candual {
namespace {

struct GlRule {
  int points;
  double node[5];    // on [-1, 1]
  double weight[5];
};

// Tabulated Gauss-Legendre rules, 2..5 points.
const GlRule kGlRules[] = {
    {2, {-0.5773502691896257, 0.5773502691896257}, {1.0, 1.0}},
    {3,
     {-0.7745966692414834, 0.0, 0.7745966692414834},
     {0.5555555555555556, 0.8888888888888889, 0.5555555555555556}},
    {4,
     {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
      0.8611363115940526},
     {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
      0.3478548451374538}},
    {5,
     {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
      0.9061798459386640},
     {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
      0.4786286704993665, 0.2369268850561891}},
};

const GlRule& gl_rule(int points) {
  for (const GlRule& r : kGlRules) {
    if (r.points == points) return r;
  }
  throw std::invalid_argument("gauss_legendre: points must be in 2..5");
}

void check_interval(double a, double b) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("RadialGrid: requires finite a < b");
  }
}

}  // namespace

RadialGrid RadialGrid::simpson(double a, double b, int nodes) {
  check_interval(a, b);
  if (nodes < 3 || nodes % 2 == 0) {
    throw std::invalid_argument("simpson: node count must be odd and >= 3");
  }
  RadialGrid g;
  g.rule_ = QuadRule::CompositeSimpson;
  g.a_ = a;
  g.b_ = b;
  const int n = nodes;
  const double h = (b - a) / (n - 1);
  g.nodes_.resize(static_cast<std::size_t>(n));
  g.w_fine_.assign(static_cast<std::size_t>(n), 0.0);
  g.w_coarse_.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    g.nodes_[static_cast<std::size_t>(i)] =
        i == n - 1 ? b : a + h * static_cast<double>(i);
    const double c = (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    g.w_fine_[static_cast<std::size_t>(i)] = h / 3.0 * c;
  }
  if ((n - 1) % 4 == 0 && n >= 5) {
    // Every-other-node Simpson as the embedded coarse rule.
    const int m = (n - 1) / 2;  // coarse intervals
    for (int j = 0; j <= m; ++j) {
      const double c = (j == 0 || j == m) ? 1.0 : (j % 2 ? 4.0 : 2.0);
      g.w_coarse_[static_cast<std::size_t>(2 * j)] = 2.0 * h / 3.0 * c;
    }
    g.richardson_gain_ = 15.0;  // order-4 rule, one halving
  }
  return g;
}

RadialGrid RadialGrid::gauss_legendre(double a, double b, int cells,
                                      int points) {
  check_interval(a, b);
  if (cells < 1) {
    throw std::invalid_argument("gauss_legendre: requires cells >= 1");
  }
  const GlRule& rule = gl_rule(points);

  struct Entry {
    double r, wf, wc;
  };
  std::vector<Entry> entries;
  entries.push_back({a, 0.0, 0.0});
  entries.push_back({b, 0.0, 0.0});
  auto add_cells = [&](int ncells, bool fine) {
    const double h = (b - a) / ncells;
    for (int c = 0; c < ncells; ++c) {
      const double lo = a + h * c;
      const double mid = lo + 0.5 * h;
      for (int k = 0; k < rule.points; ++k) {
        const double r = mid + 0.5 * h * rule.node[k];
        const double w = 0.5 * h * rule.weight[k];
        entries.push_back({r, fine ? w : 0.0, fine ? 0.0 : w});
      }
    }
  };
  add_cells(cells, true);
  const bool has_coarse = cells % 2 == 0 && cells >= 2;
  if (has_coarse) add_cells(cells / 2, false);

  std::sort(entries.begin(), entries.end(),
            [](const Entry& x, const Entry& y) { return x.r < y.r; });

  RadialGrid g;
  g.rule_ = QuadRule::GaussLegendreComposite;
  g.a_ = a;
  g.b_ = b;
  for (const Entry& e : entries) {
    if (!g.nodes_.empty() && g.nodes_.back() == e.r) {
      g.w_fine_.back() += e.wf;
      g.w_coarse_.back() += e.wc;
      continue;
    }
    g.nodes_.push_back(e.r);
    g.w_fine_.push_back(e.wf);
    g.w_coarse_.push_back(e.wc);
  }
  if (has_coarse) {
    g.richardson_gain_ = std::ldexp(1.0, 2 * rule.points) - 1.0;
  }
  return g;
}

void RadialGrid::check_field(const Field& f) const {
  if (f.values.size() != nodes_.size()) {
    throw std::invalid_argument("Field: size does not match grid");
  }
  for (double v : f.values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("Field: values must be finite");
    }
  }
}

QuadResult RadialGrid::integrate(const std::vector<double>& values) const {
  if (values.size() != nodes_.size()) {
    throw std::invalid_argument("integrate: size does not match grid");
  }
  const std::int64_t n = size();
  const double fine = par::deterministic_sum(
      n, [&](std::int64_t i) { return w_fine_[static_cast<std::size_t>(i)] *
                                      values[static_cast<std::size_t>(i)]; });
  const double absmass = par::deterministic_sum(
      n, [&](std::int64_t i) {
        return std::abs(w_fine_[static_cast<std::size_t>(i)] *
                        values[static_cast<std::size_t>(i)]);
      });
  const double floor = 4.0 * std::numeric_limits<double>::epsilon() * absmass;
  QuadResult out;
  out.value = fine;
  if (richardson_gain_ > 0.0) {
    const double coarse = par::deterministic_sum(
        n, [&](std::int64_t i) {
          return w_coarse_[static_cast<std::size_t>(i)] *
                 values[static_cast<std::size_t>(i)];
        });
    out.error_estimate = std::abs(fine - coarse) / richardson_gain_ + floor;
  } else {
    out.error_estimate = floor;
  }
  return out;
}

QuadResult RadialGrid::integrate(const Field& f) const {
  check_field(f);
  return integrate(f.values);
}

double l4_distance(const Field& u, const Field& v, const RadialGrid& grid) {
  if (u.norm_exponent != v.norm_exponent) {
    throw ExponentMismatch("l4_distance: fields carry different norm exponents");
  }
  const double p = u.norm_exponent;
  if (!(p >= 1.0)) {
    throw std::invalid_argument("l4_distance: norm exponent must be >= 1");
  }
  grid.check_field(u);
  grid.check_field(v);
  std::vector<double> integrand(u.values.size());
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const double d = std::abs(u.values[i] - v.values[i]);
    integrand[i] = p == 4.0 ? (d * d) * (d * d) : std::pow(d, p);
  }
  const double mass = std::max(0.0, grid.integrate(integrand).value);
  return std::pow(mass, 1.0 / p);
}

void write_field_csv(const std::string& path, const RadialGrid& grid,
                     const Field& f) {
  grid.check_field(f);
  std::ofstream out(path, std::ios::binary);  // binary: keep LF endings
  if (!out) {
    throw std::runtime_error("write_field_csv: cannot open " + path);
  }
  out << "r,value\n";
  char line[80];
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g\n", grid.nodes()[i],
                  f.values[i]);
    out << line;
  }
  if (!out) {
    throw std::runtime_error("write_field_csv: write failed for " + path);
  }
}

FieldCsv read_field_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("read_field_csv: cannot open " + path);
  }
  FieldCsv out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("r,", 0) == 0) continue;  // header row
    }
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("read_field_csv: malformed row: " + line);
    }
    try {
      out.r.push_back(std::stod(line.substr(0, comma)));
      out.field.values.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw std::runtime_error("read_field_csv: malformed row: " + line);
    }
  }
  return out;
}

namespace serial_ref {

double integrate_value(const RadialGrid& grid,
                       const std::vector<double>& values) {
  if (values.size() != grid.nodes().size()) {
    throw std::invalid_argument("integrate: size does not match grid");
  }
  const std::vector<double>& w = grid.fine_weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) acc += w[i] * values[i];
  return acc;
}

}  // namespace serial_ref
}  // namespace candual
