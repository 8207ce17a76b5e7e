#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "candual/errors.hpp"
#include "candual/grid.hpp"

using namespace candual;

namespace {

std::vector<double> sample(const RadialGrid& g, double (*f)(double)) {
  std::vector<double> v(g.nodes().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g.nodes()[i]);
  return v;
}

double cube(double r) { return r * r * r; }
double inv(double r) { return 1.0 / r; }
double septic(double r) {
  const double r2 = r * r;
  return r2 * r2 * r2 * r - 2.0 * r2 * r + 0.5 * r;
}

}  // namespace

TEST_CASE("factory validation") {
  CHECK_THROWS_AS(RadialGrid::simpson(0.0, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(RadialGrid::simpson(0.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(RadialGrid::simpson(2.0, 1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(RadialGrid::gauss_legendre(0.0, 1.0, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(RadialGrid::gauss_legendre(0.0, 1.0, 4, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(RadialGrid::gauss_legendre(0.0, 1.0, 4, 6),
                  std::invalid_argument);
}

TEST_CASE("node layout") {
  const RadialGrid g = RadialGrid::simpson(1.0, 2.0, 9);
  CHECK(g.size() == 9);
  CHECK(g.nodes().front() == 1.0);
  CHECK(g.nodes().back() == 2.0);
  CHECK(g.a() == 1.0);
  CHECK(g.b() == 2.0);
  for (std::size_t i = 1; i < g.nodes().size(); ++i) {
    CHECK(g.nodes()[i] > g.nodes()[i - 1]);
  }
  const RadialGrid gl = RadialGrid::gauss_legendre(1.0, 2.0, 8, 4);
  CHECK(gl.nodes().front() == 1.0);  // zero-weight endpoint carriers
  CHECK(gl.nodes().back() == 2.0);
  for (std::size_t i = 1; i < gl.nodes().size(); ++i) {
    CHECK(gl.nodes()[i] > gl.nodes()[i - 1]);
  }
}

TEST_CASE("simpson is exact on cubics") {
  const RadialGrid g = RadialGrid::simpson(0.0, 2.0, 5);
  const QuadResult q = g.integrate(sample(g, cube));
  CHECK(std::abs(q.value - 4.0) < 1e-14);  // int_0^2 r^3 = 4
  CHECK(q.error_estimate >= 0.0);
  CHECK(std::abs(q.value - 4.0) <= 10.0 * q.error_estimate + 1e-13);
}

TEST_CASE("gauss-legendre panels are exact up to degree 2p-1") {
  const RadialGrid g = RadialGrid::gauss_legendre(0.0, 1.0, 4, 4);
  const QuadResult q = g.integrate(sample(g, septic));
  const double exact = 1.0 / 8.0 - 2.0 / 4.0 + 0.5 / 2.0;  // -0.125
  CHECK(std::abs(q.value - exact) < 1e-14);
}

TEST_CASE("richardson estimate bounds the true error for smooth functions") {
  const double exact = std::log(2.0);
  for (int nodes : {17, 33, 65, 129}) {
    const RadialGrid g = RadialGrid::simpson(1.0, 2.0, nodes);
    const QuadResult q = g.integrate(sample(g, inv));
    CHECK(std::abs(q.value - exact) <= 10.0 * q.error_estimate);
  }
  for (int cells : {4, 8, 16}) {
    const RadialGrid g = RadialGrid::gauss_legendre(1.0, 2.0, cells, 3);
    const QuadResult q = g.integrate(sample(g, inv));
    CHECK(std::abs(q.value - exact) <= 10.0 * q.error_estimate);
  }
}

TEST_CASE("simpson converges at fourth order") {
  const double exact = std::log(2.0);
  double prev = 0.0;
  for (int k = 0; k < 4; ++k) {
    const int nodes = 16 * (1 << k) + 1;
    const RadialGrid g = RadialGrid::simpson(1.0, 2.0, nodes);
    const double err = std::abs(g.integrate(sample(g, inv)).value - exact);
    if (k > 0 && err > 1e-14) {
      CHECK(prev / err > 12.0);  // ~16x per halving
      CHECK(prev / err < 20.0);
    }
    prev = err;
  }
}

TEST_CASE("integrate validates sizes and finiteness") {
  const RadialGrid g = RadialGrid::simpson(0.0, 1.0, 5);
  CHECK_THROWS_AS((void)g.integrate(std::vector<double>(4, 1.0)),
                  std::invalid_argument);
  Field f;
  f.values.assign(5, 1.0);
  CHECK_NOTHROW(g.check_field(f));
  f.values[2] = std::nan("");
  CHECK_THROWS_AS(g.check_field(f), std::invalid_argument);
  f.values.assign(3, 1.0);
  CHECK_THROWS_AS(g.check_field(f), std::invalid_argument);
}

TEST_CASE("l4 distance") {
  const RadialGrid g = RadialGrid::simpson(1.0, 2.0, 257);
  Field u, v;
  u.values.assign(g.nodes().size(), 0.75);
  v.values.assign(g.nodes().size(), 0.75);
  CHECK(l4_distance(u, v, g) == 0.0);

  // Constant difference of 1 over a unit interval: norm is exactly 1.
  for (double& x : v.values) x += 1.0;
  CHECK(l4_distance(u, v, g) == doctest::Approx(1.0).epsilon(1e-13));

  // Constant difference c over [a, a+eps]: norm is c * eps^{1/4}.
  const double eps = 0.0625, c = 3.0;
  const RadialGrid sub = RadialGrid::simpson(1.0, 1.0 + eps, 257);
  Field su, sv;
  su.values.assign(sub.nodes().size(), 0.0);
  sv.values.assign(sub.nodes().size(), c);
  CHECK(l4_distance(su, sv, sub) ==
        doctest::Approx(c * std::pow(eps, 0.25)).epsilon(1e-13));

  Field w = v;
  w.norm_exponent = 2.0;
  CHECK_THROWS_AS((void)l4_distance(u, w, g), ExponentMismatch);

  // p = 2 on both sides: plain L2 distance.
  Field u2 = u, v2 = v;
  u2.norm_exponent = v2.norm_exponent = 2.0;
  CHECK(l4_distance(u2, v2, g) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("field csv round trip is bitwise") {
  const RadialGrid g = RadialGrid::simpson(1.0, 2.0, 33);
  Field f;
  f.values.resize(g.nodes().size());
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    f.values[i] = std::sin(1e6 * static_cast<double>(i + 1)) / 3.0 + 1e-17;
  }
  const std::string path = "test_grid_roundtrip.csv";
  write_field_csv(path, g, f);
  const FieldCsv back = read_field_csv(path);
  REQUIRE(back.r.size() == g.nodes().size());
  for (std::size_t i = 0; i < back.r.size(); ++i) {
    CHECK(back.r[i] == g.nodes()[i]);
    CHECK(back.field.values[i] == f.values[i]);
  }
  std::remove(path.c_str());
}

TEST_CASE("serial reference integration agrees with the deployed kernel") {
  const RadialGrid g = RadialGrid::simpson(1.0, 2.0, 4097);
  const std::vector<double> vals = sample(g, inv);
  const double dep = g.integrate(vals).value;
  const double ref = serial_ref::integrate_value(g, vals);
  CHECK(std::abs(dep - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
}
