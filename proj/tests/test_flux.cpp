#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gaplab/flux.hpp"
#include "gaplab/rational.hpp"

using namespace gaplab;

TEST_CASE("rational arithmetic is exact and reduced") {
  Rational a(1, 3), b(1, 6);
  CHECK(a + b == Rational(1, 2));
  CHECK(a - b == Rational(1, 6));
  CHECK(a * b == Rational(1, 18));
  CHECK(a / b == Rational(2));
  CHECK(Rational(-4, 8) == Rational(-1, 2));
  CHECK(Rational(3, -6) == Rational(-1, 2));
  CHECK((a - b) / (Rational(1, 4) - Rational(1, 5)) == Rational(10, 3));
  CHECK_THROWS(Rational(1, 0));
}

TEST_CASE("peierls phase: direct values and antisymmetry") {
  CHECK(peierls_phase({1, 0}, {0, 1}, 1.0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(peierls_phase({3.7, -2.0}, {3.7, -2.0}, 17.3) == doctest::Approx(0.0));
  CHECK(peierls_phase({2, 0}, {0, 3}, kTwoPi) == doctest::Approx(-6.0 * kTwoPi / 2.0));

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 1000; ++i) {
    Point2 x(u(rng), u(rng)), y(u(rng), u(rng));
    double b = u(rng);
    CHECK(peierls_phase(x, y, b) == doctest::Approx(-peierls_phase(y, x, b)).epsilon(1e-13));
  }
}

TEST_CASE("composition rule phi(x,y)+phi(y,x') = phi(x,x')+phi(x-y,y-x')") {
  // direct example
  Point2 x(1, 0), y(0, 0), xp(0, 1);
  CHECK(composition_defect(x, y, xp) == doctest::Approx(0.5));
  CHECK(peierls_phase(x - y, y - xp, 1.0) == doctest::Approx(0.5));
  // degenerate cases
  CHECK(composition_defect({1, 1}, {2, 2}, {3, 3}) == doctest::Approx(0.0));
  CHECK(composition_defect({4, -1}, {4, -1}, {0, 2}) == doctest::Approx(0.0));

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 10000; ++i) {
    Point2 a(u(rng), u(rng)), b(u(rng), u(rng)), c(u(rng), u(rng));
    double lhs = composition_defect(a, b, c);
    double rhs = peierls_phase(a - b, b - c, 1.0);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

namespace {

// independent Riemann-sum oracle on a barycentric grid, midpoint rule
double riemann_triangle(const Point2& a, const Point2& b, const Point2& c,
                        const FieldProfile& f, double lambda, int m) {
  double area = 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
  double cell = area / (m * m);
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m - i; ++j) {
      // "up" triangle centroid
      Point2 p = a + (b - a) * ((i + 1.0 / 3.0) / m) + (c - a) * ((j + 1.0 / 3.0) / m);
      acc += lambda * f.eval(lambda * p) * cell;
      if (j < m - i - 1) {
        Point2 q = a + (b - a) * ((i + 2.0 / 3.0) / m) + (c - a) * ((j + 2.0 / 3.0) / m);
        acc += lambda * f.eval(lambda * q) * cell;
      }
    }
  }
  return acc;
}

}  // namespace

TEST_CASE("triangle flux: constant field, zero field, oscillatory oracle") {
  FieldProfile unit = FieldProfile::constant(1.0);
  CHECK(triangle_flux({0, 0}, {1, 0}, {0, 1}, unit, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  // orientation reverses the sign
  CHECK(triangle_flux({0, 0}, {0, 1}, {1, 0}, unit, 1.0) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(triangle_flux({3, 1}, {9, 4}, {-2, 7}, unit, 0.0) == doctest::Approx(0.0));

  FieldProfile f;
  f.mean = 1.0;
  f.harmonics = {{1, 0, 1.0, false}};  // B = 1 + cos(2 pi x1)
  double quad = triangle_flux({0, 0}, {10, 0}, {0, 10}, f, 0.1);
  double oracle = riemann_triangle({0, 0}, {10, 0}, {0, 10}, f, 0.1, 1024);
  CHECK(quad == doctest::Approx(oracle).epsilon(5e-4));

  // constant field times signed area for a generic triangle
  FieldProfile b2 = FieldProfile::constant(2.5);
  double area = 0.5 * ((4.0 - 1.0) * (5.0 - 2.0) - (0.0 - 2.0) * (-3.0 - 1.0));
  CHECK(triangle_flux({1, 2}, {4, 0}, {-3, 5}, b2, 0.7) ==
        doctest::Approx(0.7 * 2.5 * area).epsilon(1e-10));
}

TEST_CASE("field profile validation") {
  FieldProfile f;
  f.mean = 1.0;
  f.harmonics = {{0, 0, 0.3, false}};
  CHECK_THROWS(f.validate());
  CHECK(FieldProfile::constant(2.0).eval({5.3, -1.2}) == doctest::Approx(2.0));
  FieldProfile g;
  g.mean = 1.0;
  g.harmonics = {{1, 0, 0.3, false}};
  CHECK(g.eval({0.0, 9.0}) == doctest::Approx(1.3));
  CHECK(g.eval({0.25, 0.0}) == doctest::Approx(1.0));
}

namespace {

// brute-force Farey oracle by gcd enumeration
std::vector<Rational> farey_oracle(int qmax) {
  std::vector<Rational> out;
  for (int q = 1; q <= qmax; ++q)
    for (int p = 0; p <= q; ++p)
      if (gcd64(p, q) == 1) out.emplace_back(p, q);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

TEST_CASE("farey fluxes ascend, are reduced, and match the gcd oracle") {
  auto f1 = farey_fluxes(1);
  REQUIRE(f1.size() == 2);
  CHECK(f1[0].phi() == Rational(0));
  CHECK(f1[1].phi() == Rational(1));

  auto f3 = farey_fluxes(3);
  REQUIRE(f3.size() == 5);
  CHECK(f3[1].phi() == Rational(1, 3));
  CHECK(f3[2].phi() == Rational(1, 2));
  CHECK(f3[3].phi() == Rational(2, 3));

  CHECK(farey_fluxes(5).size() == farey_oracle(5).size());
  CHECK(farey_fluxes(5).size() == 11);

  for (int qmax : {2, 7, 10}) {
    auto fs = farey_fluxes(qmax);
    auto oracle = farey_oracle(qmax);
    REQUIRE(fs.size() == oracle.size());
    for (std::size_t i = 0; i < fs.size(); ++i) {
      CHECK(fs[i].phi() == oracle[i]);
      CHECK(gcd64(fs[i].p, fs[i].q) == 1);
      if (i > 0) CHECK(fs[i - 1].phi() < fs[i].phi());
    }
  }
}
