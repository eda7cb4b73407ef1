#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <vector>

#include "core/grid.hpp"
#include "doctest.h"

using namespace psce;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField mode_field(const TorusGrid& g, int kx, int ky, double phase = 0.0) {
  ScalarField f(g);
  const auto& th = g.axis_coordinates();
  const std::size_t n = static_cast<std::size_t>(g.points_per_axis());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = th[i / n];
    const double y = th[i % n];
    f[i] = std::cos(kx * x + phase) * std::cos(ky * y);
  }
  return f;
}

}  // namespace

TEST_CASE("grid geometry and quadrature") {
  TorusGrid g(2, 32);
  CHECK(g.dim() == 2);
  CHECK(g.points_per_axis() == 32);
  CHECK(g.size() == 32u * 32u);
  CHECK(g.period() == doctest::Approx(2.0 * kPi));
  CHECK(g.volume() == doctest::Approx(4.0 * kPi * kPi));

  ScalarField one(g, std::vector<double>(g.size(), 1.0));
  CHECK(g.integrate(one) == doctest::Approx(4.0 * kPi * kPi));
  CHECK(g.mean(one) == doctest::Approx(1.0));

  // cos^2 integrates to half the volume.
  ScalarField c = mode_field(g, 3, 0);
  ScalarField c2(g);
  for (std::size_t i = 0; i < g.size(); ++i) c2[i] = c[i] * c[i];
  CHECK(g.integrate(c2) == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-12));
}

TEST_CASE("spectral laplacian is exact on trigonometric modes") {
  TorusGrid g(2, 32);
  for (auto [kx, ky] : {std::pair{1, 0}, {0, 2}, {3, 5}, {7, 1}}) {
    ScalarField f = mode_field(g, kx, ky, 0.4);
    ScalarField lap = g.laplacian(f);
    const double k2 = double(kx * kx + ky * ky);
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK(lap[i] == doctest::Approx(-k2 * f[i]).epsilon(1e-11));
  }
}

TEST_CASE("laplacian annihilates constants") {
  TorusGrid g(2, 16);
  ScalarField c(g, std::vector<double>(g.size(), 3.25));
  ScalarField lap = g.laplacian(c);
  CHECK(lap.max_abs() < 1e-13);
}

TEST_CASE("gradient and grad_sq agree with closed forms") {
  TorusGrid g(1, 64);
  ScalarField f(g);
  const auto& th = g.axis_coordinates();
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::sin(2.0 * th[i]);
  ScalarField df = g.gradient(f, 0);
  ScalarField gs = g.grad_sq(f);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double expect = 2.0 * std::cos(2.0 * th[i]);
    CHECK(df[i] == doctest::Approx(expect).epsilon(1e-11));
    CHECK(gs[i] == doctest::Approx(expect * expect).epsilon(1e-10));
  }
}

TEST_CASE("greens_solve inverts the laplacian on mean-zero data") {
  TorusGrid g(2, 32);
  ScalarField rho = mode_field(g, 2, 3);
  ScalarField phi = g.greens_solve(rho);
  CHECK(std::abs(g.mean(phi)) < 1e-13);
  ScalarField back = g.laplacian(phi);
  // Delta phi = rho - mean(rho); this rho is already mean-zero.
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(back[i] == doctest::Approx(rho[i]).epsilon(1e-10));
}

TEST_CASE("greens_solve subtracts the mean of the source") {
  TorusGrid g(2, 16);
  ScalarField rho = mode_field(g, 1, 1);
  for (auto& v : rho.values()) v += 2.0;  // nonzero mean
  ScalarField phi = g.greens_solve(rho);
  ScalarField back = g.laplacian(phi);
  const double mean = g.mean(rho);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(back[i] == doctest::Approx(rho[i] - mean).epsilon(1e-10));
}

TEST_CASE("helmholtz_solve inverts (laplacian + shift)") {
  TorusGrid g(2, 32);
  ScalarField rhs = mode_field(g, 2, 1);
  for (auto& v : rhs.values()) v += 0.5;
  const double shift = 2.75;
  ScalarField x = g.helmholtz_solve(rhs, shift);
  ScalarField lap = g.laplacian(x);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(lap[i] + shift * x[i] == doctest::Approx(rhs[i]).epsilon(1e-10));
}

TEST_CASE("inner product matches quadrature") {
  TorusGrid g(2, 16);
  ScalarField a = mode_field(g, 1, 0);
  ScalarField b = mode_field(g, 1, 0);
  CHECK(g.inner(a, b) == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-12));
  ScalarField c = mode_field(g, 2, 0);
  CHECK(std::abs(g.inner(a, c)) < 1e-12);  // orthogonal modes
}

TEST_CASE("unflatten matches row-major layout") {
  TorusGrid g(2, 8);
  auto idx = g.unflatten(8 * 3 + 5);
  REQUIRE(idx.size() == 2);
  CHECK(idx[0] == 3);
  CHECK(idx[1] == 5);
}

TEST_CASE("one-dimensional grids work end to end") {
  TorusGrid g(1, 128);
  ScalarField f(g);
  const auto& th = g.axis_coordinates();
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::cos(4.0 * th[i]);
  ScalarField lap = g.laplacian(f);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(lap[i] == doctest::Approx(-16.0 * f[i]).epsilon(1e-11));
}

TEST_CASE("invalid construction and mismatched fields are rejected") {
  CHECK_THROWS_AS(TorusGrid(0, 16), Error);
  CHECK_THROWS_AS(TorusGrid(2, 3), Error);
  TorusGrid a(2, 16), b(2, 32);
  CHECK(a.compatible(a));
  CHECK_FALSE(a.compatible(b));
  ScalarField fb(b);
  CHECK_THROWS_AS(a.check_field(fb), Error);
  CHECK_THROWS_AS(ScalarField(a, std::vector<double>(5, 1.0)), Error);
}

TEST_CASE("field min max and positivity flags") {
  TorusGrid g(1, 16);
  std::vector<double> vals(g.size(), 1.0);
  vals[3] = -2.0;
  vals[7] = 5.0;
  ScalarField f(g, vals);
  CHECK(f.min() == -2.0);
  CHECK(f.max() == 5.0);
  CHECK(f.max_abs() == 5.0);
  CHECK(f.all_finite());
  CHECK_FALSE(f.all_positive());
}
