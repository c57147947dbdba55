#include <cmath>
#include <numbers>

#include "adiamorse/geometry.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace adiamorse;
using doctest::Approx;
using std::numbers::pi;

namespace {

std::shared_ptr<CharPolyField> grover_field(long long N) {
  auto path = std::make_shared<HamiltonianPath>(build_grover_reduced(N));
  return std::make_shared<CharPolyField>(path, window_from_path(*path, 0.25, 0.25));
}

FieldPtr poly(PolynomialField::Coeffs c, Window w) {
  return std::make_shared<PolynomialField>(std::move(c), w);
}

CurvatureReport grover_report(long long N) {
  const auto f = grover_field(N);
  const auto c = find_critical_points(*f);
  return curvature_report(*f, c.points.at(0), std::pair{0.0, 1.0});
}

// Saddle report built directly from conic parameters.
CurvatureReport conic(double f_p, double k1, double k2, double s_p = 0.0) {
  CurvatureReport r;
  r.k1 = k1;
  r.k2 = k2;
  r.dupin = {f_p, k1, k2, k2, s_p};
  return r;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("gauss curvature") {
  for (long long N : {4LL, 64LL}) {
    const auto f = grover_field(N);
    CHECK(gauss_curvature(*f, 0.5, 0.5) == Approx(-4.0 * (1 - 1.0 / N)).epsilon(1e-9));
  }
  const auto flat = poly({{{0, 0}, 3.0}}, {-1, 1, -1, 1});
  CHECK(gauss_curvature(*flat, 0.2, -0.4) == 0.0);
  CHECK(gauss_curvature(*fixtures::quadratic(2, 2, {-1, 1, -1, 1}), 0, 0) == Approx(4.0));
}

TEST_CASE("printed numerator differs only off the critical set") {
  const auto f = grover_field(4);
  CHECK(gauss_curvature(*f, 0.5, 0.5, CurvatureFormula::Printed) ==
        Approx(gauss_curvature(*f, 0.5, 0.5)).epsilon(1e-12));
  CHECK(gauss_curvature(*f, 0.1, 0.9, CurvatureFormula::Printed) !=
        Approx(gauss_curvature(*f, 0.1, 0.9)).epsilon(1e-3));
}

TEST_CASE("principal curvatures") {
  const auto r = grover_report(16);
  CHECK(r.k1 == Approx(-2.0 * 15 / 16).epsilon(1e-9));
  CHECK(r.k2 == Approx(2.0).epsilon(1e-9));

  const auto h = poly({{{0, 2}, 1.0}, {{2, 0}, -1.0}}, {-1, 1, -1, 1});
  const auto [a, b] = principal_curvatures(*h, classify(*h, {0, 0}));
  CHECK(a == Approx(-2));
  CHECK(b == Approx(2));

  const auto cap = fixtures::quadratic(-2, -2, {-1, 1, -1, 1});
  const auto [c, d] = principal_curvatures(*cap, classify(*cap, {0, 0}));
  CHECK(c == Approx(-2));
  CHECK(d == Approx(-2));

  const auto m = fixtures::monkey_saddle();
  CHECK_THROWS_AS(principal_curvatures(*m, classify(*m, {0, 0})), Error);
}

TEST_CASE("dupin gap") {
  for (long long N : {4LL, 1024LL}) {
    const auto r = grover_report(N);
    CHECK(dupin_gap(r, 0.5) == Approx(1 / std::sqrt(double(N))).epsilon(1e-9));
    // The Grover landscape is globally quadratic, so the model is exact.
    for (double s : {0.0, 0.2, 0.9}) {
      const auto [lo, hi] = oracle::grover_levels(N, s);
      CHECK(dupin_gap(r, s) == Approx(hi - lo).epsilon(1e-9));
    }
  }
  CHECK(dupin_gap(grover_report(4), 0.0) == Approx(1.0).epsilon(1e-12));
  CHECK(dupin_gap(conic(0.0, -1.0, 2.0, 0.3), 0.3) == 0.0);
  // Open conic: slices near s_p miss it.
  CHECK_THROWS_AS(dupin_gap(conic(0.5, -1.0, 2.0), 0.1), Error);
}

TEST_CASE("delay factor") {
  CHECK(delay_factor(grover_report(4), {0, 1}) == Approx(4 * pi / (3 * std::sqrt(3.0))).epsilon(1e-10));
  const auto r = grover_report(1 << 20);
  CHECK(delay_factor(r, {0, 1}) == Approx(pi / 2 * 1024 - 1).epsilon(2e-3));
  CHECK(delay_factor(r, {0, 1}) == Approx(delay_factor_closed_form(r, {0, 1})).epsilon(1e-9));
  CHECK(delay_factor(r, {0, 1}) == Approx(oracle::grover_delay(1 << 20)).epsilon(1e-9));

  // Nearly flat gap g = c.
  const double c = 0.3;
  const auto flat = conic(-c * c / 4, -1e-14, 2.0);
  CHECK(delay_factor(flat, {0, 1}) == Approx(1 / (c * c)).epsilon(1e-9));

  // Gap closes at |u| = 1/sqrt(2): divergent inside, finite outside.
  const auto open = conic(0.25, -1.0, 2.0);
  CHECK_THROWS_AS(delay_factor(open, {0, 1}), Error);
  CHECK(delay_factor(open, {1, 2}) == Approx(delay_factor_closed_form(open, {1, 2})).epsilon(1e-9));
  CHECK_THROWS_AS(delay_factor(open, {0.1, 0.2}), Error);
}

TEST_CASE("gauss-bonnet budgets") {
  const double L = 40;
  const Window w{-L, L, -L, L};
  const auto saddle = gauss_bonnet_integral(*fixtures::quadratic(-1, 1, w), w);
  CHECK(saddle.converged);
  CHECK(saddle.value == Approx(-2 * pi).epsilon(0.05));

  const auto bowl = gauss_bonnet_integral(*fixtures::quadratic(2, 2, w), w);
  CHECK(bowl.value == Approx(2 * pi).epsilon(0.05));

  const auto flat = gauss_bonnet_integral(*poly({{{0, 0}, 1.0}}, w), w);
  CHECK(flat.value == 0.0);
  CHECK(flat.converged);

  CHECK_THROWS_AS(gauss_bonnet_integral(*fixtures::quadratic(1, 1, w), {-50, 0, 0, 1}), Error);
}

TEST_CASE("spectrum trace: grover") {
  const auto t = spectrum_trace(*grover_field(4));
  REQUIRE(t.branches.size() == 2);
  CHECK_FALSE(t.ambiguous);
  CHECK(t.branches[0].samples.front().second == Approx(0).epsilon(1e-12));
  CHECK(t.branches[1].samples.front().second == Approx(1).epsilon(1e-12));
  CHECK(t.branches[0].min_gap_to_next == Approx(0.5).epsilon(1e-12));
  CHECK(t.branches[0].s_at_min_gap == Approx(0.5).epsilon(1e-12));
  for (const auto& b : t.branches) CHECK(b.max_residual < 1e-12);
}

TEST_CASE("spectrum trace: pspin and constant paths") {
  auto path = std::make_shared<HamiltonianPath>(build_pspin(2, 1, 1.0));
  const CharPolyField f(path, window_from_path(*path, 0.25, 0.25));
  const auto t = spectrum_trace(f, 51);
  REQUIRE(t.branches.size() == 3);
  CHECK(t.branches[0].samples.front().second == Approx(-2));
  CHECK(std::abs(t.branches[1].samples.front().second) < 1e-12);
  CHECK(t.branches[2].samples.front().second == Approx(2));

  RealMatrix h0(2, 2);
  h0 << 1, 0.5, 0.5, -1;
  auto cpath = std::make_shared<HamiltonianPath>(
      build_linear(Operator::from_real(h0), Operator::from_real(h0)));
  const CharPolyField cf(cpath, window_from_path(*cpath, 0.25, 0.25));
  for (const auto& b : spectrum_trace(cf, 11).branches)
    for (const auto& [s, l] : b.samples) CHECK(l == Approx(b.samples.front().second).epsilon(1e-12));
}

TEST_CASE("determinant residual is independent of the field route") {
  const auto path = build_pspin(4, 3, 0.5);
  const auto mu = path_spectrum(path, 0.37);
  for (double m : mu) CHECK(std::abs(determinant_residual(path, 0.37, m)) < 1e-10);
  CHECK(determinant_residual(path, 0.37, 0.123) ==
        Approx(oracle::det_lu(path, 0.37, 0.123)).epsilon(1e-10));
}

}
