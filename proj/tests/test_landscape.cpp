#include <cmath>
#include <random>

#include "adiamorse/landscape.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace adiamorse;
using doctest::Approx;

namespace {

std::shared_ptr<CharPolyField> grover_field(long long N, GroverBasis basis = GroverBasis::Printed) {
  auto path = std::make_shared<HamiltonianPath>(build_grover_reduced(N, basis));
  return std::make_shared<CharPolyField>(path, window_from_path(*path, 0.25, 0.25));
}

FieldPtr poly(PolynomialField::Coeffs c, Window w) {
  return std::make_shared<PolynomialField>(std::move(c), w);
}

// lambda^2 - s^2
FieldPtr hyperbolic(Window w = {-1, 1, -1, 1}) { return poly({{{0, 2}, 1.0}, {{2, 0}, -1.0}}, w); }

// (s^2 - 1)^2 + lambda^2
FieldPtr double_well() {
  return poly({{{4, 0}, 1.0}, {{2, 0}, -2.0}, {{0, 0}, 1.0}, {{0, 2}, 1.0}}, {-2, 2, -2, 2});
}

}  // namespace

TEST_SUITE("landscape") {

TEST_CASE("field values") {
  CHECK(field_value(*grover_field(4), 0.5, 0.5) == Approx(-1.0 / 16).epsilon(1e-14));
  CHECK(field_value(*grover_field(4, GroverBasis::Orthonormal), 0.5, 0.5) ==
        Approx(-1.0 / 16).epsilon(1e-14));
  CHECK(field_value(*hyperbolic(), 1, 1) == 0.0);
  CHECK_THROWS_AS(field_value(*hyperbolic(), 1.5, 0), Error);
}

TEST_CASE("gradients") {
  const Vec2 g0 = gradient(*hyperbolic(), 0, 0);
  CHECK(g0.norm() == 0.0);
  const auto f = grover_field(4);
  CHECK(gradient(*f, 0.5, 0.5).norm() < 1e-14);
  const Vec2 g = gradient(*f, 0.0, 0.0);
  CHECK(g[0] == Approx(0.75).epsilon(1e-13));
  CHECK(g[1] == Approx(-1.0).epsilon(1e-13));
  CHECK_THROWS_AS(gradient(*f, 5.0, 0.0), Error);
}

TEST_CASE("hessians") {
  const Mat2 h = hessian(*hyperbolic(), 0.3, -0.2);
  CHECK(h(0, 0) == -2.0);
  CHECK(h(1, 1) == 2.0);
  CHECK(h(0, 1) == 0.0);
  const Mat2 b = hessian(*fixtures::quadratic(2, 2, {-1, 1, -1, 1}), 0, 0);
  CHECK(b(0, 0) == 2.0);
  CHECK(b(1, 1) == 2.0);
  for (long long N : {4LL, 32LL, 1024LL}) {
    const Mat2 hg = hessian(*grover_field(N), 0.5, 0.5);
    CHECK(hg(0, 0) == Approx(-2.0 * (N - 1) / N).epsilon(1e-10));
    CHECK(hg(1, 1) == Approx(2.0).epsilon(1e-10));
    CHECK(std::abs(hg(0, 1)) < 1e-8);
  }
}

TEST_CASE("exact and finite-difference hessians agree on a Hermitian path") {
  auto path = std::make_shared<HamiltonianPath>(build_pspin(4, 3, 0.6));
  CharPolyField f(path, window_from_path(*path, 0.25, 0.25));
  for (auto [s, l] : {std::pair{0.2, 0.3}, {0.7, -1.1}, {0.5, 2.0}}) {
    const Mat2 a = f.hessian(s, l), b = f.hessian_fd(s, l);
    CHECK((a - b).norm() <= 1e-6 * (1 + a.norm()));
  }
}

TEST_CASE("characteristic polynomial vanishes on the spectrum") {
  auto path = std::make_shared<HamiltonianPath>(build_pspin(7, 5, 0.3));
  CharPolyField f(path, window_from_path(*path, 0.25, 0.25));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 50; ++t) {
    const double s = u(rng);
    const auto mu = path_spectrum(*path, s);
    const double l = mu[rng() % mu.size()];
    double scale = 1;
    for (double m : mu) scale *= 1 + std::abs(m);
    CHECK(std::abs(f.value(s, l)) <= 1e-9 * scale);
    CHECK(std::abs(oracle::det_lu(*path, s, l)) <= 1e-9 * scale);
  }
}

TEST_CASE("gradient matches finite differences of the determinant") {
  auto path = std::make_shared<HamiltonianPath>(build_pspin(3, 2, 0.5));
  CharPolyField f(path, window_from_path(*path, 0.25, 0.25));
  auto det = [&](double s, double l) { return oracle::det_lu(*path, s, l); };
  for (auto [s, l] : {std::pair{0.1, 0.2}, {0.6, -0.9}, {0.95, 1.3}}) {
    const Vec2 a = f.gradient(s, l), b = oracle::fd_gradient(det, s, l, 1e-3, 1e-3);
    CHECK((a - b).norm() <= 1e-8 * (1 + a.norm()));
  }
}

TEST_CASE("windows") {
  auto g = build_grover_reduced(4);
  const Window w = window_from_path(g, 0.25, 0.25);
  CHECK(w.l_lo <= 0.0);
  CHECK(w.l_hi >= 1.0);
  CHECK(w.s_lo == Approx(-0.25));
  CHECK(w.s_hi == Approx(1.25));

  const Window z = window_from_path(HamiltonianPath(2, {}), 0.1, 0.3);
  CHECK(z.l_lo == Approx(-0.3));
  CHECK(z.l_hi == Approx(0.3));

  const Window p = window_from_path(build_pspin(7, 5, 1.0), 0.0, 0.0);
  CHECK(p.l_lo <= -7.0);
  CHECK(p.l_hi >= 7.0);
}

TEST_CASE("census: grover") {
  for (long long N : {4LL, 256LL}) {
    const auto c = find_critical_points(*grover_field(N));
    REQUIRE(c.points.size() == 1);
    const auto& p = c.points[0];
    CHECK(p.s() == Approx(0.5).epsilon(1e-10));
    CHECK(p.lambda() == Approx(0.5).epsilon(1e-10));
    CHECK(p.index == 1);
    CHECK(p.k1 == Approx(-2.0 * (N - 1) / N).epsilon(1e-9));
    CHECK(p.k2 == Approx(2.0).epsilon(1e-9));
    CHECK(c.euler() == -1);
  }
}

TEST_CASE("census: double well") {
  const auto c = find_critical_points(*double_well());
  REQUIRE(c.points.size() == 3);
  CHECK(c.n_min == 2);
  CHECK(c.n_saddle == 1);
  CHECK(c.is_morse);
  for (const auto& p : c.points) {
    CHECK(std::abs(p.lambda()) < 1e-10);
    if (p.index == 1) CHECK(std::abs(p.s()) < 1e-10);
    else CHECK(std::abs(std::abs(p.s()) - 1) < 1e-10);
  }
}

TEST_CASE("census: monkey saddle is degenerate") {
  const auto c = find_critical_points(*fixtures::monkey_saddle());
  REQUIRE(c.points.size() == 1);
  CHECK(c.points[0].degenerate);
  CHECK(c.points[0].location.norm() < 1e-4);
  CHECK_FALSE(c.is_morse);
}

TEST_CASE("census: empty field is a valid result") {
  const auto c = find_critical_points(*poly({{{1, 0}, 1.0}}, {-1, 1, -1, 1}));
  CHECK(c.points.empty());
  CHECK(c.euler() == 0);
}

TEST_CASE("newton converges from a nearby seed") {
  const auto x = newton_critical(*double_well(), {0.9, 0.1}, 1e-12, 50);
  REQUIRE(x);
  CHECK((*x - Vec2(1, 0)).norm() < 1e-10);
}

TEST_CASE("ridge edge signs certify the pspin window") {
  auto path = std::make_shared<HamiltonianPath>(build_pspin(5, 3, 1.0));
  CharPolyField f(path, window_from_path(*path, 4.0, 0.25));
  const auto r = ridge_edge_signs(f);
  CHECK(r.left.size() == 5);
  CHECK(r.certified());
}

TEST_CASE("kfold detection") {
  const auto m = fixtures::monkey_saddle();
  const auto c = find_critical_points(*m);
  REQUIRE(c.points.size() == 1);
  const auto k = detect_kfold(*m, c.points[0]);
  REQUIRE(k.k);
  CHECK(*k.k == 2);

  const auto z4 = poly({{{4, 0}, 1.0}, {{2, 2}, -6.0}, {{0, 4}, 1.0}}, {-1, 1, -1, 1});
  const auto p4 = classify(*z4, {0, 0});
  REQUIRE(p4.degenerate);
  const auto k4 = detect_kfold(*z4, p4);
  REQUIRE(k4.k);
  CHECK(*k4.k == 3);

  const auto g = find_critical_points(*hyperbolic());
  CHECK_THROWS_AS(detect_kfold(*hyperbolic(), g.points.at(0)), Error);
}

TEST_CASE("perturbation splits the monkey saddle") {
  const auto m = fixtures::monkey_saddle();
  const auto p = find_critical_points(*m).points.at(0);
  const double eps = 0.05;
  const auto r = perturb_split(m, p, eps, 0.5);
  REQUIRE(r.local.points.size() == 2);
  // grad = (3 s^2 - 3 l^2 + eps, -6 s l): roots at s = 0, l = +-sqrt(eps/3)
  const double root = std::sqrt(eps / 3);
  for (const auto& q : r.local.points) {
    CHECK(q.index == 1);
    CHECK(std::abs(q.s()) < 1e-9);
    CHECK(std::abs(std::abs(q.lambda()) - root) < 1e-9);
  }

  const auto same = perturb_split(m, p, 0.0, 0.5);
  CHECK(same.field->value(0.3, 0.2) == Approx(m->value(0.3, 0.2)));
  CHECK_THROWS_AS(perturb_split(m, p, 3.0, 0.5), Error);
}

}
