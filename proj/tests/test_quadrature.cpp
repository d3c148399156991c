#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "heis/errors.hpp"
#include "heis/quadrature.hpp"
#include "support.hpp"

using namespace heis;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  const auto g = gauss_legendre(10, 0.0, 2.0);
  double s = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], 19);
  CHECK(s == doctest::Approx(std::pow(2.0, 20) / 20).epsilon(1e-13));
  const auto c = gauss_legendre_composite(8, 5, -1.0, 3.0);
  double e = 0.0;
  for (std::size_t i = 0; i < c.nodes.size(); ++i) e += c.weights[i] * std::exp(c.nodes[i]);
  CHECK(e == doctest::Approx(std::exp(3.0) - std::exp(-1.0)).epsilon(1e-13));
}

TEST_CASE("complex sphere rules") {
  for (int n : {1, 2, 3}) {
    const auto r = sphere_rule_for_complex_sphere(n, 400, 7);
    double mass = 0.0, first = 0.0, w1sq = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      double norm = 0.0;
      for (int k = 0; k < 2 * n; ++k) norm += r.directions[i * 2 * n + k] * r.directions[i * 2 * n + k];
      REQUIRE(std::abs(norm - 1.0) < 1e-12);
      REQUIRE(r.weights[i] > 0.0);
      mass += r.weights[i];
      first += r.weights[i] * r.directions[i * 2 * n];
      w1sq += r.weights[i] * (std::pow(r.directions[i * 2 * n], 2) + std::pow(r.directions[i * 2 * n + n], 2));
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    if (n <= 2) {
      CHECK(std::abs(first) < 1e-12);
      CHECK(w1sq == doctest::Approx(1.0 / n).epsilon(1e-12));
    } else {
      CHECK(std::abs(first) < 0.1);
    }
  }
  CHECK_THROWS_AS(sphere_rule_for_complex_sphere(2, 3, 0), PreconditionError);
}

TEST_CASE("Hopf rule integrates low-degree moments on S^3") {
  // E|w1|^4 = 1/3 and E|w1|^2|w2|^2 = 1/6 under the uniform measure on S^3.
  const auto r = hopf_rule(4, 8);
  double m4 = 0.0, m22 = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double* d = &r.directions[4 * i];
    const double a = d[0] * d[0] + d[2] * d[2], b = d[1] * d[1] + d[3] * d[3];
    m4 += r.weights[i] * a * a;
    m22 += r.weights[i] * a * b;
  }
  CHECK(m4 == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(m22 == doctest::Approx(1.0 / 6).epsilon(1e-12));
}

TEST_CASE("Koranyi sphere rule: mass, nodes, symmetry") {
  for (int n : {1, 2, 3}) {
    for (int nt : {16, 64, 256}) {
      const auto q = default_sphere_rule(GroupDim{n}, nt, 64, 3);
      CHECK(q.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
      for (std::size_t i = 0; i < q.size(); ++i) REQUIRE(std::abs(koranyi_norm(q.node(i)) - 1.0) < 1e-12);
      CHECK(std::abs(integrate_on_sphere(q, [](const Point& p) { return p.t(); })) < 1e-10);
      CHECK(integrate_on_sphere(q, [](const Point& p) { return std::pow(koranyi_norm(p), 4); }) ==
            doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  CHECK(theta_normaliser(2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(default_sphere_rule(GroupDim{2}, 4, 64), PreconditionError);
}

TEST_CASE("theta rule convergence") {
  const auto f = [](const Point& p) { return std::exp(p.t() + 0.3 * p.z_norm_sq()); };
  const auto lo = default_sphere_rule(GroupDim{2}, 64, 64);
  const auto hi = default_sphere_rule(GroupDim{2}, 256, 64);
  CHECK(std::abs(integrate_on_sphere(lo, f) - integrate_on_sphere(hi, f)) < 1e-8);
}

TEST_CASE("U(n) invariance surrogate") {
  // Rotate z by a random unitary (product of a phase and a real rotation mixing z1, z2).
  const auto q = default_sphere_rule(GroupDim{2}, 32, 256);
  const auto f = [](const Point& p) { return std::cos(3.0 * p.z_norm_sq()) + p.t() * p.t(); };
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
  const double a = ang(rng), ph = ang(rng);
  const auto rotated = [&](const Point& p) {
    Point r(2);
    // z1' = cos a z1 - sin a z2, z2' = e^{i ph}(sin a z1 + cos a z2)
    const double x1 = std::cos(a) * p.x(0) - std::sin(a) * p.x(1);
    const double y1 = std::cos(a) * p.y(0) - std::sin(a) * p.y(1);
    const double u = std::sin(a) * p.x(0) + std::cos(a) * p.x(1);
    const double v = std::sin(a) * p.y(0) + std::cos(a) * p.y(1);
    r.x(0) = x1;
    r.y(0) = y1;
    r.x(1) = std::cos(ph) * u - std::sin(ph) * v;
    r.y(1) = std::sin(ph) * u + std::cos(ph) * v;
    r.t() = p.t();
    return f(r);
  };
  CHECK(integrate_on_sphere(q, rotated) == doctest::Approx(integrate_on_sphere(q, f)).epsilon(1e-10));
}

TEST_CASE("polar integration against closed forms") {
  for (int n : {1, 2, 3}) {
    const GroupDim dim{n};
    const auto q = default_sphere_rule(dim, 32, n == 3 ? 1024 : 256, 11);
    const double kappa = polar_constant_exact(dim);
    // int exp(-a|z|^2 - b t^2) = (pi/a)^n sqrt(pi/b); radial in |z| and even in t,
    // so the n >= 3 Monte-Carlo sphere rule only sees |omega| = 1.
    const auto g = [](const Point& p) { return std::exp(-2.0 * p.z_norm_sq() - 3.0 * p.t() * p.t()); };
    const double exact = std::pow(std::numbers::pi / 2.0, n) * std::sqrt(std::numbers::pi / 3.0);
    const auto r = polar_integrate_auto(q, kappa, g);
    CHECK(r.value == doctest::Approx(exact).epsilon(1e-9));
    const auto ind = [](const Point& p) { return koranyi_norm(p) < 1.0 ? 1.0 : 0.0; };
    const double ball = polar_integrate(q, kappa, radial_rule_interval(1.5), ind);
    CHECK(ball == doctest::Approx(kappa / dim.homogeneous_dim()).epsilon(1e-2));
    CHECK(polar_integrate_auto(q, kappa, [](const Point&) { return 0.0; }).value == 0.0);
  }
}

TEST_CASE("tangent radial rule reaches algebraic tails") {
  // int_0^inf r^3 (1+r^2)^{-5/2} dr = 2/3
  const auto rr = radial_rule_tangent(1.0, 128);
  double s = 0.0;
  for (std::size_t j = 0; j < rr.radii.size(); ++j)
    s += rr.weights[j] * std::pow(rr.radii[j], 3) * std::pow(1 + rr.radii[j] * rr.radii[j], -2.5);
  CHECK(s == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("quadrature CSV export") {
  const auto q = default_sphere_rule(GroupDim{1}, 8, 4);
  std::ostringstream os;
  write_csv(os, q);
  const std::string s = os.str();
  CHECK(s.rfind("x1,y1,t,weight", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == static_cast<long>(q.size()) + 1);
}
