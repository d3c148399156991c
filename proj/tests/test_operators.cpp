#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "heis/errors.hpp"
#include "heis/operators.hpp"
#include "heis/spectral.hpp"
#include "support.hpp"

using namespace heis;
using heis::testing::random_point;

namespace {

GridFunction random_grid_function(const BoxGrid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GridFunction f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = u(rng);
  return f;
}

// Direct evaluation through interpolate(), independent of the row kernel.
double brute_mean(const GridFunction& f, const Point& x, double r, const SphereQuadrature& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q.weights()[i] * interpolate(f, multiply(x, inverse(dilate(r, q.node(i)))));
  return s;
}

}  // namespace

TEST_CASE("row kernel matches direct interpolation") {
  for (int n : {1, 2}) {
    const GroupDim d{n};
    std::mt19937_64 crng(n);
    const auto g = BoxGrid(d, random_point(crng, n, 0.3), 1.0, 0.8,
                           n == 1 ? std::vector<int>{9, 10, 11} : std::vector<int>{7, 8, 7, 8, 8});
    const auto f = random_grid_function(g, 10 + n);
    const auto q = default_sphere_rule(d, 8, 8);
    for (double r : {0.6, 1.3}) {
      if (r < 2 * g.spacing_z()) continue;
      const auto a = spherical_mean(f, r, q);
      std::mt19937_64 rng(5);
      std::uniform_int_distribution<std::size_t> pick(0, g.cell_count() - 1);
      for (int s = 0; s < 200; ++s) {
        const std::size_t i = pick(rng);
        REQUIRE(a[i] == doctest::Approx(brute_mean(f, g.cell_center(i), r, q)).epsilon(1e-12).scale(1.0));
      }
    }
    std::mt19937_64 srng(99);
    const Point shift = random_point(srng, n, 0.4);
    const auto t = translate_right(f, shift);
    for (std::size_t i = 0; i < g.cell_count(); i += 7)
      REQUIRE(t[i] == doctest::Approx(interpolate(f, multiply(g.cell_center(i), inverse(shift)))).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("spherical mean identities") {
  const GroupDim d{1};
  const auto q = default_sphere_rule(d, 16, 16);
  const auto g = BoxGrid::centered(d, 2.0, 2.0, 41, 41);
  const auto one = spherical_mean(GridFunction(g, 1.0), 0.5, q);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const Point x = g.cell_center(i);
    if (std::abs(x.x(0)) <= 0.5 && std::abs(x.y(0)) <= 0.5 && std::abs(x.t()) <= 0.5)
      REQUIRE(std::abs(one[i] - 1.0) < 1e-10);
  }
  const auto tf = sample(g, [](const Point& p) { return p.t(); });
  const auto at = spherical_mean(tf, 0.7, q);
  CHECK(std::abs(at[g.locate(Point(1)).value()]) < 1e-12);
  const auto quartic = [](const Point& p) { return std::pow(koranyi_norm(p), 4); };
  for (double r : {0.3, 1.0, 1.7}) CHECK(spherical_mean_at(quartic, Point(1), r, q) == doctest::Approx(std::pow(r, 4)).epsilon(1e-12));
  const auto aq = spherical_mean(sample(g, quartic), 1.0, q);
  CHECK(aq[g.locate(Point(1)).value()] == doctest::Approx(1.0).epsilon(5e-2));
  CHECK_THROWS_AS(spherical_mean(tf, 0.1, q), PreconditionError);
  CHECK_THROWS_AS(spherical_mean(tf, 0.5, default_sphere_rule(GroupDim{2}, 8, 8)), PreconditionError);
}

TEST_CASE("dilation covariance is exact on dilated grids") {
  const GroupDim d{2};
  const auto q = default_sphere_rule(d, 8, 32);
  const double r = 0.6;
  const auto g = BoxGrid::centered(d, 1.5, 1.0, 10, 9);
  const auto gs = BoxGrid::centered(d, 1.5 / r, 1.0 / (r * r), 10, 9);  // delta_{1/r} of g
  const auto f = [](const Point& p) { return std::exp(-p.z_norm_sq() - 2 * p.t() * p.t()) * (1 + p.x(0)); };
  const auto lhs = spherical_mean(sample(gs, [&](const Point& p) { return f(dilate(r, p)); }), 1.0, q);
  const auto rhs = spherical_mean(sample(g, f), r, q);
  for (std::size_t i = 0; i < g.cell_count(); ++i) REQUIRE(std::abs(lhs[i] - rhs[i]) < 1e-12);
}

TEST_CASE("positivity, contraction, maximal function") {
  const GroupDim d{1};
  const auto q = default_sphere_rule(d, 12, 12);
  const auto g = BoxGrid::centered(d, 2.0, 2.0, 34, 24);
  auto f = random_grid_function(g, 3);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::abs(f[i]);
  const auto a = spherical_mean(f, 0.8, q);
  const double sup = lp_norm(f, INFINITY);
  for (double v : a.values()) {
    REQUIRE(v >= 0.0);
    REQUIRE(v <= sup + 1e-14);
  }
  LacunaryConfig cfg{0.5, -1, 1};
  const auto m = lacunary_maximal(f, cfg, q);
  for (int k = -1; k <= 1; ++k) {
    const auto ak = spherical_mean(f, cfg.radius(k), q);
    for (std::size_t i = 0; i < m.size(); ++i) REQUIRE(m[i] >= std::abs(ak[i]));
  }
  const auto single = lacunary_maximal(f, LacunaryConfig{0.5, 0, 0}, q);
  const auto a1 = spherical_mean(f, 1.0, q);
  for (std::size_t i = 0; i < m.size(); ++i) REQUIRE(single[i] == std::abs(a1[i]));
  const auto wider = lacunary_maximal(f, LacunaryConfig{0.5, -1, 2}, q);
  for (std::size_t i = 0; i < m.size(); ++i) REQUIRE(wider[i] >= m[i]);
  const auto ones = lacunary_maximal(GridFunction(g, 1.0), LacunaryConfig{0.5, 0, 2}, q);
  CHECK(ones[g.locate(Point(1)).value()] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(lacunary_maximal(f, LacunaryConfig{0.5, 2, 1}, q), PreconditionError);
  CHECK_THROWS_AS(lacunary_maximal(f, LacunaryConfig{1.5, 0, 1}, q), PreconditionError);
  CHECK_THROWS_AS(lacunary_maximal(f, LacunaryConfig{0.5, 0, 3}, q), PreconditionError);
}

TEST_CASE("right translation") {
  const GroupDim d{1};
  const auto g = BoxGrid::centered(d, 3.0, 3.0, 40, 40);
  const auto fn = [](const Point& p) { return std::exp(-p.z_norm_sq() - p.t() * p.t()); };
  const auto f = sample(g, fn);
  const auto same = translate_right(f, Point(1));
  for (std::size_t i = 0; i < f.size(); ++i) REQUIRE(same[i] == f[i]);
  Point a(1);
  a.x(0) = 0.37;
  a.t() = -0.21;
  const auto back = translate_right(translate_right(f, a), inverse(a));
  double err = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(back[i] - f[i]));
  CHECK(err < 0.03);
  for (double p : {1.0, 2.0}) CHECK(lp_norm(translate_right(f, a), p) == doctest::Approx(lp_norm(f, p)).epsilon(0.02));
}

TEST_CASE("Poisson kernel and mean") {
  std::mt19937_64 rng(8);
  for (int n : {1, 2}) {
    const GroupDim d{n};
    const double kappa = polar_constant_exact(d);
    const int Q = d.homogeneous_dim();
    for (int s = 0; s < 100; ++s) {
      const Point x = random_point(rng, n, 2.0);
      const double t = 0.1 + 3.0 * std::abs(x.t());
      REQUIRE(poisson_kernel(d, kappa, t, x) ==
              doctest::Approx(std::pow(t, -Q) * poisson_kernel(d, kappa, 1.0, dilate(1.0 / t, x))).epsilon(1e-12));
    }
    const auto q = default_sphere_rule(d, 16, 16);
    const double mass = polar_integrate(q, kappa, radial_rule_tangent(1.0, 128),
                                        [&](const Point& x) { return poisson_kernel(d, kappa, 1.0, x); });
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
  }
  const GroupDim d{1};
  const auto q = default_sphere_rule(d, 16, 16);
  const auto g = BoxGrid::centered(d, 4.0, 4.0, 17, 17);
  const auto pm = poisson_mean(GridFunction(g, 1.0), 1e-3, polar_constant_exact(d), q);
  CHECK(pm.kernel_mass == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(pm.value[g.locate(Point(1)).value()] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_THROWS_AS(poisson_mean(GridFunction(g, 1.0), 1.0, polar_constant_exact(d), q, 1), InvariantError);
}

TEST_CASE("continuity deficit") {
  const GroupDim d{1};
  const auto q = default_sphere_rule(d, 12, 12);
  const auto g = BoxGrid::centered(d, 2.5, 2.5, 24, 24);
  TestFunctionParams bp;
  const auto f = sample(g, make_test_function(d, "smooth_bump", bp));
  CHECK(continuity_deficit(f, 1.0, Point(1), 2.0, 3.0, q).value == 0.0);
  Point a(1);
  a.x(0) = 0.5;
  const auto c = continuity_deficit(f, 1.0, a, 2.0, 3.0, q);
  CHECK(std::isfinite(c.value));
  CHECK(c.value > 0.0);
  CHECK_FALSE(c.under_resolved);
  a.x(0) = 0.05;
  CHECK(continuity_deficit(f, 1.0, a, 2.0, 3.0, q).under_resolved);
  a.x(0) = 1.5;
  CHECK_THROWS_AS(continuity_deficit(f, 1.0, a, 2.0, 3.0, q), PreconditionError);
}

TEST_CASE("line fit") {
  const auto fit = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(fit.slope == doctest::Approx(2.0));
  CHECK(fit.intercept == doctest::Approx(1.0));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK_THROWS_AS(fit_line({1}, {1}), PreconditionError);
}
