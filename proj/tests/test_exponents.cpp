#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "heis/errors.hpp"
#include "heis/exponents.hpp"

using namespace heis;

namespace {

// Barycentric membership, independent of the half-plane code.
int bary_inside(double ax, double ay, double bx, double by, double cx, double cy, double px, double py) {
  const double det = (by - cy) * (ax - cx) + (cx - bx) * (ay - cy);
  const double l1 = ((by - cy) * (px - cx) + (cx - bx) * (py - cy)) / det;
  const double l2 = ((cy - ay) * (px - cx) + (ax - cx) * (py - cy)) / det;
  const double l3 = 1.0 - l1 - l2;
  const double m = std::min({l1, l2, l3});
  return m > 1e-6 ? 1 : (m < -1e-6 ? -1 : 0);
}

}  // namespace

TEST_CASE("region examples") {
  CHECK(improving_region(2, {0.5, 0.5}) == Region::inside);
  CHECK(improving_region(2, {0.5, 1.0 / 3.0}) == Region::inside);
  CHECK(improving_region(2, {0.9, 0.05}) == Region::outside);
  CHECK(sparse_region(2, {0.6, 0.6}) == Region::inside);
  CHECK(sparse_region(2, {0.5, 0.5}) == Region::boundary);
  CHECK(sparse_region(2, {0.05, 0.05}) == Region::outside);
  CHECK(to_string(Region::boundary) == "boundary");
}

TEST_CASE("regions agree with barycentric oracle") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.001, 0.999);
  for (int n = 1; n <= 4; ++n) {
    const double a = 2.0 * n / (2.0 * n + 1.0);
    for (int i = 0; i < 4000; ++i) {
      const double x = u(rng), y = u(rng);
      const int s = bary_inside(0, 1, 1, 0, a, a, x, y);
      if (s == 1) CHECK(sparse_region(n, {x, y}) == Region::inside);
      if (s == -1) CHECK(sparse_region(n, {x, y}) == Region::outside);
      const int t = bary_inside(0, 0, 1, 1, a, 1.0 - a, x, y);
      if (std::abs(x - y) < 1e-12) continue;
      if (t == 1) CHECK(improving_region(n, {x, y}) == Region::inside);
      if (t == -1) CHECK(improving_region(n, {x, y}) == Region::outside);
    }
  }
}

TEST_CASE("margin gives a third answer") {
  const double a = 4.0 / 5.0;
  // Midpoint of the edge (0,1)-(a,a), nudged by less than the margin.
  const double mx = a / 2.0, my = (1.0 + a) / 2.0;
  CHECK(sparse_region(2, {mx, my + 1e-11}) == Region::boundary);
  CHECK(sparse_region(2, {mx, my - 1e-11}) == Region::boundary);
  CHECK(sparse_region(2, {mx + 1e-3, my - 1e-3}) == Region::inside);
  CHECK_THROWS_AS(sparse_region(2, {0.0, 0.5}), PreconditionError);
  CHECK_THROWS_AS(improving_region(0, {0.5, 0.5}), PreconditionError);
}

TEST_CASE("phi exponent") {
  CHECK(phi_exponent(2, 0.8) == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(phi_exponent(2, 0.9) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(phi_exponent(2, 1e-9) == doctest::Approx(1.0).epsilon(1e-8));
  for (int n = 1; n <= 5; ++n) {
    const double b = 2.0 * n / (2.0 * n + 1.0);
    const double lo = phi_exponent(n, std::nextafter(b, 0.0));
    const double hi = phi_exponent(n, std::nextafter(b, 1.0));
    CHECK(std::abs(lo - hi) <= 1e-12 * 8);
    CHECK(phi_exponent(n, b) >= 1.0);
  }
  CHECK_THROWS_AS(phi_exponent(2, 1.0), PreconditionError);
  CHECK(conjugate(2.0) == 2.0);
  CHECK(std::isinf(conjugate(1.0)));
}

namespace {

struct WeightFixture {
  BoxGrid g = BoxGrid::centered(GroupDim{2}, 1.0, 0.5, 8, 8);
  std::vector<DyadicSystem> systems;
  CubeFamily family;
  WeightFixture() {
    systems.push_back(build_system(g, DyadicOptions{0.5, 0, 1, 3, 2.0}));
    family = make_cube_family(systems, 0, 0, 97);
  }
};

}  // namespace

TEST_CASE("constant weights") {
  WeightFixture fx;
  REQUIRE(!fx.family.empty());
  for (double c : {1.0, 3.5}) {
    const GridFunction w(fx.g, c);
    for (double p : {1.5, 2.0, 4.0}) {
      CHECK(ap_constant(w, p, fx.family) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(rh_constant(w, p, fx.family) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  CHECK(rh_constant(GridFunction(fx.g, 2.0), 1.0, fx.family) == 1.0);
  CHECK_THROWS_AS(ap_constant(GridFunction(fx.g, 0.0), 2.0, fx.family), PreconditionError);
}

TEST_CASE("power weights: Jensen, monotone in a, monotone in family") {
  WeightFixture fx;
  double prev = 0.0;
  for (int a = 0; a <= 5; ++a) {
    TestFunctionParams prm;
    prm.exponent = a;
    const auto w = sample(fx.g, make_test_function(fx.g.dim(), "power_weight", prm));
    const double ap = ap_constant(w, 2.0, fx.family);
    CHECK(ap >= 1.0 - 1e-12);
    CHECK(rh_constant(w, 2.0, fx.family) >= 1.0 - 1e-12);
    CHECK(ap >= prev - 1e-12);
    prev = ap;
  }
  TestFunctionParams prm;
  prm.exponent = 2.0;
  const auto w = sample(fx.g, make_test_function(fx.g.dim(), "power_weight", prm));
  CubeFamily small(fx.family.begin(), fx.family.begin() + static_cast<long>(fx.family.size() / 2));
  CHECK(ap_constant(w, 2.0, small) <= ap_constant(w, 2.0, fx.family));
}

TEST_CASE("random weights satisfy Jensen") {
  WeightFixture fx;
  std::mt19937_64 rng(11);
  std::lognormal_distribution<double> ln(0.0, 1.0);
  for (int rep = 0; rep < 5; ++rep) {
    GridFunction w(fx.g);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = ln(rng);
    CHECK(ap_constant(w, 3.0, fx.family) >= 1.0);
    CHECK(rh_constant(w, 1.5, fx.family) >= 1.0);
  }
}

TEST_CASE("weighted maximal ratio window") {
  const auto g = BoxGrid::centered(GroupDim{2}, 1.0, 0.5, 8, 8);
  std::vector<DyadicSystem> sys{build_system(g, DyadicOptions{0.5, 0, 0, 0, 2.0})};
  const auto family = make_cube_family(sys, 0, 0, 211);
  const auto q = default_sphere_rule(g.dim(), 8, 16);
  TestFunctionParams bump;
  bump.scale = 0.7;
  const auto f = sample(g, make_test_function(g.dim(), "smooth_bump", bump));
  const GridFunction w(g, 1.0);
  const LacunaryConfig cfg{0.5, 1, 1};
  // p0 = 1.25: phi(0.8) = 5/4, window (1.25, 5).
  const auto r = weighted_maximal_ratio(f, w, 2.0, 1.25, cfg, q, family);
  CHECK(r.p_upper == doctest::Approx(5.0));
  CHECK(std::isfinite(r.ratio));
  CHECK(r.ratio > 0.0);
  CHECK(r.weight.ap == doctest::Approx(1.0));
  CHECK_THROWS_AS(weighted_maximal_ratio(f, w, 6.0, 1.25, cfg, q, family), PreconditionError);
  CHECK_THROWS_AS(weighted_maximal_ratio(f, w, 1.2, 1.25, cfg, q, family), PreconditionError);
  const auto g1 = BoxGrid::centered(GroupDim{1}, 1.0, 0.5, 8, 8);
  CHECK_THROWS_AS(weighted_maximal_ratio(GridFunction(g1, 1.0), GridFunction(g1, 1.0), 2.0, 1.25, cfg,
                                         default_sphere_rule(g1.dim(), 8, 8), family),
                  PreconditionError);
}
