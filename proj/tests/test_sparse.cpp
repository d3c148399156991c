#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "heis/errors.hpp"
#include "heis/operators.hpp"
#include "heis/sparse.hpp"

using namespace heis;

namespace {

struct Fixture {
  BoxGrid g = BoxGrid::centered(GroupDim{1}, 1.0, 0.5, 32, 32);
  DyadicSystem sys = build_system(g, DyadicOptions{0.5, -1, 3, 7, 2.0});
  SphereQuadrature q = default_sphere_rule(g.dim(), 8, 16);
  CubeId q0 = cube_of(sys, Point(1), -1).id;

  GridFunction indicator(CubeId id) const {
    GridFunction f(g, 0.0);
    for (CellIndex c : sys.cells(id)) f[c] = 1.0;
    return f;
  }
  GridFunction random_on_q0(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GridFunction f(g, 0.0);
    // Sparse spikes on a smooth floor give nontrivial stopping families.
    for (CellIndex c : sys.cells(q0)) f[c] = 0.1 * u(rng) + (u(rng) < 0.02 ? 20.0 * u(rng) : 0.0);
    return f;
  }
  std::vector<CubeId> descendants(CubeId id) const {
    std::vector<CubeId> out, stack{id};
    while (!stack.empty()) {
      const CubeId c = stack.back();
      stack.pop_back();
      for (CubeId k : sys.children(c)) {
        out.push_back(k);
        stack.push_back(k);
      }
    }
    return out;
  }
};

Fixture& fixture() {
  static Fixture fx;
  return fx;
}

}  // namespace

TEST_CASE("support-safe cells keep the stencil inside the cube") {
  auto& fx = fixture();
  for (int k = 0; k <= 1; ++k) {
    const auto ok = admissible_cells(fx.sys, k, fx.q, SupportRule::support_safe);
    const auto asg = fx.sys.assignment(k);
    std::mt19937_64 rng(k + 1);
    std::uniform_int_distribution<std::size_t> pick(0, fx.g.cell_count() - 1);
    std::vector<std::size_t> probe;
    for (int i = 0; i < 30; ++i) probe.push_back(pick(rng));
    for (std::size_t c = 0, taken = 0; c < ok.size() && taken < 30; c += 7)
      if (ok[c]) probe.push_back(c), ++taken;
    int seen_ok = 0, seen_bad = 0;
    for (std::size_t c : probe) {
      GridFunction delta(fx.g, 0.0);
      delta[c] = 1.0;
      const auto m = spherical_mean(delta, std::pow(0.5, k + 2), fx.q);
      bool leaks = false;
      for (std::size_t x = 0; x < m.size(); ++x)
        if (m[x] != 0.0 && asg[x] != asg[c]) leaks = true;
      CHECK(leaks == !ok[c]);
      (ok[c] ? seen_ok : seen_bad)++;
    }
    CHECK(seen_bad > 0);
    // At delta = 1/2 the sheared level-1 cubes are thinner than the stencil.
    if (k == 0)     CHECK(seen_ok > 0);
  }
}

TEST_CASE("center-ball cells sit in a level k+3 cube whose ball stays in Q") {
  auto& fx = fixture();
  const int k = -1;
  const auto ok = admissible_cells(fx.sys, k, fx.q, SupportRule::center_ball);
  const auto asg = fx.sys.assignment(k);
  const double rho = std::pow(0.5, k + 1);
  for (CubeId p : fx.sys.level_cubes(k + 3)) {
    const Cube& pc = fx.sys.cube(p);
    bool inside = true;
    for (std::size_t c = 0; c < fx.g.cell_count() && inside; ++c) {
      if (dist_left(pc.center, fx.g.cell_center(c)) < rho && asg[c] != asg[pc.center_cell]) inside = false;
    }
    // The ball must also fit in the box; cells admitted only if both hold.
    for (CellIndex c : fx.sys.cells(p))
      if (ok[c]) CHECK(inside);
  }
  CHECK_THROWS_AS(admissible_cells(fx.sys, 1, fx.q, SupportRule::center_ball), PreconditionError);
  CHECK(default_support_rule(0.5) == SupportRule::support_safe);
  CHECK(default_support_rule(1.0 / 96.0) == SupportRule::center_ball);
}

TEST_CASE("level means agree with per-cube localized means") {
  auto& fx = fixture();
  const auto f = fx.random_on_q0(3);
  const int k = 0;
  const auto ok = admissible_cells(fx.sys, k, fx.q, SupportRule::support_safe);
  const auto gk = level_localized_mean(f, fx.sys, k, fx.q, ok);
  for (CubeId id : fx.sys.level_cubes(k)) {
    const auto lm = localized_mean(f, id, fx.sys, fx.q, SupportRule::support_safe);
    CHECK(lm.outside_fraction <= 1e-8);
    for (CellIndex c : fx.sys.cells(id)) REQUIRE(gk[c] == doctest::Approx(lm.value[c]).epsilon(1e-12));
  }
}

TEST_CASE("linearization sets") {
  auto& fx = fixture();
  const auto levels = prepare_levels(fx.sys, fx.q, SupportRule::support_safe, -1);
  CHECK(levels.k_hi == 1);
  const auto f = fx.random_on_q0(4);
  const auto g = fx.random_on_q0(5);
  const auto lin = linearization_sets(f, fx.q0, levels);

  // Oracle for sup on a few deepest-window cubes: localized means of their ancestors.
  const auto& finest = fx.sys.level_cubes(lin.k_hi);
  int checked = 0;
  for (std::size_t j = 0; j < finest.size() && checked < 3; j += 5) {
    if (!cube_contains(fx.sys, fx.q0, finest[j])) continue;
    ++checked;
    std::vector<double> sup(fx.g.cell_count(), 0.0);
    for (CubeId a = finest[j];; a = fx.sys.cube(a).parent) {
      const auto lm = localized_mean(f, a, fx.sys, fx.q, SupportRule::support_safe);
      for (CellIndex c : fx.sys.cells(finest[j])) sup[c] = std::max(sup[c], lm.value[c]);
      if (a == fx.q0) break;
    }
    for (CellIndex c : fx.sys.cells(finest[j])) {
      const auto i = std::lower_bound(lin.cells.begin(), lin.cells.end(), c) - lin.cells.begin();
      REQUIRE(lin.sup[i] == doctest::Approx(sup[c]).epsilon(1e-12));
    }
  }
  CHECK(checked > 0);

  std::set<CellIndex> e_union, b_union;
  std::size_t b_total = 0;
  for (int k = lin.k_lo; k <= lin.k_hi; ++k)
    for (CubeId id : fx.sys.level_cubes(k)) {
      if (!cube_contains(fx.sys, fx.q0, id)) continue;
      for (CellIndex c : lin.e_cells(fx.sys, id)) e_union.insert(c);
      const auto b = lin.b_cells(fx.sys, id);
      b_total += b.size();
      b_union.insert(b.begin(), b.end());
    }
  CHECK(b_total == b_union.size());  // disjoint
  CHECK(b_union == e_union);
  for (std::size_t i = 0; i < lin.cells.size(); ++i)
    if (lin.sup[i] > 0.0) CHECK(e_union.count(lin.cells[i]) == 1);

  const double lhs = maximal_pairing(lin, g), rhs = linearized_sum(lin, g);
  CHECK(lhs > 0.0);
  CHECK(lhs <= 2.0 * rhs * (1.0 + 1e-10));

  const auto zero = linearization_sets(GridFunction(fx.g, 0.0), fx.q0, levels);
  for (std::size_t i = 0; i < zero.cells.size(); ++i) CHECK(zero.e_bits[i] == 0);
}

TEST_CASE("stopping children") {
  auto& fx = fixture();
  const GridFunction one = fx.indicator(fx.q0);
  const auto a1 = cube_averages(fx.sys, one, 2.0);
  CHECK(stopping_children(fx.sys, fx.q0, a1, a1, 2.0).empty());

  // f = 1_D for a deepest cube D inside Q0.
  CubeId d = fx.q0;
  while (!fx.sys.children(d).empty()) d = fx.sys.children(d).back();
  const auto f = fx.indicator(d);
  for (double p : {1.5, 2.0, 3.0}) {
    const auto af = cube_averages(fx.sys, f, p);
    const auto ag = cube_averages(fx.sys, one, p);
    const double bound = std::pow(2.0, p) * static_cast<double>(fx.sys.cube(d).cell_count) /
                         static_cast<double>(fx.sys.cube(fx.q0).cell_count);
    // Walk ancestors of D below Q0; the coarsest with |D|/|P| > bound is expected.
    std::vector<CubeId> expected;
    for (CubeId p_id = d; p_id != fx.q0; p_id = fx.sys.cube(p_id).parent)
      if (static_cast<double>(fx.sys.cube(d).cell_count) / static_cast<double>(fx.sys.cube(p_id).cell_count) > bound)
        expected = {p_id};
    CHECK(stopping_children(fx.sys, fx.q0, af, ag, 2.0) == expected);
  }
}

TEST_CASE("sparse decomposition of constants") {
  auto& fx = fixture();
  const auto one = fx.indicator(fx.q0);
  const auto s = sparse_decompose(one, one, fx.q0, 1.6, 1.6, fx.sys);
  REQUIRE(s.cubes.size() == 1);
  CHECK(s.cubes[0] == fx.q0);
  CHECK(s.f_sets[0].size() == fx.sys.cube(fx.q0).cell_count);
  CHECK(s.eta == 1.0);
  const auto form = sparse_form(fx.sys, s, one, one, 1.6, 1.6);
  CHECK(form.value == doctest::Approx(fx.sys.cube(fx.q0).measure));
  std::ostringstream os;
  write_csv(os, form);
  CHECK(os.str().rfind("cube_id,level,measure,f_measure,avg_f,avg_g,term\n", 0) == 0);
}

TEST_CASE("sparse decomposition of a deep indicator is the stopping chain") {
  auto& fx = fixture();
  CubeId d = fx.q0;
  while (!fx.sys.children(d).empty()) d = fx.sys.children(d).front();
  const auto f = fx.indicator(d);
  const auto g = fx.indicator(fx.q0);
  const SparseConfig cfg{guaranteed_threshold(2.0, 2.0), true};
  const auto s = sparse_decompose(f, g, fx.q0, 2.0, 2.0, fx.sys, cfg);
  // Each emitted cube is an ancestor of D (or Q0) and each has |F| >= |Q|/2.
  for (CubeId id : s.cubes) CHECK(cube_contains(fx.sys, id, d));
  const auto chk = check_collection(fx.sys, s);
  CHECK(chk.subsets);
  CHECK(chk.disjoint);
  CHECK(chk.eta >= 0.5);
}

TEST_CASE("random pairs: sparsity and stopping correctness") {
  auto& fx = fixture();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto f = fx.random_on_q0(100 + seed);
    const auto g = fx.random_on_q0(200 + seed);
    const double p = 1.0 / 0.6, q = 1.0 / 0.6;
    const SparseConfig cfg{guaranteed_threshold(p, q), true};
    const auto s = sparse_decompose(f, g, fx.q0, p, q, fx.sys, cfg);
    const auto chk = check_collection(fx.sys, s);
    CHECK(chk.subsets);
    CHECK(chk.disjoint);
    CHECK(chk.eta >= 0.5);
    CHECK(s.eta == doctest::Approx(chk.eta));
    const auto af = cube_averages(fx.sys, f, p);
    const auto ag = cube_averages(fx.sys, g, q);
    for (std::size_t i = 0; i < s.cubes.size(); ++i) {
      const std::set<CellIndex> fs(s.f_sets[i].begin(), s.f_sets[i].end());
      for (CubeId pc : fx.descendants(s.cubes[i])) {
        const auto cells = fx.sys.cells(pc);
        const bool meets = std::any_of(cells.begin(), cells.end(), [&](CellIndex c) { return fs.count(c) > 0; });
        if (!meets) continue;
        CHECK(af[pc] <= cfg.stop_threshold * af[s.cubes[i]] * (1 + 1e-12));
        CHECK(ag[pc] <= cfg.stop_threshold * ag[s.cubes[i]] * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("threshold close to one loses sparsity") {
  auto& fx = fixture();
  const auto f = fx.random_on_q0(9);
  CHECK_THROWS_AS(sparse_decompose(f, f, fx.q0, 2.0, 2.0, fx.sys, SparseConfig{1.0001, true}), InvariantError);
  CHECK_THROWS_AS(sparse_decompose(f, f, fx.q0, 2.0, 2.0, fx.sys, SparseConfig{1.0, true}), PreconditionError);
  GridFunction outside(fx.g, 1.0);
  if (fx.sys.cube(fx.q0).cell_count < fx.g.cell_count())
    CHECK_THROWS_AS(sparse_decompose(outside, f, fx.q0, 2.0, 2.0, fx.sys), PreconditionError);
}

TEST_CASE("sparse form: monotone and symmetric") {
  auto& fx = fixture();
  const auto f = fx.random_on_q0(21);
  const auto g = fx.random_on_q0(22);
  const auto s = sparse_decompose(f, g, fx.q0, 2.0, 3.0, fx.sys, SparseConfig{guaranteed_threshold(2.0, 3.0), true});
  const double base = sparse_form(fx.sys, s, f, g, 2.0, 3.0).value;
  double sum = 0.0;
  const auto r = sparse_form(fx.sys, s, f, g, 2.0, 3.0);
  for (const auto& t : r.terms) sum += t.value;
  CHECK(sum == doctest::Approx(r.value).epsilon(1e-14));
  GridFunction bigger = f;
  for (CellIndex c : fx.sys.cells(fx.q0)) bigger[c] += 0.05;
  CHECK(sparse_form(fx.sys, s, bigger, g, 2.0, 3.0).value >= base);
  CHECK(sparse_form(fx.sys, s, g, f, 3.0, 2.0).value == doctest::Approx(base).epsilon(1e-13));
  CHECK_THROWS_AS(sparse_form(fx.sys, s, f, g, 1.0, 2.0), PreconditionError);
}

TEST_CASE("domination ratio") {
  auto& fx = fixture();
  const auto levels = prepare_levels(fx.sys, fx.q, SupportRule::support_safe, -1);
  const double p = 1.0 / 0.6, q = 1.0 / 0.6;
  const SparseConfig cfg{guaranteed_threshold(p, q), true};
  const auto one = fx.indicator(fx.q0);
  const auto r1 = domination_ratio(one, one, fx.q0, p, q, levels, cfg);
  CHECK(r1.ratio <= 1.0 + 1e-12);
  CHECK(r1.pairing <= r1.form * (1 + 1e-12));

  const auto f = fx.random_on_q0(31);
  const auto g = fx.random_on_q0(32);
  const auto r = domination_ratio(f, g, fx.q0, p, q, levels, cfg);
  CHECK(std::isfinite(r.ratio));
  CHECK(r.ratio > 0.0);
  CHECK(r.pairing <= 2.0 * r.linearized * (1 + 1e-10));
  const auto r3 = domination_ratio(scaled(f, 3.0), g, fx.q0, p, q, levels, cfg);
  CHECK(r3.ratio == doctest::Approx(r.ratio).epsilon(1e-10));
  CHECK_THROWS_AS(domination_ratio(f, g, fx.q0, 2.0, 2.0, levels, cfg), PreconditionError);
}

TEST_CASE("Carleson sum") {
  auto& fx = fixture();
  const auto one = fx.indicator(fx.q0);
  SparseCollection single;
  single.cubes = {fx.q0};
  single.f_sets = {std::vector<CellIndex>(fx.sys.cells(fx.q0).begin(), fx.sys.cells(fx.q0).end())};
  CHECK(carleson_sum_check(fx.sys, single, one, 1.1, 2.0, fx.q0) == doctest::Approx(1.0));
  const auto f = fx.random_on_q0(41);
  const auto s = sparse_decompose(f, f, fx.q0, 2.0, 2.0, fx.sys, SparseConfig{16.0, true});
  const auto phi = fx.random_on_q0(42);
  const double c = carleson_sum_check(fx.sys, s, phi, 1.1, 2.0, fx.q0);
  CHECK(std::isfinite(c));
  CHECK(c > 0.0);
  CHECK_THROWS_AS(carleson_sum_check(fx.sys, s, GridFunction(fx.g, 0.0), 1.1, 2.0, fx.q0), PreconditionError);
  CHECK_THROWS_AS(carleson_sum_check(fx.sys, s, phi, 2.0, 2.0, fx.q0), PreconditionError);
}
