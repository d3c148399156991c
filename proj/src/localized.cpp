#include "heis/localized.hpp"

#include <cmath>
#include <string>

#include "geom_detail.hpp"
#include "heis/errors.hpp"
#include "heis/operators.hpp"
#include "pullback.hpp"

namespace heis {

SupportRule default_support_rule(double delta) {
  return delta <= 1.0 / 96.0 ? SupportRule::center_ball : SupportRule::support_safe;
}

namespace {

void require_domain(const GridFunction& f, const DyadicSystem& system) {
  if (!f.grid().same_layout(system.domain())) throw PreconditionError("function and dyadic system use different grids");
}

double level_radius(const DyadicSystem& system, int k) { return std::pow(system.delta(), k + 2); }

// Euclidean bounding box of B(c, rho) inside the box.
bool ball_inside_domain(const BoxGrid& g, const double* c, double rho) {
  const int n = g.dim().n;
  double cz = 0.0;
  for (int a = 0; a < 2 * n; ++a) cz += c[a] * c[a];
  cz = std::sqrt(cz);
  for (int a = 0; a <= 2 * n; ++a) {
    const double r = a < 2 * n ? rho : rho * rho / 4.0 + 0.5 * cz * rho;
    const double upper = g.lower(a) + g.resolution(a) * g.spacing(a);
    if (c[a] - r < g.lower(a) || c[a] + r > upper) return false;
  }
  return true;
}

std::vector<char> center_ball_cells(const DyadicSystem& system, int k) {
  if (!system.has_level(k + 3)) throw PreconditionError("level " + std::to_string(k + 3) + " missing for V_Q");
  const BoxGrid& g = system.domain();
  const int n = g.dim().n;
  const auto asg = system.assignment(k);
  const double rho = std::pow(system.delta(), k + 1);
  std::vector<char> ok(g.cell_count(), 0);
  std::vector<double> z(g.axes());
  for (CubeId pid : system.level_cubes(k + 3)) {
    const Cube& p = system.cube(pid);
    g.cell_center(p.center_cell, z);
    if (!ball_inside_domain(g, z.data(), rho)) continue;
    const CubeId q = asg[p.center_cell];
    bool inside = true;
    detail::for_each_cell_near(g, z.data(), rho, [&](std::size_t c, const double* x) {
      if (inside && asg[c] != q && detail::dist_left_raw(n, z.data(), x) < rho) inside = false;
    });
    if (!inside) continue;
    for (CellIndex c : system.cells(pid)) ok[c] = 1;
  }
  return ok;
}

std::vector<char> support_safe_cells(const DyadicSystem& system, int k, const SphereQuadrature& q) {
  const BoxGrid& g = system.domain();
  const double r = level_radius(system, k);
  if (r < 2.0 * g.spacing_z())
    throw PreconditionError("localized radius delta^" + std::to_string(k + 2) + " under-resolved");
  const auto asg = system.assignment(k);
  const int nt = g.row_length();
  std::vector<char> bad(g.cell_count(), 0);
  std::vector<double> ys(q.flat_nodes());
  const int n = g.dim().n;
  const std::size_t d = g.axes();
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (int a = 0; a < 2 * n; ++a) ys[i * d + a] *= r;
    ys[i * d + 2 * n] *= r * r;
  }
  detail::for_each_pullback_segment(g, ys, q.weights(), false, [&](const detail::RowSegment& s) {
    const std::size_t out = s.out_row * nt, src = s.src_row * nt;
    for (int it = s.it_begin; it < s.it_end; ++it) {
      const CubeId home = asg[out + it];
      const int j0 = it + s.shift;
      if (j0 >= 0 && j0 < nt && asg[src + j0] != home) bad[src + j0] = 1;
      if (s.frac > 0.0 && j0 + 1 < nt && j0 + 1 >= 0 && asg[src + j0 + 1] != home) bad[src + j0 + 1] = 1;
    }
  });
  for (auto& b : bad) b = !b;
  return bad;
}

}  // namespace

std::vector<char> admissible_cells(const DyadicSystem& system, int k, const SphereQuadrature& q, SupportRule rule) {
  if (!system.has_level(k)) throw PreconditionError("level " + std::to_string(k) + " not built");
  return rule == SupportRule::center_ball ? center_ball_cells(system, k) : support_safe_cells(system, k, q);
}

GridFunction level_localized_mean(const GridFunction& f, const DyadicSystem& system, int k,
                                  const SphereQuadrature& q, const std::vector<char>& admissible) {
  require_domain(f, system);
  if (admissible.size() != f.size()) throw PreconditionError("admissible mask has the wrong size");
  GridFunction masked(f.grid(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) masked[i] = admissible[i] ? f[i] : 0.0;
  return spherical_mean(masked, level_radius(system, k), q);
}

LocalizedMean localized_mean(const GridFunction& f, CubeId cube, const DyadicSystem& system, const SphereQuadrature& q,
                             SupportRule rule) {
  require_domain(f, system);
  const Cube& qc = system.cube(cube);
  const auto ok = admissible_cells(system, qc.level, q, rule);
  std::vector<char> in_q(f.size(), 0);
  for (CellIndex c : system.cells(cube)) in_q[c] = 1;
  std::vector<char> v(f.size(), 0);
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = ok[i] && in_q[i];
  LocalizedMean out{level_localized_mean(f, system, qc.level, q, v), 0.0};
  double total = 0.0, outside = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    total += std::abs(out.value[i]);
    if (!in_q[i]) outside += std::abs(out.value[i]);
  }
  out.outside_fraction = total > 0.0 ? outside / total : 0.0;
  if (out.outside_fraction > 1e-8)
    throw InvariantError("localized mean leaks " + std::to_string(out.outside_fraction) + " of its mass outside Q");
  return out;
}

}  // namespace heis
