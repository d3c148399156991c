#include "heis/exponents.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "geom_detail.hpp"
#include "heis/errors.hpp"

namespace heis {

namespace {

struct Vec2 {
  double x, y;
};

// Signed distance of p from the line ab, positive on the side of c.
double side(Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
  const double ex = b.x - a.x, ey = b.y - a.y;
  const double len = std::hypot(ex, ey);
  const double s = (ex * (p.y - a.y) - ey * (p.x - a.x)) / len;
  const double sc = ex * (c.y - a.y) - ey * (c.x - a.x);
  return sc > 0 ? s : -s;
}

Region triangle(const std::array<Vec2, 3>& v, Vec2 p, double margin) {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) m = std::min(m, side(v[i], v[(i + 1) % 3], v[(i + 2) % 3], p));
  if (m > margin) return Region::inside;
  if (m < -margin) return Region::outside;
  return Region::boundary;
}

void require_n(int n) {
  if (n < 1) throw PreconditionError("dimension must be >= 1");
}

}  // namespace

void ExponentPair::validate() const {
  if (!(inv_p > 0.0 && inv_p < 1.0 && inv_q > 0.0 && inv_q < 1.0))
    throw PreconditionError("exponent pair must lie in the open unit square");
}

std::string_view to_string(Region r) {
  switch (r) {
    case Region::inside: return "inside";
    case Region::boundary: return "boundary";
    case Region::outside: return "outside";
  }
  return "?";
}

Region improving_region(int n, ExponentPair e, double margin) {
  require_n(n);
  e.validate();
  const double a = 2.0 * n / (2.0 * n + 1.0);
  const Vec2 p{e.inv_p, e.inv_q};
  // The open diagonal is included explicitly.
  if (std::abs(p.x - p.y) <= margin * std::sqrt(2.0)) return Region::inside;
  return triangle({Vec2{0, 0}, Vec2{1, 1}, Vec2{a, 1.0 - a}}, p, margin);
}

Region sparse_region(int n, ExponentPair e, double margin) {
  require_n(n);
  e.validate();
  const double a = 2.0 * n / (2.0 * n + 1.0);
  return triangle({Vec2{0, 1}, Vec2{1, 0}, Vec2{a, a}}, Vec2{e.inv_p, e.inv_q}, margin);
}

double phi_exponent(int n, double inv_p0) {
  require_n(n);
  if (!(inv_p0 > 0.0 && inv_p0 < 1.0)) throw PreconditionError("1/p0 must lie in (0,1)");
  const double b = 2.0 * n / (2.0 * n + 1.0);
  const double inv_phi = inv_p0 <= b ? 1.0 - inv_p0 / (2.0 * n) : 2.0 * n * (1.0 - inv_p0);
  return 1.0 / inv_phi;
}

double conjugate(double p) {
  if (!(p >= 1.0)) throw PreconditionError("conjugate exponent needs p >= 1");
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

CubeFamily make_cube_family(const std::vector<DyadicSystem>& systems, int k_lo, int k_hi,
                            std::size_t center_stride) {
  if (systems.empty()) throw PreconditionError("cube family needs at least one dyadic system");
  if (center_stride == 0) throw PreconditionError("ball centre stride must be positive");
  CubeFamily family;
  for (const auto& s : systems)
    for (const auto& q : s.cubes()) {
      const auto cells = s.cells(q.id);
      family.emplace_back(cells.begin(), cells.end());
    }
  const BoxGrid& g = systems.front().domain();
  const int n = g.dim().n;
  std::vector<double> x(g.axes());
  for (int k = k_lo; k <= k_hi; ++k) {
    const double r = std::pow(systems.front().delta(), k);
    for (std::size_t c = 0; c < g.cell_count(); c += center_stride) {
      g.cell_center(c, x);
      std::vector<CellIndex> ball;
      detail::for_each_cell_near(g, x.data(), r, [&](std::size_t idx, const double* y) {
        if (detail::dist_left_raw(n, x.data(), y) < r) ball.push_back(static_cast<CellIndex>(idx));
      });
      if (!ball.empty()) family.push_back(std::move(ball));
    }
  }
  return family;
}

namespace {

void check_weight(const GridFunction& w, const CubeFamily& family) {
  if (family.empty()) throw PreconditionError("empty cube family");
  for (double v : w.values())
    if (!(v > 0.0)) throw PreconditionError("weight must be positive on every cell");
}

double mean_pow(const GridFunction& w, const std::vector<CellIndex>& cells, double e) {
  if (cells.empty()) throw PreconditionError("empty cube in family");
  double s = 0.0;
  for (CellIndex c : cells) s += std::pow(w[c], e);
  return s / static_cast<double>(cells.size());
}

}  // namespace

double ap_constant(const GridFunction& w, double p, const CubeFamily& family) {
  if (!(p > 1.0) || std::isinf(p)) throw PreconditionError("A_p needs 1 < p < inf");
  check_weight(w, family);
  const double e = 1.0 - conjugate(p);
  double best = 0.0;
  for (const auto& q : family) best = std::max(best, mean_pow(w, q, 1.0) * std::pow(mean_pow(w, q, e), p - 1.0));
  return best;
}

double rh_constant(const GridFunction& w, double p, const CubeFamily& family) {
  if (!(p >= 1.0) || std::isinf(p)) throw PreconditionError("RH_p needs 1 <= p < inf");
  check_weight(w, family);
  if (p == 1.0) return 1.0;
  double best = 0.0;
  for (const auto& q : family)
    best = std::max(best, std::pow(mean_pow(w, q, p), 1.0 / p) / mean_pow(w, q, 1.0));
  return best;
}

WeightedMaximalResult weighted_maximal_ratio(const GridFunction& f, const GridFunction& w, double p, double p0,
                                             const LacunaryConfig& cfg, const SphereQuadrature& q,
                                             const CubeFamily& family) {
  const int n = f.grid().dim().n;
  if (n < 2) throw PreconditionError("weighted bound is only claimed for n >= 2");
  if (!(p0 > 1.0)) throw PreconditionError("p0 must exceed 1");
  WeightedMaximalResult out;
  out.phi = phi_exponent(n, 1.0 / p0);
  out.p_upper = conjugate(out.phi);
  if (!(p > p0 && p < out.p_upper))
    throw PreconditionError("p = " + std::to_string(p) + " outside the admissible window (" + std::to_string(p0) +
                            ", " + std::to_string(out.p_upper) + ")");
  if (!w.grid().same_layout(f.grid())) throw PreconditionError("weight lives on a different grid");
  out.weight.ap = ap_constant(w, p / p0, family);
  out.weight.rh = rh_constant(w, conjugate(out.p_upper / p), family);
  out.weight.family_size = family.size();
  const GridFunction m = lacunary_maximal(f, cfg, q);
  const double denom = lp_norm(f, p, &w);
  if (denom == 0.0) throw PreconditionError("f vanishes in L^p(w)");
  out.ratio = lp_norm(m, p, &w) / denom;
  return out;
}

}  // namespace heis
