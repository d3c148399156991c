#include "heis/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "heis/errors.hpp"
#include "heis/spectral.hpp"
#include "pullback.hpp"

namespace heis {

namespace {

void require_dims(const GridFunction& f, const SphereQuadrature& q) {
  if (f.grid().dim().n != q.dim().n) throw PreconditionError("sphere rule and grid differ in dimension");
}

std::vector<double> dilated_nodes(const SphereQuadrature& q, double r) {
  const int n = q.dim().n;
  const std::size_t d = q.dim().coords();
  std::vector<double> ys(q.flat_nodes());
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (int a = 0; a < 2 * n; ++a) ys[i * d + a] *= r;
    ys[i * d + 2 * n] *= r * r;
  }
  return ys;
}

}  // namespace

GridFunction spherical_mean(const GridFunction& f, double r, const SphereQuadrature& q) {
  require_dims(f, q);
  if (!(r > 0.0)) throw PreconditionError("radius must be positive");
  const double h = f.grid().spacing_z();
  if (r < 2.0 * h)
    throw PreconditionError("radius " + std::to_string(r) + " under-resolved (grid spacing " + std::to_string(h) + ")");
  const auto ys = dilated_nodes(q, r);
  return detail::pullback_sum(f, ys, q.weights());
}

double spherical_mean_at(const PointFunction& f, const Point& x, double r, const SphereQuadrature& q) {
  if (!(r > 0.0)) throw PreconditionError("radius must be positive");
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q.weights()[i] * f(multiply(x, inverse(dilate(r, q.node(i)))));
  return s;
}

GridFunction translate_right(const GridFunction& f, const Point& a) {
  if (a.n() != f.grid().dim().n) throw PreconditionError("translation has the wrong dimension");
  const double w = 1.0;
  return detail::pullback_sum(f, a.coords(), std::span<const double>(&w, 1));
}

void LacunaryConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("delta must lie in (0,1)");
  if (k_min > k_max) throw PreconditionError("empty scale window");
}

double LacunaryConfig::radius(int k) const { return std::pow(delta, k); }

GridFunction lacunary_maximal(const GridFunction& f, const LacunaryConfig& cfg, const SphereQuadrature& q) {
  cfg.validate();
  const double h = f.grid().spacing_z();
  if (cfg.radius(cfg.k_max) < 2.0 * h)
    throw PreconditionError("scale delta^k_max = " + std::to_string(cfg.radius(cfg.k_max)) +
                            " is below twice the grid spacing");
  GridFunction out(f.grid(), 0.0);
  for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
    const GridFunction a = spherical_mean(f, cfg.radius(k), q);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], std::abs(a[i]));
  }
  return out;
}

double poisson_kernel(GroupDim dim, double kappa, double t, const Point& x) {
  if (!(t > 0.0)) throw PreconditionError("Poisson parameter must be positive");
  const int Q = dim.homogeneous_dim();
  const double r = koranyi_norm(x);
  return c_q(Q, kappa) * t * std::pow(t * t + r * r, -(Q + 1) / 2.0);
}

PoissonMean poisson_mean(const GridFunction& f, double t, double kappa, const SphereQuadrature& q,
                         int radial_order) {
  require_dims(f, q);
  if (!(t > 0.0)) throw PreconditionError("Poisson parameter must be positive");
  const GroupDim dim = f.grid().dim();
  const int Q = dim.homogeneous_dim();
  const double cq = c_q(Q, kappa);
  const RadialRule radial = radial_rule_tangent(t, radial_order);
  const std::size_t d = dim.coords();
  std::vector<double> ys;
  std::vector<double> ws;
  ys.reserve(radial.radii.size() * q.size() * d);
  double mass = 0.0;
  for (std::size_t j = 0; j < radial.radii.size(); ++j) {
    const double rho = radial.radii[j];
    const double shell = kappa * radial.weights[j] * std::pow(rho, Q - 1) * cq * t *
                         std::pow(t * t + rho * rho, -(Q + 1) / 2.0);
    const auto nodes = dilated_nodes(q, rho);
    ys.insert(ys.end(), nodes.begin(), nodes.end());
    for (double w : q.weights()) {
      ws.push_back(shell * w);
      mass += shell * w;
    }
  }
  if (std::abs(mass - 1.0) > 1e-3)
    throw InvariantError("Poisson kernel mass " + std::to_string(mass) + " deviates from 1");
  return PoissonMean{detail::pullback_sum(f, ys, ws), mass};
}

std::vector<ContinuityDeficit> continuity_sweep(const GridFunction& f, double r, const std::vector<Point>& shifts,
                                                double p, double q_exp, const SphereQuadrature& q) {
  for (const auto& a : shifts)
    if (koranyi_norm(a) > r) throw PreconditionError("translation must satisfy |a| <= r");
  const double norm_f = lp_norm(f, p);
  if (norm_f == 0.0) throw PreconditionError("continuity deficit of the zero function");
  const GridFunction ar = spherical_mean(f, r, q);
  std::vector<ContinuityDeficit> out;
  for (const auto& a : shifts) {
    const double na = koranyi_norm(a);
    ContinuityDeficit d;
    d.under_resolved = na > 0.0 && na < f.grid().spacing_z();
    if (na > 0.0) {
      const GridFunction art = spherical_mean(translate_right(f, a), r, q);
      GridFunction diff(f.grid());
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = ar[i] - art[i];
      d.value = lp_norm(diff, q_exp) / norm_f;
    }
    out.push_back(d);
  }
  return out;
}

ContinuityDeficit continuity_deficit(const GridFunction& f, double r, const Point& a, double p, double q_exp,
                                     const SphereQuadrature& q) {
  return continuity_sweep(f, r, {a}, p, q_exp, q).front();
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("line fit needs >= 2 paired samples");
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw PreconditionError("line fit with constant abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

}  // namespace heis
