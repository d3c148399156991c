#include "heis/polar.hpp"

#include <cmath>

#include "heis/errors.hpp"

namespace heis {

PolarConstantEstimate polar_constant(GroupDim dim, const SphereQuadrature& q, const BoxGrid& domain,
                                     const std::vector<GaussianProbe>& battery,
                                     double consistency_tol) {
  if (battery.empty()) throw PreconditionError("empty probe battery");
  if (std::abs(q.total_mass() - 1.0) > 1e-10)
    throw PreconditionError("sphere rule must have total mass one");
  if (q.dim().n != dim.n || domain.dim().n != dim.n)
    throw PreconditionError("dimension mismatch in polar constant estimate");
  PolarConstantEstimate est;
  est.exact = polar_constant_exact(dim);
  double num = 0.0, den = 0.0;
  for (const auto& g : battery) {
    TestFunctionParams params;
    params.scale = g.a;
    params.t_scale = g.b;
    const auto f = make_test_function(dim, "gaussian", params);
    const GridFunction sampled = sample(domain, f);
    const double grid_value = lp_norm(sampled, 1.0);
    const double polar_value = polar_integrate_auto(q, 1.0, f).value;
    est.grid_integrals.push_back(grid_value);
    est.polar_integrals.push_back(polar_value);
    num += grid_value * polar_value;
    den += polar_value * polar_value;
  }
  est.kappa = num / den;
  for (std::size_t m = 0; m < battery.size(); ++m) {
    const double ratio = est.grid_integrals[m] / est.polar_integrals[m];
    est.consistency_error = std::max(est.consistency_error, std::abs(ratio - est.kappa) / est.kappa);
  }
  if (est.consistency_error > consistency_tol)
    throw InvariantError("polar constant inconsistent across probes: spread " +
                         std::to_string(est.consistency_error));
  return est;
}

double grid_ball_volume(const BoxGrid& grid, double r) {
  std::size_t count = 0;
  Point p(grid.dim().n);
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    grid.cell_center(i, p.coords());
    if (koranyi_norm(p) < r) ++count;
  }
  return static_cast<double>(count) * grid.cell_volume();
}

}  // namespace heis
