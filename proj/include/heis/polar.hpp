#pragma once

#include <vector>

#include "heis/grid.hpp"
#include "heis/quadrature.hpp"

namespace heis {

struct GaussianProbe {
  double a = 1.0;  ///< exp(-a|z|^2 - b t^2)
  double b = 1.0;
};

struct PolarConstantEstimate {
  double kappa = 0.0;
  double exact = 0.0;               ///< Q |B(0,1)| in closed form
  double consistency_error = 0.0;   ///< max relative spread of per-probe ratios around kappa
  std::vector<double> grid_integrals;
  std::vector<double> polar_integrals;  ///< with kappa = 1
};

/// Least-squares fit of kappa in grid_sum(g) = kappa * polar(g) over a battery of
/// Gaussians. Throws InvariantError when the per-probe ratios disagree by more
/// than `consistency_tol` relative.
PolarConstantEstimate polar_constant(GroupDim dim, const SphereQuadrature& q, const BoxGrid& domain,
                                     const std::vector<GaussianProbe>& battery = {{1.0, 1.0},
                                                                                  {2.0, 3.0}},
                                     double consistency_tol = 1e-3);

/// Cell count of the Koranyi ball B(0, r) on the grid, times the cell volume.
double grid_ball_volume(const BoxGrid& grid, double r);

}  // namespace heis
