#pragma once

#include <vector>

#include "heis/grid.hpp"
#include "heis/quadrature.hpp"

namespace heis {

/// A_r F(x) = sum_i w_i F(x . delta_r(node_i)^{-1}) at every cell centre.
/// Requires r >= 2 * (largest z spacing).
GridFunction spherical_mean(const GridFunction& f, double r, const SphereQuadrature& q);

/// A_r f(x) for a closed-form f (no grid interpolation).
double spherical_mean_at(const PointFunction& f, const Point& x, double r, const SphereQuadrature& q);

/// tau_a F(x) = F(x . a^{-1}).
GridFunction translate_right(const GridFunction& f, const Point& a);

struct LacunaryConfig {
  double delta = 0.5;
  int k_min = 0;
  int k_max = 0;

  void validate() const;
  double radius(int k) const;
};

/// max_{k_min <= k <= k_max} |A_{delta^k} F|
GridFunction lacunary_maximal(const GridFunction& f, const LacunaryConfig& cfg, const SphereQuadrature& q);

/// P_t(x) = c_Q t (t^2 + |x|^2)^{-(Q+1)/2}
double poisson_kernel(GroupDim dim, double kappa, double t, const Point& x);

struct PoissonMean {
  GridFunction value;
  double kernel_mass = 0.0;  ///< discrete mass of P_t, 1 up to quadrature error
};

/// F * P_t by polar quadrature of the kernel (tangent radial map, no truncation).
/// Throws InvariantError when the discrete kernel mass is off by more than 1e-3.
PoissonMean poisson_mean(const GridFunction& f, double t, double kappa, const SphereQuadrature& q,
                         int radial_order = 64);

struct ContinuityDeficit {
  double value = 0.0;
  bool under_resolved = false;  ///< |a| below the grid spacing
};

/// ||A_r F - A_r tau_a F||_{q_exp} / ||F||_p. Requires |a| <= r.
ContinuityDeficit continuity_deficit(const GridFunction& f, double r, const Point& a, double p, double q_exp,
                                     const SphereQuadrature& q);

/// continuity_deficit for several translations sharing one A_r F.
std::vector<ContinuityDeficit> continuity_sweep(const GridFunction& f, double r, const std::vector<Point>& shifts,
                                                double p, double q_exp, const SphereQuadrature& q);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = slope x + intercept.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace heis
