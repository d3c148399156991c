#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "heis/group.hpp"

namespace heis {

/// Nodes and weights of an n-point Gauss-Legendre rule on [a, b].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int order, double a = -1.0, double b = 1.0);

/// Composite Gauss-Legendre: `panels` equal panels of `order` points each.
GaussRule gauss_legendre_composite(int order, int panels, double a, double b);

/// A probability rule on the unit sphere S^{2n-1} of C^n. Directions are
/// stored flat, 2n reals per point (x_1..x_n, y_1..y_n).
struct ComplexSphereRule {
  int n = 1;
  std::vector<double> directions;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Sphere rule on S^{2n-1}: equispaced angles for n = 1, a product rule in
/// Hopf coordinates for n = 2 (exact for low-degree polynomials), and an
/// equal-weight seeded Monte-Carlo rule for n >= 3. `size` is a target; the
/// n = 2 product rule rounds it to n_u * n_phi^2 points.
ComplexSphereRule sphere_rule_for_complex_sphere(int n, int size, std::uint64_t seed = 0);

/// n = 2 product rule: n_u Gauss points in u = |omega_2|^2, n_phi equispaced
/// angles for each of the two phases.
ComplexSphereRule hopf_rule(int n_u, int n_phi);

/// Discretisation of the probability measure on the unit Koranyi sphere
/// S_K = {|(z,t)| = 1}, built from the cos(theta)-weighted superposition of
/// complex spheres.
class SphereQuadrature {
 public:
  SphereQuadrature(GroupDim dim, int n_theta, int n_sphere, std::vector<double> nodes,
                   std::vector<double> weights);

  GroupDim dim() const { return dim_; }
  int n_theta() const { return n_theta_; }
  int n_sphere() const { return n_sphere_; }
  std::size_t size() const { return weights_.size(); }

  Point node(std::size_t i) const;
  /// Flat node storage, 2n+1 reals per node.
  const std::vector<double>& flat_nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  double total_mass() const;

 private:
  GroupDim dim_;
  int n_theta_;
  int n_sphere_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Gamma((n+1)/2) / (sqrt(pi) Gamma(n/2)), the constant normalising
/// int_{-pi/2}^{pi/2} cos(theta)^{n-1} d theta to one.
double theta_normaliser(int n);

SphereQuadrature build_sphere_rule(GroupDim dim, int n_theta, const ComplexSphereRule& sphere);

/// Convenience: Gauss-Legendre theta rule plus the default sphere rule.
SphereQuadrature default_sphere_rule(GroupDim dim, int n_theta, int sphere_size,
                                     std::uint64_t seed = 0);

using PointFunction = std::function<double(const Point&)>;

double integrate_on_sphere(const SphereQuadrature& q, const PointFunction& f);

/// Radial nodes r_j and weights (Jacobian included) for int_0^R dr.
struct RadialRule {
  std::vector<double> radii;
  std::vector<double> weights;
};

RadialRule radial_rule_interval(double radius, int order = 32, int panels = 16);
/// r = scale * tan(phi), phi in (0, pi/2): integrates over [0, inf) without
/// truncation for integrands with algebraic decay.
RadialRule radial_rule_tangent(double scale, int order = 128);

/// kappa * sum_j w_j r_j^{Q-1} sum_i w_i f(delta_{r_j} node_i)
double polar_integrate(const SphereQuadrature& q, double kappa, const RadialRule& radial,
                       const PointFunction& f);

struct PolarIntegral {
  double value = 0.0;
  double radius = 0.0;          ///< truncation radius used
  double doubled_value = 0.0;   ///< same integral on [0, 2R]
};

/// Picks the truncation radius where the radial profile drops below
/// `rel_cutoff` of its peak, integrates on [0, R], and compares with [0, 2R].
/// Throws InvariantError if the two differ by more than `truncation_tol`
/// relative.
PolarIntegral polar_integrate_auto(const SphereQuadrature& q, double kappa, const PointFunction& f,
                                   double rel_cutoff = 1e-14, double truncation_tol = 1e-8);

void write_csv(std::ostream& os, const SphereQuadrature& q);

}  // namespace heis
