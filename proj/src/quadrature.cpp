#include "heis/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include "heis/errors.hpp"

namespace heis {

GaussRule gauss_legendre(int order, double a, double b) {
  if (order < 1) throw PreconditionError("Gauss-Legendre order must be >= 1");
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= order; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p2) / j;
      }
      dp = order * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // One more evaluation at the converged node for the weight.
    double p0 = 1.0, p1 = 0.0;
    for (int j = 1; j <= order; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p2) / j;
    }
    dp = order * (x * p0 - p1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[order - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[order - 1 - i] = half * w;
  }
  return rule;
}

GaussRule gauss_legendre_composite(int order, int panels, double a, double b) {
  if (panels < 1) throw PreconditionError("need at least one panel");
  GaussRule out;
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    GaussRule g = gauss_legendre(order, a + p * width, a + (p + 1) * width);
    out.nodes.insert(out.nodes.end(), g.nodes.begin(), g.nodes.end());
    out.weights.insert(out.weights.end(), g.weights.begin(), g.weights.end());
  }
  return out;
}

ComplexSphereRule hopf_rule(int n_u, int n_phi) {
  if (n_u < 1 || n_phi < 2) throw PreconditionError("Hopf rule needs n_u >= 1 and n_phi >= 2");
  ComplexSphereRule rule;
  rule.n = 2;
  // omega = (sqrt(1-u) e^{i a}, sqrt(u) e^{i b}) with u ~ U[0,1] and a, b
  // uniform phases is the normalised surface measure on S^3.
  const GaussRule gu = gauss_legendre(n_u, 0.0, 1.0);
  const double dphi = 2.0 * std::numbers::pi / n_phi;
  for (int iu = 0; iu < n_u; ++iu) {
    const double r1 = std::sqrt(1.0 - gu.nodes[iu]);
    const double r2 = std::sqrt(gu.nodes[iu]);
    for (int ia = 0; ia < n_phi; ++ia) {
      // Half-step phase offset keeps the nodes off the coordinate axes.
      const double a = (ia + 0.5) * dphi;
      for (int ib = 0; ib < n_phi; ++ib) {
        const double b = (ib + 0.5) * dphi;
        rule.directions.insert(rule.directions.end(),
                               {r1 * std::cos(a), r2 * std::cos(b), r1 * std::sin(a), r2 * std::sin(b)});
        rule.weights.push_back(gu.weights[iu] / (n_phi * n_phi));
      }
    }
  }
  return rule;
}

ComplexSphereRule sphere_rule_for_complex_sphere(int n, int size, std::uint64_t seed) {
  if (n < 1) throw PreconditionError("complex dimension must be >= 1");
  if (size < 2 * n)
    throw PreconditionError("sphere rule size " + std::to_string(size) + " < 2n = " +
                            std::to_string(2 * n));
  if (n == 1) {
    ComplexSphereRule rule;
    rule.n = 1;
    for (int i = 0; i < size; ++i) {
      const double a = 2.0 * std::numbers::pi * (i + 0.5) / size;
      rule.directions.insert(rule.directions.end(), {std::cos(a), std::sin(a)});
      rule.weights.push_back(1.0 / size);
    }
    return rule;
  }
  if (n == 2) {
    const int n_u = std::max(1, static_cast<int>(std::lround(std::cbrt(static_cast<double>(size)) / 2.0)));
    const int n_phi = std::max(2, static_cast<int>(std::sqrt(static_cast<double>(size) / n_u)));
    return hopf_rule(n_u, n_phi);
  }
  ComplexSphereRule rule;
  rule.n = n;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(2 * n);
  for (int i = 0; i < size; ++i) {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (double& c : v) {
        c = normal(rng);
        norm2 += c * c;
      }
    } while (norm2 < 1e-24);
    const double inv = 1.0 / std::sqrt(norm2);
    for (double c : v) rule.directions.push_back(c * inv);
    rule.weights.push_back(1.0 / size);
  }
  return rule;
}

SphereQuadrature::SphereQuadrature(GroupDim dim, int n_theta, int n_sphere,
                                   std::vector<double> nodes, std::vector<double> weights)
    : dim_(dim),
      n_theta_(n_theta),
      n_sphere_(n_sphere),
      nodes_(std::move(nodes)),
      weights_(std::move(weights)) {
  if (nodes_.size() != weights_.size() * static_cast<std::size_t>(dim_.coords()))
    throw PreconditionError("sphere quadrature: node/weight size mismatch");
}

Point SphereQuadrature::node(std::size_t i) const {
  const std::size_t d = dim_.coords();
  return Point::from_coords(dim_.n, std::span<const double>(nodes_.data() + i * d, d));
}

double SphereQuadrature::total_mass() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

double theta_normaliser(int n) {
  return std::exp(std::lgamma((n + 1) / 2.0) - std::lgamma(n / 2.0)) / std::sqrt(std::numbers::pi);
}

SphereQuadrature build_sphere_rule(GroupDim dim, int n_theta, const ComplexSphereRule& sphere) {
  if (n_theta < 8) throw PreconditionError("theta rule order must be >= 8");
  const int n = dim.n;
  if (sphere.n != n) throw PreconditionError("sphere rule dimension does not match group");
  if (sphere.size() == 0 || sphere.directions.size() != sphere.size() * 2 * n)
    throw PreconditionError("degenerate sphere rule");
  double wsum = 0.0;
  for (double w : sphere.weights) {
    if (!(w > 0.0)) throw PreconditionError("degenerate sphere rule: nonpositive weight");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12) throw PreconditionError("degenerate sphere rule: mass != 1");

  const GaussRule gt = gauss_legendre(n_theta, -std::numbers::pi / 2, std::numbers::pi / 2);
  const double cn = theta_normaliser(n);
  const std::size_t d = dim.coords();
  std::vector<double> nodes;
  std::vector<double> weights;
  nodes.reserve(n_theta * sphere.size() * d);
  weights.reserve(n_theta * sphere.size());
  for (int i = 0; i < n_theta; ++i) {
    const double c = std::cos(gt.nodes[i]);
    const double s = std::sin(gt.nodes[i]);
    const double rho = std::sqrt(c);
    const double wt = cn * gt.weights[i] * std::pow(c, n - 1);
    for (std::size_t j = 0; j < sphere.size(); ++j) {
      for (int a = 0; a < 2 * n; ++a) nodes.push_back(rho * sphere.directions[j * 2 * n + a]);
      nodes.push_back(0.25 * s);
      weights.push_back(wt * sphere.weights[j]);
    }
  }
  return SphereQuadrature(dim, n_theta, static_cast<int>(sphere.size()), std::move(nodes),
                          std::move(weights));
}

SphereQuadrature default_sphere_rule(GroupDim dim, int n_theta, int sphere_size, std::uint64_t seed) {
  return build_sphere_rule(dim, n_theta, sphere_rule_for_complex_sphere(dim.n, sphere_size, seed));
}

double integrate_on_sphere(const SphereQuadrature& q, const PointFunction& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q.weights()[i] * f(q.node(i));
  return s;
}

RadialRule radial_rule_interval(double radius, int order, int panels) {
  if (!(radius > 0.0)) throw PreconditionError("radial truncation must be positive");
  GaussRule g = gauss_legendre_composite(order, panels, 0.0, radius);
  return RadialRule{std::move(g.nodes), std::move(g.weights)};
}

RadialRule radial_rule_tangent(double scale, int order) {
  if (!(scale > 0.0)) throw PreconditionError("radial scale must be positive");
  const GaussRule g = gauss_legendre(order, 0.0, std::numbers::pi / 2);
  RadialRule rule;
  for (int i = 0; i < order; ++i) {
    const double c = std::cos(g.nodes[i]);
    rule.radii.push_back(scale * std::tan(g.nodes[i]));
    rule.weights.push_back(g.weights[i] * scale / (c * c));
  }
  return rule;
}

namespace {

// sum_i w_i f(delta_r node_i), reusing one scratch point.
double shell_sum(const SphereQuadrature& q, double r, const PointFunction& f, Point& scratch,
                 bool absolute) {
  const int n = q.dim().n;
  const std::size_t d = q.dim().coords();
  const auto& nodes = q.flat_nodes();
  auto c = scratch.coords();
  double shell = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (int a = 0; a < 2 * n; ++a) c[a] = r * nodes[i * d + a];
    c[2 * n] = r * r * nodes[i * d + 2 * n];
    const double v = f(scratch);
    shell += q.weights()[i] * (absolute ? std::abs(v) : v);
  }
  return shell;
}

}  // namespace

double polar_integrate(const SphereQuadrature& q, double kappa, const RadialRule& radial,
                       const PointFunction& f) {
  const int qdim = q.dim().homogeneous_dim();
  Point scratch(q.dim().n);
  double total = 0.0;
  for (std::size_t j = 0; j < radial.radii.size(); ++j) {
    const double r = radial.radii[j];
    total += radial.weights[j] * std::pow(r, qdim - 1) * shell_sum(q, r, f, scratch, false);
  }
  return kappa * total;
}

PolarIntegral polar_integrate_auto(const SphereQuadrature& q, double kappa, const PointFunction& f,
                                   double rel_cutoff, double truncation_tol) {
  const int qdim = q.dim().homogeneous_dim();
  Point scratch(q.dim().n);
  auto profile = [&](double r) { return shell_sum(q, r, f, scratch, true) * std::pow(r, qdim - 1); };
  // Geometric scan of the radial profile; stop once it has stayed below the
  // cutoff for 8 consecutive samples past the running peak.
  double peak = 0.0;
  double radius = 0.0;
  int below = 0;
  for (double r = 1e-3; r < 1e8; r *= 1.1) {
    const double g = profile(r);
    if (g > peak) {
      peak = g;
      below = 0;
      continue;
    }
    if (peak > 0.0 && g < rel_cutoff * peak) {
      if (below++ == 0) radius = r;
      if (below == 8) break;
    } else {
      below = 0;
    }
  }
  if (peak == 0.0) return PolarIntegral{0.0, 1e-3, 0.0};
  if (below < 8) throw InvariantError("polar integral: integrand does not decay, cannot truncate");
  PolarIntegral out;
  out.radius = radius;
  out.value = polar_integrate(q, kappa, radial_rule_interval(radius, 32, 8), f);
  out.doubled_value = polar_integrate(q, kappa, radial_rule_interval(2 * radius, 32, 16), f);
  const double scale = std::max(std::abs(out.value), std::abs(out.doubled_value));
  if (std::abs(out.doubled_value - out.value) > truncation_tol * scale)
    throw InvariantError("polar integral is truncation-dominated (R=" + std::to_string(radius) + ")");
  return out;
}

void write_csv(std::ostream& os, const SphereQuadrature& q) {
  const int n = q.dim().n;
  for (int j = 0; j < n; ++j) os << 'x' << j + 1 << ',';
  for (int j = 0; j < n; ++j) os << 'y' << j + 1 << ',';
  os << "t,weight\n";
  const std::size_t d = q.dim().coords();
  os.precision(17);
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t a = 0; a < d; ++a) os << q.flat_nodes()[i * d + a] << ',';
    os << q.weights()[i] << '\n';
  }
}

}  // namespace heis
