#include "heis/group.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "heis/errors.hpp"

namespace heis {

GroupDim make_dim(int n) {
  if (n < 1) throw PreconditionError("complex dimension must be >= 1, got " + std::to_string(n));
  return GroupDim{n};
}

Point::Point(int n) : n_(n), c_(static_cast<std::size_t>(2 * n + 1), 0.0) {
  if (n < 1) throw PreconditionError("complex dimension must be >= 1");
}

Point::Point(std::span<const double> x, std::span<const double> y, double t)
    : Point(static_cast<int>(x.size())) {
  if (y.size() != x.size()) throw PreconditionError("x and y must have the same length");
  for (int j = 0; j < n_; ++j) {
    c_[j] = x[j];
    c_[n_ + j] = y[j];
  }
  c_[2 * n_] = t;
}

Point Point::from_coords(int n, std::span<const double> coords) {
  if (coords.size() != static_cast<std::size_t>(2 * n + 1))
    throw PreconditionError("expected 2n+1 coordinates");
  Point p(n);
  std::copy(coords.begin(), coords.end(), p.c_.begin());
  return p;
}

double Point::z_norm_sq() const {
  double s = 0.0;
  for (int j = 0; j < 2 * n_; ++j) s += c_[j] * c_[j];
  return s;
}

namespace {
void require_same_dim(const Point& a, const Point& b) {
  if (a.n() != b.n())
    throw PreconditionError("dimension mismatch: n=" + std::to_string(a.n()) + " vs n=" +
                            std::to_string(b.n()));
}
}  // namespace

double symplectic(const Point& a, const Point& b) {
  require_same_dim(a, b);
  double s = 0.0;
  for (int j = 0; j < a.n(); ++j) s += a.y(j) * b.x(j) - a.x(j) * b.y(j);
  return s;
}

Point multiply(const Point& a, const Point& b) {
  require_same_dim(a, b);
  Point out(a.n());
  for (int j = 0; j < 2 * a.n(); ++j) out.coords()[j] = a.coords()[j] + b.coords()[j];
  out.t() = a.t() + b.t() + 0.5 * symplectic(a, b);
  return out;
}

Point inverse(const Point& a) {
  Point out(a.n());
  for (std::size_t i = 0; i < a.coords().size(); ++i) out.coords()[i] = -a.coords()[i];
  return out;
}

Point dilate(double r, const Point& a) {
  if (!(r > 0.0)) throw PreconditionError("dilation parameter must be positive");
  Point out = a;
  for (int j = 0; j < 2 * a.n(); ++j) out.coords()[j] *= r;
  out.t() *= r * r;
  return out;
}

double koranyi_norm(const Point& a) {
  const double z2 = a.z_norm_sq();
  return std::sqrt(std::sqrt(z2 * z2 + 16.0 * a.t() * a.t()));
}

double dist_left(const Point& a, const Point& b) { return koranyi_norm(multiply(inverse(a), b)); }

double koranyi_ball_volume(GroupDim dim) {
  const double n = dim.n;
  // |B| = |S^{2n-1}|/2 * int_0^1 sqrt(1 - rho^4) rho^{2n-1} d rho, and the
  // radial integral is B(n/2, 3/2) / 4.
  const double log_beta = std::lgamma(n / 2) + std::lgamma(1.5) - std::lgamma(n / 2 + 1.5);
  return std::pow(std::numbers::pi, n) / (4.0 * std::tgamma(n)) * std::exp(log_beta);
}

double polar_constant_exact(GroupDim dim) {
  return dim.homogeneous_dim() * koranyi_ball_volume(dim);
}

}  // namespace heis
