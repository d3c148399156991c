#pragma once

#include <span>
#include <vector>

namespace heis {

/// Complex dimension n of H^n = C^n x R.
struct GroupDim {
  int n = 1;

  constexpr int homogeneous_dim() const { return 2 * n + 2; }
  constexpr int coords() const { return 2 * n + 1; }
  /// The sparse, continuity and weighted results are only claimed for n >= 2.
  constexpr bool within_theorem_range() const { return n >= 2; }
};

GroupDim make_dim(int n);

/// An element (z, t) of H^n stored as 2n+1 reals: x_1..x_n, y_1..y_n, t
/// with z_j = x_j + i y_j.
class Point {
 public:
  /// The identity element of H^n.
  explicit Point(int n);
  Point(std::span<const double> x, std::span<const double> y, double t);

  static Point from_coords(int n, std::span<const double> coords);

  int n() const { return n_; }
  GroupDim dim() const { return GroupDim{n_}; }

  double x(int j) const { return c_[j]; }
  double y(int j) const { return c_[n_ + j]; }
  double t() const { return c_[2 * n_]; }
  double& x(int j) { return c_[j]; }
  double& y(int j) { return c_[n_ + j]; }
  double& t() { return c_[2 * n_]; }

  std::span<const double> coords() const { return c_; }
  std::span<double> coords() { return c_; }

  /// |z|^2
  double z_norm_sq() const;

  bool operator==(const Point&) const = default;

 private:
  int n_;
  std::vector<double> c_;
};

/// Im(z . conj(w)) = sum_j (y_j u_j - x_j v_j) for z = x + iy, w = u + iv.
double symplectic(const Point& a, const Point& b);

/// (z, t).(w, s) = (z + w, t + s + Im(z . conj(w)) / 2)
Point multiply(const Point& a, const Point& b);
Point inverse(const Point& a);
/// delta_r(z, t) = (r z, r^2 t); throws PreconditionError for r <= 0.
Point dilate(double r, const Point& a);

/// (|z|^4 + 16 t^2)^(1/4)
double koranyi_norm(const Point& a);
/// Left-invariant distance |a^{-1} b|.
double dist_left(const Point& a, const Point& b);

/// Lebesgue volume of the unit Koranyi ball,
/// pi^n Gamma(n/2) Gamma(3/2) / (4 Gamma(n) Gamma(n/2 + 3/2)).
double koranyi_ball_volume(GroupDim dim);

/// Q |B(0,1)|: the factor relating Lebesgue measure to polar coordinates when
/// the sphere measure is normalised to total mass one.
double polar_constant_exact(GroupDim dim);

}  // namespace heis
