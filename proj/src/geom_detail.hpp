#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "heis/grid.hpp"

namespace heis::detail {

/// |a^{-1} b| on raw coordinate arrays (2n+1 doubles each).
inline double dist_left_raw(int n, const double* a, const double* b) {
  double zz = 0.0, symp = 0.0;
  for (int j = 0; j < n; ++j) {
    const double dx = b[j] - a[j], dy = b[n + j] - a[n + j];
    zz += dx * dx + dy * dy;
    symp += a[n + j] * b[j] - a[j] * b[n + j];
  }
  const double t = b[2 * n] - a[2 * n] - 0.5 * symp;
  return std::sqrt(std::sqrt(zz * zz + 16.0 * t * t));
}

/// Visits every cell whose centre lies in the Euclidean bounding box of the
/// left-invariant ball B(c, rho): |z - c_z| < rho per axis and
/// |t - c_t| < rho^2/4 + |c_z| rho / 2. visit(index, coords).
template <class Visit>
void for_each_cell_near(const BoxGrid& g, const double* c, double rho, Visit&& visit) {
  const int n = g.dim().n;
  const int d = 2 * n + 1;
  double cz = 0.0;
  for (int a = 0; a < 2 * n; ++a) cz += c[a] * c[a];
  cz = std::sqrt(cz);
  int lo[16], hi[16];
  for (int a = 0; a < d; ++a) {
    const double r = a < 2 * n ? rho : rho * rho / 4.0 + 0.5 * cz * rho;
    lo[a] = std::max(0, static_cast<int>(std::ceil((c[a] - r - g.lower(a)) / g.spacing(a) - 0.5)));
    hi[a] = std::min(g.resolution(a) - 1, static_cast<int>(std::floor((c[a] + r - g.lower(a)) / g.spacing(a) - 0.5)));
    if (lo[a] > hi[a]) return;
  }
  std::size_t stride[16];
  std::size_t s = 1;
  for (int a = d - 1; a >= 0; --a) {
    stride[a] = s;
    s *= static_cast<std::size_t>(g.resolution(a));
  }
  int idx[16];
  double x[16];
  for (int a = 0; a < d; ++a) {
    idx[a] = lo[a];
    x[a] = g.cell_coordinate(a, idx[a]);
  }
  for (;;) {
    std::size_t lin = 0;
    for (int a = 0; a < d; ++a) lin += static_cast<std::size_t>(idx[a]) * stride[a];
    visit(lin, static_cast<const double*>(x));
    int a = d - 1;
    while (a >= 0) {
      if (++idx[a] <= hi[a]) {
        x[a] = g.cell_coordinate(a, idx[a]);
        break;
      }
      idx[a] = lo[a];
      x[a] = g.cell_coordinate(a, idx[a]);
      --a;
    }
    if (a < 0) return;
  }
}

}  // namespace heis::detail
