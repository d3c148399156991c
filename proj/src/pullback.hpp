#pragma once

// Row-wise evaluation of sums  out(x) = sum_m w_m F(x . y_m^{-1})  with F
// multilinearly interpolated from a BoxGrid. For fixed y and fixed z-part of x
// the z-part of x.y^{-1} is a constant shift of the z index and the t-part is a
// constant shift along the t row, so each (output row, node) pair reduces to a
// few contiguous 1-D loops.

#include <cmath>
#include <span>
#include <vector>

#include "heis/grid.hpp"

namespace heis::detail {

struct RowSegment {
  std::size_t out_row;  // z-index of the output row
  std::size_t src_row;  // z-index of the source row
  double weight;        // node weight times z-interpolation weight
  int it_begin;         // output t range [it_begin, it_end)
  int it_end;
  int shift;            // source t index of output it is it + shift (+1 with weight frac)
  double frac;
};

inline void split_offset(double s, int& fl, double& fr) {
  double f = std::floor(s);
  double r = s - f;
  if (r < 1e-12) {
    r = 0.0;
  } else if (r > 1.0 - 1e-12) {
    f += 1.0;
    r = 0.0;
  }
  fl = static_cast<int>(f);
  fr = r;
}

/// Calls visit(const RowSegment&) for every contributing (output row, node,
/// z-corner). `ys` holds 2n+1 coordinates per node. Segments of one output
/// row are produced by one thread in a fixed order.
template <class Visit>
void for_each_pullback_segment(const BoxGrid& g, std::span<const double> ys, std::span<const double> ws,
                               bool parallel, Visit&& visit) {
  const int n = g.dim().n;
  const int nz = 2 * n;
  const int d = nz + 1;
  const std::size_t m_count = ws.size();
  const int nt = g.row_length();
  const double ht = g.spacing_t();

  // Per-node z offsets in index units.
  std::vector<int> zfl(m_count * nz);
  std::vector<double> zfr(m_count * nz);
  std::vector<double> zs(m_count * nz);
  for (std::size_t m = 0; m < m_count; ++m)
    for (int a = 0; a < nz; ++a) {
      const double s = -ys[m * d + a] / g.spacing(a);
      zs[m * nz + a] = s;
      split_offset(s, zfl[m * nz + a], zfr[m * nz + a]);
    }

  std::vector<std::size_t> row_stride(nz);
  std::size_t rs = 1;
  for (int a = nz - 1; a >= 0; --a) {
    row_stride[a] = rs;
    rs *= static_cast<std::size_t>(g.resolution(a));
  }
  const std::size_t rows = g.row_count();
  const unsigned corners = 1u << nz;

  auto do_row = [&](std::size_t row) {
    int iz[16];
    double xz[16];
    for (int a = 0; a < nz; ++a) {
      iz[a] = static_cast<int>((row / row_stride[a]) % g.resolution(a));
      xz[a] = g.cell_coordinate(a, iz[a]);
    }
    for (std::size_t m = 0; m < m_count; ++m) {
      if (ws[m] == 0.0) continue;
      bool inside = true;
      for (int a = 0; a < nz && inside; ++a) {
        const double u = iz[a] + zs[m * nz + a];
        inside = u >= -0.5 && u <= g.resolution(a) - 0.5;
      }
      if (!inside) continue;
      const double* y = &ys[m * d];
      double symp = 0.0;
      for (int j = 0; j < n; ++j) symp += xz[n + j] * y[j] - xz[j] * y[n + j];
      const double st = (-y[nz] - 0.5 * symp) / ht;
      const int lo = std::max(0, static_cast<int>(std::ceil(-0.5 - st)));
      const int hi = std::min(nt - 1, static_cast<int>(std::floor(nt - 0.5 - st)));
      if (lo > hi) continue;
      RowSegment seg;
      seg.out_row = row;
      seg.it_begin = lo;
      seg.it_end = hi + 1;
      split_offset(st, seg.shift, seg.frac);
      for (unsigned c = 0; c < corners; ++c) {
        double w = ws[m];
        std::size_t src = 0;
        bool valid = true;
        for (int a = 0; a < nz; ++a) {
          const unsigned bit = (c >> a) & 1u;
          const double fr = zfr[m * nz + a];
          if (bit && fr == 0.0) {
            valid = false;
            break;
          }
          const int j = iz[a] + zfl[m * nz + a] + static_cast<int>(bit);
          if (j < 0 || j >= g.resolution(a)) {
            valid = false;
            break;
          }
          w *= bit ? fr : 1.0 - fr;
          src += static_cast<std::size_t>(j) * row_stride[a];
        }
        if (!valid || w == 0.0) continue;
        seg.src_row = src;
        seg.weight = w;
        visit(seg);
      }
    }
  };

  if (parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t row = 0; row < rows; ++row) do_row(row);
  } else {
    for (std::size_t row = 0; row < rows; ++row) do_row(row);
  }
}

/// out(x) = sum_m w_m interpolate(F, x . y_m^{-1}) on the grid of F.
inline GridFunction pullback_sum(const GridFunction& f, std::span<const double> ys, std::span<const double> ws) {
  const BoxGrid& g = f.grid();
  const int nt = g.row_length();
  const std::size_t rows = g.row_count();
  // Source rows padded with one zero ghost on each side.
  const std::size_t pitch = static_cast<std::size_t>(nt) + 2;
  std::vector<double> padded(rows * pitch, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (int k = 0; k < nt; ++k) padded[r * pitch + 1 + k] = f[r * nt + k];
  GridFunction out(g, 0.0);
  auto values = out.values();
  for_each_pullback_segment(g, ys, ws, true, [&](const RowSegment& s) {
    double* o = &values[s.out_row * nt];
    const double* src = &padded[s.src_row * pitch + 1 + s.shift];
    const double w0 = s.weight * (1.0 - s.frac), w1 = s.weight * s.frac;
    if (w1 == 0.0) {
      for (int it = s.it_begin; it < s.it_end; ++it) o[it] += w0 * src[it];
    } else {
      for (int it = s.it_begin; it < s.it_end; ++it) o[it] += w0 * src[it] + w1 * src[it + 1];
    }
  });
  return out;
}

}  // namespace heis::detail
