#pragma once

#include <string_view>
#include <vector>

#include "heis/dyadic.hpp"
#include "heis/grid.hpp"
#include "heis/operators.hpp"

namespace heis {

/// A point (1/p, 1/q) of the open unit square.
struct ExponentPair {
  double inv_p = 0.5;
  double inv_q = 0.5;

  void validate() const;
};

enum class Region { inside, boundary, outside };

std::string_view to_string(Region r);

/// Open triangle (0,0), (1,1), (2n/(2n+1), 1/(2n+1)) together with the open
/// diagonal. Points within `margin` of another edge are reported as boundary.
Region improving_region(int n, ExponentPair e, double margin = 1e-9);

/// Open triangle (0,1), (1,0), (2n/(2n+1), 2n/(2n+1)).
Region sparse_region(int n, ExponentPair e, double margin = 1e-9);

/// 1/phi = 1 - (1/p0)/(2n) for 1/p0 <= 2n/(2n+1), else 2n (1 - 1/p0).
double phi_exponent(int n, double inv_p0);

/// Hoelder conjugate p / (p - 1); infinity for p = 1.
double conjugate(double p);

using CubeFamily = std::vector<std::vector<CellIndex>>;

/// Cell sets of every cube of the given systems, plus the Koranyi balls
/// B(x, delta^k), k_lo <= k <= k_hi, centred at every `center_stride`-th cell
/// (truncated to the domain).
CubeFamily make_cube_family(const std::vector<DyadicSystem>& systems, int k_lo, int k_hi,
                            std::size_t center_stride);

/// max over the family of <w>_Q <w^{1-p'}>_Q^{p-1}
double ap_constant(const GridFunction& w, double p, const CubeFamily& family);
/// max over the family of <w>_{Q,p} / <w>_Q
double rh_constant(const GridFunction& w, double p, const CubeFamily& family);

struct WeightReport {
  double ap = 0.0;
  double rh = 0.0;
  std::size_t family_size = 0;
};

struct WeightedMaximalResult {
  double ratio = 0.0;           ///< ||M f||_{L^p(w)} / ||f||_{L^p(w)}
  double phi = 0.0;
  double p_upper = 0.0;         ///< phi(1/p0)'
  WeightReport weight;          ///< A_{p/p0} and RH_{(p_upper/p)'} constants of w
};

/// Refuses (PreconditionError) unless p0 < p < phi(1/p0)' and n >= 2.
WeightedMaximalResult weighted_maximal_ratio(const GridFunction& f, const GridFunction& w, double p, double p0,
                                             const LacunaryConfig& cfg, const SphereQuadrature& q,
                                             const CubeFamily& family);

}  // namespace heis
