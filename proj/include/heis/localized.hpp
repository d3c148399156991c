#pragma once

#include <vector>

#include "heis/dyadic.hpp"
#include "heis/grid.hpp"
#include "heis/quadrature.hpp"

namespace heis {

/// How V_Q is chosen inside a level-k cube Q.
///  center_ball:  union of level-(k+3) cubes P with B(z_P, delta^{k+1}) inside Q.
///  support_safe: cells whose whole A_{delta^{k+2}} interpolation footprint stays in Q.
enum class SupportRule { center_ball, support_safe };

/// center_ball for delta <= 1/96, support_safe otherwise.
SupportRule default_support_rule(double delta);

/// Mask of cells admissible for V_Q, Q being the level-k cube of each cell.
std::vector<char> admissible_cells(const DyadicSystem& system, int k, const SphereQuadrature& q, SupportRule rule);

/// A_{delta^{k+2}}(F 1_V) with V the union of all V_Q at level k. Since each
/// A_Q F is supported in Q, this equals A_Q F on every level-k cube Q.
GridFunction level_localized_mean(const GridFunction& f, const DyadicSystem& system, int k,
                                  const SphereQuadrature& q, const std::vector<char>& admissible);

struct LocalizedMean {
  GridFunction value;
  double outside_fraction = 0.0;  ///< share of |output| mass outside Q
};

/// A_Q F = A_{delta^{k+2}}(F 1_{V_Q}). Throws InvariantError if more than 1e-8 of
/// the output mass leaves Q.
LocalizedMean localized_mean(const GridFunction& f, CubeId cube, const DyadicSystem& system, const SphereQuadrature& q,
                             SupportRule rule);

}  // namespace heis
