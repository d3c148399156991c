#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

#include "heis/dyadic.hpp"
#include "heis/grid.hpp"
#include "heis/localized.hpp"
#include "heis/quadrature.hpp"

namespace heis {

/// Admissible-cell masks for a window of levels, reusable across functions.
struct LocalizedLevels {
  const DyadicSystem* system = nullptr;
  const SphereQuadrature* quadrature = nullptr;
  SupportRule rule = SupportRule::support_safe;
  int k_lo = 0;
  int k_hi = 0;
  std::vector<std::vector<char>> admissible;  ///< per level k_lo..k_hi
};

/// Levels k_lo..k_hi clamped to what the rule and the grid allow:
/// center_ball needs level k+3, and delta^{k+2} must be at least two z spacings.
/// Throws PreconditionError when nothing remains.
LocalizedLevels prepare_levels(const DyadicSystem& system, const SphereQuadrature& q, SupportRule rule, int k_lo,
                               int k_hi = std::numeric_limits<int>::max());

struct LinearizationSets {
  CubeId root = kNoCube;
  int k_lo = 0;
  int k_hi = 0;
  std::vector<CellIndex> cells;      ///< cells of Q0
  std::vector<double> sup;           ///< sup_Q A_Q f per cell of Q0
  std::vector<std::uint64_t> e_bits; ///< bit (k - k_lo) set iff the cell is in E_Q for its level-k cube
  std::vector<int> b_level;          ///< level of the B_Q holding the cell, or k_lo - 1
  std::vector<GridFunction> means;   ///< A_Q f assembled per level

  bool in_e(std::size_t i, int k) const { return (e_bits[i] >> (k - k_lo)) & 1u; }
  bool in_b(std::size_t i) const { return b_level[i] >= k_lo; }
  /// Cells of E_Q / B_Q for a cube Q inside Q0 within the level window.
  std::vector<CellIndex> e_cells(const DyadicSystem& system, CubeId q) const;
  std::vector<CellIndex> b_cells(const DyadicSystem& system, CubeId q) const;
};

/// E_Q = {x in Q : A_Q f(x) >= sup_P A_P f(x) / 2, sup > 0} and
/// B_Q = E_Q minus the E_{Q'} of strictly larger Q', for the subcubes of Q0.
LinearizationSets linearization_sets(const GridFunction& f, CubeId q0, const LocalizedLevels& levels);

/// <sup_Q A_Q f, g> over Q0.
double maximal_pairing(const LinearizationSets& lin, const GridFunction& g);
/// sum_Q <A_Q f, g 1_{B_Q}>
double linearized_sum(const LinearizationSets& lin, const GridFunction& g);

struct SparseConfig {
  double stop_threshold = 2.0;
  bool g_uses_q = true;  ///< stopping tests g with exponent q (false: p)
};

/// Smallest threshold c with c^{-p} <= 1/4 and c^{-q} <= 1/4.
double guaranteed_threshold(double p, double q);

/// Per-cube <F>_{Q,p}, indexed by cube id.
std::vector<double> cube_averages(const DyadicSystem& system, const GridFunction& f, double p);

/// Maximal strict subcubes P of Q0 with avg_f[P] > c avg_f[Q0] or avg_g[P] > c avg_g[Q0].
std::vector<CubeId> stopping_children(const DyadicSystem& system, CubeId q0, const std::vector<double>& avg_f,
                                      const std::vector<double>& avg_g, double threshold);

struct SparseCollection {
  std::vector<CubeId> cubes;                 ///< increasing id
  std::vector<std::vector<CellIndex>> f_sets;
  double eta = 1.0;                          ///< min |F_S| / |S|
};

/// Stopping-time recursion from Q0. Throws InvariantError if some |F_Q| < |Q|/2.
SparseCollection sparse_decompose(const GridFunction& f, const GridFunction& g, CubeId q0, double p, double q,
                                  const DyadicSystem& system, const SparseConfig& cfg = {});

struct CollectionCheck {
  bool subsets = false;
  bool disjoint = false;
  double eta = 0.0;
};

CollectionCheck check_collection(const DyadicSystem& system, const SparseCollection& s);

struct SparseTerm {
  CubeId cube = kNoCube;
  int level = 0;
  double measure = 0.0;
  double f_measure = 0.0;
  double avg_f = 0.0;
  double avg_g = 0.0;
  double value = 0.0;
};

struct SparseFormResult {
  double value = 0.0;
  std::vector<SparseTerm> terms;
};

/// sum_S |S| <f>_{S,p} <g>_{S,q}
SparseFormResult sparse_form(const DyadicSystem& system, const SparseCollection& s, const GridFunction& f,
                             const GridFunction& g, double p, double q);

struct DominationResult {
  double pairing = 0.0;     ///< <sup_Q A_Q f, g>
  double linearized = 0.0;  ///< sum_Q <A_Q f, g 1_{B_Q}>
  double form = 0.0;        ///< Lambda_{S,p,q}(f, g)
  double ratio = 0.0;       ///< pairing / form
  double lacunary_pairing = 0.0;  ///< <M f, g> with M the lacunary maximal function over the same radii
  double lacunary_ratio = 0.0;
  int k_lo = 0;
  int k_hi = 0;
  SparseCollection collection;
};

/// Both the dyadic-localized pairing and <M^lac f, g> (radii delta^{k+2},
/// k_lo <= k <= k_hi) against Lambda_{S,p,q}. Refuses pairs outside the open
/// sparse triangle.
DominationResult domination_ratio(const GridFunction& f, const GridFunction& g, CubeId q0, double p, double q,
                                  const LocalizedLevels& levels, const SparseConfig& cfg = {});

/// sum_{Q in S} <phi>_{Q,s} |Q| / (<phi>_{Q0,t} |Q0|)
double carleson_sum_check(const DyadicSystem& system, const SparseCollection& s, const GridFunction& phi, double s_exp,
                          double t_exp, CubeId q0);

/// cube_id,level,measure,f_measure,avg_f,avg_g,term
void write_csv(std::ostream& os, const SparseFormResult& r);

}  // namespace heis
