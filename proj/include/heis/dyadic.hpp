#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "heis/grid.hpp"

namespace heis {

using CubeId = std::uint32_t;
inline constexpr CubeId kNoCube = std::numeric_limits<CubeId>::max();

struct Cube {
  CubeId id = kNoCube;
  int level = 0;
  CellIndex center_cell = 0;
  Point center{1};
  double side = 1.0;           ///< delta^level
  CubeId parent = kNoCube;
  std::size_t cell_count = 0;
  double measure = 0.0;        ///< cell_count * cell_volume
};

struct DyadicOptions {
  double delta = 0.5;
  int k_min = 0;   ///< coarsest level
  int k_max = 1;   ///< finest level
  std::uint64_t seed = 0;
  /// Finest side length must be at least this many z grid spacings.
  double min_spacing_factor = 4.0;
};

/// Nested cube hierarchy on the cells of a BoxGrid: greedy maximal
/// delta^k-separated nets in d_L (coarse nets carried into finer ones),
/// finest cells assigned to the nearest finest centre, each finer cube to the
/// nearest coarser centre.
class DyadicSystem {
 public:
  const BoxGrid& domain() const { return domain_; }
  double delta() const { return opts_.delta; }
  std::uint64_t seed() const { return opts_.seed; }
  int k_min() const { return opts_.k_min; }
  int k_max() const { return opts_.k_max; }
  bool has_level(int k) const { return k >= opts_.k_min && k <= opts_.k_max; }

  const std::vector<Cube>& cubes() const { return cubes_; }
  const Cube& cube(CubeId id) const { return cubes_[id]; }
  std::span<const CubeId> level_cubes(int k) const;
  std::span<const CubeId> children(CubeId id) const;
  /// Cells of a cube in increasing index order.
  std::span<const CellIndex> cells(CubeId id) const;
  /// Level-k cube containing a cell.
  CubeId cube_of_cell(CellIndex cell, int k) const;
  /// Per-cell cube ids at level k.
  std::span<const CubeId> assignment(int k) const;

  friend DyadicSystem build_system(const BoxGrid& domain, const DyadicOptions& opts);

 private:
  DyadicSystem(BoxGrid domain, DyadicOptions opts) : domain_(std::move(domain)), opts_(opts) {}
  int slot(int k) const;

  BoxGrid domain_;
  DyadicOptions opts_;
  std::vector<Cube> cubes_;
  std::vector<std::vector<CubeId>> level_ids_;
  std::vector<std::vector<CubeId>> assign_;       // per level, per cell
  std::vector<std::size_t> cell_offsets_;         // per cube into cell_list_
  std::vector<CellIndex> cell_list_;
  std::vector<std::size_t> child_offsets_;
  std::vector<CubeId> child_list_;
};

DyadicSystem build_system(const BoxGrid& domain, const DyadicOptions& opts);

/// Level-k cube whose cell set contains p's cell. Throws outside the domain.
const Cube& cube_of(const DyadicSystem& system, const Point& p, int k);

/// True if every cell of `inner` belongs to `outer`.
bool cube_contains(const DyadicSystem& system, CubeId outer, CubeId inner);

struct LevelReport {
  int level = 0;
  std::size_t cubes = 0;
  double min_c_in = 0.0;
  double max_c_out = 0.0;
  /// The same constants after granting one cell (its d_L half diameter) of slack.
  double min_c_in_slack = 0.0;
  double max_c_out_slack = 0.0;
  double min_separation = 0.0;  ///< min centre distance / delta^k
};

struct SystemReport {
  bool partition = false;
  bool nesting = false;
  bool centers_contained = false;
  bool separated = false;  ///< separation >= delta^k - one cell diameter
  double min_c_in = 0.0;
  double max_c_out = 0.0;
  double min_c_in_slack = 0.0;
  double max_c_out_slack = 0.0;
  std::vector<LevelReport> levels;
};

SystemReport verify_system(const DyadicSystem& system);

/// Fraction of random balls B(x, r), delta^{k+1} < r <= delta^k, contained in
/// the level-(k-1) cube of x in at least one of the systems.
struct HitRate {
  std::size_t trials = 0;
  std::size_t hits = 0;
  double rate() const { return trials ? static_cast<double>(hits) / trials : 0.0; }
};

HitRate ball_hit_rate(const std::vector<DyadicSystem>& systems, int trials, std::uint64_t seed);

/// level,cube_id,center coords...,measure,parent_id
void write_csv(std::ostream& os, const DyadicSystem& system);

}  // namespace heis
