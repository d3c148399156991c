#include "heis/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <string>

#include "geom_detail.hpp"
#include "heis/errors.hpp"

namespace heis {

namespace {

// d_L diameter of the box: the largest distance between two of its corners.
double domain_diameter(const BoxGrid& g) {
  const int d = g.axes();
  const unsigned corners = 1u << d;
  std::vector<std::vector<double>> pts;
  for (unsigned c = 0; c < corners; ++c) {
    std::vector<double> x(d);
    for (int a = 0; a < d; ++a) x[a] = g.lower(a) + (((c >> a) & 1u) ? g.resolution(a) * g.spacing(a) : 0.0);
    pts.push_back(std::move(x));
  }
  double diam = 0.0;
  for (const auto& a : pts)
    for (const auto& b : pts) diam = std::max(diam, detail::dist_left_raw(g.dim().n, a.data(), b.data()));
  return diam;
}

// Largest d_L distance from a cell centre to the corners of its cell.
double cell_half_diameter(const BoxGrid& g, const double* x) {
  const int d = g.axes();
  double y[16];
  double best = 0.0;
  for (unsigned c = 0; c < (1u << d); ++c) {
    for (int a = 0; a < d; ++a) y[a] = x[a] + (((c >> a) & 1u) ? 0.5 : -0.5) * g.spacing(a);
    best = std::max(best, detail::dist_left_raw(g.dim().n, x, y));
  }
  return best;
}

}  // namespace

int DyadicSystem::slot(int k) const {
  if (!has_level(k)) throw PreconditionError("level " + std::to_string(k) + " not built");
  return k - opts_.k_min;
}

std::span<const CubeId> DyadicSystem::level_cubes(int k) const { return level_ids_[slot(k)]; }

std::span<const CubeId> DyadicSystem::children(CubeId id) const {
  return {child_list_.data() + child_offsets_[id], child_offsets_[id + 1] - child_offsets_[id]};
}

std::span<const CellIndex> DyadicSystem::cells(CubeId id) const {
  return {cell_list_.data() + cell_offsets_[id], cell_offsets_[id + 1] - cell_offsets_[id]};
}

CubeId DyadicSystem::cube_of_cell(CellIndex cell, int k) const { return assign_[slot(k)][cell]; }

std::span<const CubeId> DyadicSystem::assignment(int k) const { return assign_[slot(k)]; }

DyadicSystem build_system(const BoxGrid& domain, const DyadicOptions& opts) {
  if (!(opts.delta > 0.0 && opts.delta < 1.0)) throw PreconditionError("delta must lie in (0,1)");
  if (opts.k_min > opts.k_max) throw PreconditionError("empty level range");
  const double finest = std::pow(opts.delta, opts.k_max);
  if (finest < opts.min_spacing_factor * domain.spacing_z())
    throw PreconditionError("finest side delta^" + std::to_string(opts.k_max) + " = " + std::to_string(finest) +
                            " is below " + std::to_string(opts.min_spacing_factor) + " grid spacings");
  const double diam = domain_diameter(domain);
  if (std::pow(opts.delta, opts.k_min) > 2.0 * diam)
    throw PreconditionError("coarsest side exceeds the domain size");

  DyadicSystem sys(domain, opts);
  const BoxGrid& g = sys.domain_;
  const int n = g.dim().n;
  const int d = g.axes();
  const std::size_t ncell = g.cell_count();
  const int nlev = opts.k_max - opts.k_min + 1;

  std::vector<double> coords(ncell * d);
  for (std::size_t c = 0; c < ncell; ++c) g.cell_center(c, std::span<double>(&coords[c * d], d));
  auto at = [&](CellIndex c) { return &coords[static_cast<std::size_t>(c) * d]; };

  std::mt19937_64 rng(opts.seed);
  const std::size_t start = static_cast<std::size_t>(rng() % ncell);

  // Greedy nets, coarse to fine, carrying coarser centres down.
  std::vector<std::vector<CellIndex>> nets(nlev);
  std::vector<char> blocked(ncell);
  std::vector<CellIndex> current;
  for (int s = 0; s < nlev; ++s) {
    const double rho = std::pow(opts.delta, opts.k_min + s);
    std::fill(blocked.begin(), blocked.end(), 0);
    auto block = [&](CellIndex c) {
      detail::for_each_cell_near(g, at(c), rho, [&](std::size_t idx, const double* x) {
        if (detail::dist_left_raw(n, at(c), x) < rho) blocked[idx] = 1;
      });
      blocked[c] = 1;
    };
    for (CellIndex c : current) block(c);
    for (std::size_t j = 0; j < ncell; ++j) {
      const auto c = static_cast<CellIndex>((start + j) % ncell);
      if (blocked[c]) continue;
      current.push_back(c);
      block(c);
    }
    if (current.empty()) throw InvariantError("empty level in dyadic construction");
    nets[s] = current;
  }

  // Cubes, ids assigned level by level.
  sys.level_ids_.resize(nlev);
  for (int s = 0; s < nlev; ++s) {
    for (CellIndex c : nets[s]) {
      Cube q;
      q.id = static_cast<CubeId>(sys.cubes_.size());
      q.level = opts.k_min + s;
      q.center_cell = c;
      q.center = Point::from_coords(n, std::span<const double>(at(c), d));
      q.side = std::pow(opts.delta, q.level);
      sys.level_ids_[s].push_back(q.id);
      sys.cubes_.push_back(std::move(q));
    }
  }

  // Finest cells to the nearest finest centre; ties keep the lowest index.
  sys.assign_.assign(nlev, std::vector<CubeId>(ncell, kNoCube));
  {
    const int s = nlev - 1;
    const double rho = std::pow(opts.delta, opts.k_max);
    std::vector<double> best(ncell, std::numeric_limits<double>::infinity());
    auto& asg = sys.assign_[s];
    for (CubeId id : sys.level_ids_[s]) {
      const double* c = at(sys.cubes_[id].center_cell);
      detail::for_each_cell_near(g, c, rho, [&](std::size_t idx, const double* x) {
        const double dd = detail::dist_left_raw(n, c, x);
        if (dd < best[idx]) {
          best[idx] = dd;
          asg[idx] = id;
        }
      });
    }
    for (CubeId a : asg)
      if (a == kNoCube) throw InvariantError("net construction failure: a cell is not covered by the finest net");
  }

  // Parents: nearest coarser centre within 2 delta^k.
  for (int s = nlev - 1; s > 0; --s) {
    const double reach = 2.0 * std::pow(opts.delta, opts.k_min + s - 1);
    for (CubeId child : sys.level_ids_[s]) {
      const double* c = at(sys.cubes_[child].center_cell);
      double best = std::numeric_limits<double>::infinity();
      CubeId parent = kNoCube;
      for (CubeId cand : sys.level_ids_[s - 1]) {
        const double dd = detail::dist_left_raw(n, c, at(sys.cubes_[cand].center_cell));
        if (dd <= reach && dd < best) {
          best = dd;
          parent = cand;
        }
      }
      if (parent == kNoCube) throw InvariantError("no coarser centre within 2 delta^k of a centre");
      sys.cubes_[child].parent = parent;
    }
    const auto& fine = sys.assign_[s];
    auto& coarse = sys.assign_[s - 1];
    for (std::size_t c = 0; c < ncell; ++c) coarse[c] = sys.cubes_[fine[c]].parent;
  }

  // Cell lists (CSR) and children.
  const std::size_t ncube = sys.cubes_.size();
  std::vector<std::size_t> count(ncube, 0);
  for (int s = 0; s < nlev; ++s)
    for (CubeId a : sys.assign_[s]) ++count[a];
  sys.cell_offsets_.assign(ncube + 1, 0);
  for (std::size_t i = 0; i < ncube; ++i) sys.cell_offsets_[i + 1] = sys.cell_offsets_[i] + count[i];
  sys.cell_list_.resize(sys.cell_offsets_.back());
  std::vector<std::size_t> fill(sys.cell_offsets_.begin(), sys.cell_offsets_.end() - 1);
  for (int s = 0; s < nlev; ++s)
    for (std::size_t c = 0; c < ncell; ++c) sys.cell_list_[fill[sys.assign_[s][c]]++] = static_cast<CellIndex>(c);
  for (auto& q : sys.cubes_) {
    q.cell_count = count[q.id];
    q.measure = static_cast<double>(q.cell_count) * g.cell_volume();
  }
  std::vector<std::size_t> nchild(ncube, 0);
  for (const auto& q : sys.cubes_)
    if (q.parent != kNoCube) ++nchild[q.parent];
  sys.child_offsets_.assign(ncube + 1, 0);
  for (std::size_t i = 0; i < ncube; ++i) sys.child_offsets_[i + 1] = sys.child_offsets_[i] + nchild[i];
  sys.child_list_.resize(sys.child_offsets_.back());
  std::vector<std::size_t> cfill(sys.child_offsets_.begin(), sys.child_offsets_.end() - 1);
  for (const auto& q : sys.cubes_)
    if (q.parent != kNoCube) sys.child_list_[cfill[q.parent]++] = q.id;
  return sys;
}

const Cube& cube_of(const DyadicSystem& system, const Point& p, int k) {
  const auto cell = system.domain().locate(p);
  if (!cell) throw PreconditionError("point outside the dyadic domain");
  return system.cube(system.cube_of_cell(static_cast<CellIndex>(*cell), k));
}

bool cube_contains(const DyadicSystem& system, CubeId outer, CubeId inner) {
  const Cube& o = system.cube(outer);
  const Cube& i = system.cube(inner);
  if (i.level < o.level) return false;
  return system.cube_of_cell(i.center_cell, o.level) == outer;
}

SystemReport verify_system(const DyadicSystem& sys) {
  const BoxGrid& g = sys.domain();
  const int n = g.dim().n;
  const int d = g.axes();
  const std::size_t ncell = g.cell_count();
  SystemReport rep;
  rep.partition = rep.nesting = rep.centers_contained = rep.separated = true;
  rep.min_c_in = rep.min_c_in_slack = std::numeric_limits<double>::infinity();
  rep.max_c_out = rep.max_c_out_slack = 0.0;

  std::vector<double> coords(ncell * d);
  for (std::size_t c = 0; c < ncell; ++c) g.cell_center(c, std::span<double>(&coords[c * d], d));
  auto at = [&](std::size_t c) { return &coords[c * d]; };

  // Largest cell half diameter over the domain, for search margins.
  double s_max = 0.0;
  for (std::size_t c = 0; c < ncell; c += static_cast<std::size_t>(g.row_length()))
    s_max = std::max(s_max, cell_half_diameter(g, at(c)));

  for (int k = sys.k_min(); k <= sys.k_max(); ++k) {
    LevelReport lr;
    lr.level = k;
    const auto ids = sys.level_cubes(k);
    lr.cubes = ids.size();
    const double side = std::pow(sys.delta(), k);
    const auto asg = sys.assignment(k);

    std::size_t total = 0;
    for (CubeId a : asg)
      if (a == kNoCube || sys.cube(a).level != k) rep.partition = false;
    for (CubeId id : ids) total += sys.cube(id).cell_count;
    if (total != ncell) rep.partition = false;
    if (k < sys.k_max()) {
      const auto fine = sys.assignment(k + 1);
      for (std::size_t c = 0; c < ncell; ++c)
        if (sys.cube(fine[c]).parent != asg[c]) rep.nesting = false;
    }

    lr.min_c_in = lr.min_c_in_slack = std::numeric_limits<double>::infinity();
    lr.min_separation = std::numeric_limits<double>::infinity();
    for (CubeId id : ids) {
      const Cube& q = sys.cube(id);
      if (asg[q.center_cell] != id) rep.centers_contained = false;
      const double* z = at(q.center_cell);
      double out = 0.0, out_slack = 0.0;
      for (CellIndex c : sys.cells(id)) {
        const double dd = detail::dist_left_raw(n, z, at(c));
        if (dd > out) out = dd;
        if (dd > out_slack * side) out_slack = std::max(out_slack, (dd - cell_half_diameter(g, at(c))) / side);
      }
      lr.max_c_out = std::max(lr.max_c_out, out / side);
      lr.max_c_out_slack = std::max(lr.max_c_out_slack, out_slack);
      double in = std::numeric_limits<double>::infinity(), in_slack = in;
      detail::for_each_cell_near(g, z, out + 2.0 * s_max, [&](std::size_t c, const double* x) {
        if (asg[c] == id) return;
        const double dd = detail::dist_left_raw(n, z, x);
        if (dd < in) in = dd;
        if (dd < in_slack * side + s_max) in_slack = std::min(in_slack, (dd + cell_half_diameter(g, x)) / side);
      });
      lr.min_c_in = std::min(lr.min_c_in, in / side);
      lr.min_c_in_slack = std::min(lr.min_c_in_slack, in_slack);
    }
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        const double dd = detail::dist_left_raw(n, at(sys.cube(ids[i]).center_cell), at(sys.cube(ids[j]).center_cell));
        lr.min_separation = std::min(lr.min_separation, dd / side);
        if (dd < side - 2.0 * s_max) rep.separated = false;
      }
    rep.min_c_in = std::min(rep.min_c_in, lr.min_c_in);
    rep.max_c_out = std::max(rep.max_c_out, lr.max_c_out);
    rep.min_c_in_slack = std::min(rep.min_c_in_slack, lr.min_c_in_slack);
    rep.max_c_out_slack = std::max(rep.max_c_out_slack, lr.max_c_out_slack);
    rep.levels.push_back(lr);
  }
  return rep;
}

HitRate ball_hit_rate(const std::vector<DyadicSystem>& systems, int trials, std::uint64_t seed) {
  if (systems.empty()) throw PreconditionError("no dyadic systems given");
  const DyadicSystem& first = systems.front();
  for (const auto& s : systems)
    if (!s.domain().same_layout(first.domain()) || s.delta() != first.delta() || s.k_min() != first.k_min() ||
        s.k_max() != first.k_max())
      throw PreconditionError("systems must share domain, delta and levels");
  if (first.k_max() - first.k_min() < 1) throw PreconditionError("hit rate needs at least two levels");
  const BoxGrid& g = first.domain();
  const int n = g.dim().n;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_cell(0, g.cell_count() - 1);
  std::uniform_int_distribution<int> pick_level(first.k_min() + 1, first.k_max());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  HitRate hr;
  std::vector<double> x(g.axes());
  for (int t = 0; t < trials; ++t) {
    const auto cell = static_cast<CellIndex>(pick_cell(rng));
    const int k = pick_level(rng);
    const double lo = std::pow(first.delta(), k + 1), hi = std::pow(first.delta(), k);
    const double r = lo + (hi - lo) * (1.0 - unit(rng));
    g.cell_center(cell, x);
    bool hit = false;
    for (const auto& s : systems) {
      const CubeId q = s.cube_of_cell(cell, k - 1);
      const auto asg = s.assignment(k - 1);
      bool inside = true;
      detail::for_each_cell_near(g, x.data(), r, [&](std::size_t c, const double* y) {
        if (inside && asg[c] != q && detail::dist_left_raw(n, x.data(), y) < r) inside = false;
      });
      if (inside) {
        hit = true;
        break;
      }
    }
    ++hr.trials;
    if (hit) ++hr.hits;
  }
  return hr;
}

void write_csv(std::ostream& os, const DyadicSystem& system) {
  const int n = system.domain().dim().n;
  os << "level,cube_id";
  for (int j = 0; j < n; ++j) os << ",x" << j + 1;
  for (int j = 0; j < n; ++j) os << ",y" << j + 1;
  os << ",t,cells,measure,parent_id\n";
  os.precision(17);
  for (const auto& q : system.cubes()) {
    os << q.level << ',' << q.id;
    for (double c : q.center.coords()) os << ',' << c;
    os << ',' << q.cell_count << ',' << q.measure << ',';
    if (q.parent == kNoCube) os << -1;
    else os << q.parent;
    os << '\n';
  }
}

}  // namespace heis
