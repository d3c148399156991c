#include "heis/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "heis/errors.hpp"
#include "heis/exponents.hpp"
#include "heis/operators.hpp"

namespace heis {

LocalizedLevels prepare_levels(const DyadicSystem& system, const SphereQuadrature& q, SupportRule rule, int k_lo,
                               int k_hi) {
  LocalizedLevels out;
  out.system = &system;
  out.quadrature = &q;
  out.rule = rule;
  out.k_lo = std::max(k_lo, system.k_min());
  int hi = std::min(k_hi, system.k_max());
  if (rule == SupportRule::center_ball) hi = std::min(hi, system.k_max() - 3);
  const double h = system.domain().spacing_z();
  while (hi >= out.k_lo && std::pow(system.delta(), hi + 2) < 2.0 * h) --hi;
  if (hi < out.k_lo) throw PreconditionError("no subcube levels available for localized means");
  out.k_hi = hi;
  for (int k = out.k_lo; k <= out.k_hi; ++k) out.admissible.push_back(admissible_cells(system, k, q, rule));
  return out;
}

namespace {

std::vector<CellIndex> select_cells(const LinearizationSets& lin, const DyadicSystem& system, CubeId q, bool b_set) {
  const Cube& c = system.cube(q);
  if (c.level < lin.k_lo || c.level > lin.k_hi) throw PreconditionError("cube level outside the window");
  std::vector<CellIndex> out;
  for (CellIndex cell : system.cells(q)) {
    auto it = std::lower_bound(lin.cells.begin(), lin.cells.end(), cell);
    if (it == lin.cells.end() || *it != cell) return {};  // Q not inside Q0
    const auto i = static_cast<std::size_t>(it - lin.cells.begin());
    if (b_set ? lin.b_level[i] == c.level : lin.in_e(i, c.level)) out.push_back(cell);
  }
  return out;
}

}  // namespace

std::vector<CellIndex> LinearizationSets::e_cells(const DyadicSystem& system, CubeId q) const {
  return select_cells(*this, system, q, false);
}

std::vector<CellIndex> LinearizationSets::b_cells(const DyadicSystem& system, CubeId q) const {
  return select_cells(*this, system, q, true);
}

LinearizationSets linearization_sets(const GridFunction& f, CubeId q0, const LocalizedLevels& levels) {
  const DyadicSystem& system = *levels.system;
  const Cube& root = system.cube(q0);
  if (root.level < levels.k_lo || root.level > levels.k_hi)
    throw PreconditionError("no subcube levels available below Q0");
  for (double v : f.values())
    if (v < 0.0) throw PreconditionError("linearization needs f >= 0");
  LinearizationSets lin;
  lin.root = q0;
  lin.k_lo = root.level;
  lin.k_hi = levels.k_hi;
  if (lin.k_hi - lin.k_lo >= 64) throw PreconditionError("too many levels");
  const auto cells = system.cells(q0);
  lin.cells.assign(cells.begin(), cells.end());
  for (int k = lin.k_lo; k <= lin.k_hi; ++k)
    lin.means.push_back(
        level_localized_mean(f, system, k, *levels.quadrature, levels.admissible[k - levels.k_lo]));

  const std::size_t m = lin.cells.size();
  lin.sup.assign(m, 0.0);
  lin.e_bits.assign(m, 0);
  lin.b_level.assign(m, lin.k_lo - 1);
  for (std::size_t i = 0; i < m; ++i) {
    const CellIndex c = lin.cells[i];
    double s = 0.0;
    for (const auto& g : lin.means) s = std::max(s, g[c]);
    lin.sup[i] = s;
    if (s <= 0.0) continue;
    for (int k = lin.k_lo; k <= lin.k_hi; ++k) {
      if (lin.means[k - lin.k_lo][c] >= 0.5 * s) {
        lin.e_bits[i] |= std::uint64_t{1} << (k - lin.k_lo);
        if (lin.b_level[i] < lin.k_lo) lin.b_level[i] = k;
      }
    }
  }
  return lin;
}

double maximal_pairing(const LinearizationSets& lin, const GridFunction& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < lin.cells.size(); ++i) s += lin.sup[i] * g[lin.cells[i]];
  return s * g.grid().cell_volume();
}

double linearized_sum(const LinearizationSets& lin, const GridFunction& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < lin.cells.size(); ++i) {
    if (!lin.in_b(i)) continue;
    const CellIndex c = lin.cells[i];
    s += lin.means[lin.b_level[i] - lin.k_lo][c] * g[c];
  }
  return s * g.grid().cell_volume();
}

double guaranteed_threshold(double p, double q) { return std::pow(4.0, std::max(1.0 / p, 1.0 / q)); }

std::vector<double> cube_averages(const DyadicSystem& system, const GridFunction& f, double p) {
  if (!f.grid().same_layout(system.domain())) throw PreconditionError("function and dyadic system use different grids");
  std::vector<double> out(system.cubes().size());
  for (const auto& c : system.cubes()) out[c.id] = cell_average(f, system.cells(c.id), p);
  return out;
}

std::vector<CubeId> stopping_children(const DyadicSystem& system, CubeId q0, const std::vector<double>& avg_f,
                                      const std::vector<double>& avg_g, double threshold) {
  const double bf = threshold * avg_f[q0], bg = threshold * avg_g[q0];
  std::vector<CubeId> out;
  std::vector<CubeId> stack(system.children(q0).begin(), system.children(q0).end());
  std::reverse(stack.begin(), stack.end());
  while (!stack.empty()) {
    const CubeId p = stack.back();
    stack.pop_back();
    if (avg_f[p] > bf || avg_g[p] > bg) {
      out.push_back(p);
      continue;
    }
    const auto ch = system.children(p);
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void require_nonnegative(const GridFunction& f, const char* name) {
  for (double v : f.values())
    if (!(v >= 0.0) || !std::isfinite(v)) throw PreconditionError(std::string(name) + " must be finite and >= 0");
}

void require_support(const DyadicSystem& system, const GridFunction& f, CubeId q0, const char* name) {
  const auto asg = system.assignment(system.cube(q0).level);
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] != 0.0 && asg[i] != q0) throw PreconditionError(std::string(name) + " is not supported in Q0");
}

}  // namespace

SparseCollection sparse_decompose(const GridFunction& f, const GridFunction& g, CubeId q0, double p, double q,
                                  const DyadicSystem& system, const SparseConfig& cfg) {
  if (p < 1.0 || q < 1.0) throw PreconditionError("averaging exponents must be >= 1");
  if (cfg.stop_threshold <= 1.0) throw PreconditionError("stopping threshold must exceed 1");
  require_nonnegative(f, "f");
  require_nonnegative(g, "g");
  require_support(system, f, q0, "f");
  require_support(system, g, q0, "g");
  const auto avg_f = cube_averages(system, f, p);
  const auto avg_g = cube_averages(system, g, cfg.g_uses_q ? q : p);

  std::vector<std::pair<CubeId, std::vector<CellIndex>>> emitted;
  std::vector<char> stopped(system.domain().cell_count(), 0);
  std::vector<CubeId> todo{q0};
  double eta = 1.0;
  while (!todo.empty()) {
    const CubeId node = todo.back();
    todo.pop_back();
    const auto kids = stopping_children(system, node, avg_f, avg_g, cfg.stop_threshold);
    for (CubeId k : kids)
      for (CellIndex c : system.cells(k)) stopped[c] = 1;
    std::vector<CellIndex> fs;
    for (CellIndex c : system.cells(node))
      if (!stopped[c]) fs.push_back(c);
    for (CubeId k : kids)
      for (CellIndex c : system.cells(k)) stopped[c] = 0;
    const double ratio = static_cast<double>(fs.size()) / static_cast<double>(system.cube(node).cell_count);
    if (2 * fs.size() < system.cube(node).cell_count)
      throw InvariantError("sparsity lost at cube " + std::to_string(node) + ": |F|/|Q| = " + std::to_string(ratio) +
                           "; raise the stopping threshold");
    eta = std::min(eta, ratio);
    emitted.emplace_back(node, std::move(fs));
    for (CubeId k : kids) todo.push_back(k);
  }
  std::sort(emitted.begin(), emitted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseCollection out;
  out.eta = eta;
  for (auto& [id, fs] : emitted) {
    out.cubes.push_back(id);
    out.f_sets.push_back(std::move(fs));
  }
  return out;
}

CollectionCheck check_collection(const DyadicSystem& system, const SparseCollection& s) {
  CollectionCheck out{true, true, 1.0};
  std::vector<char> used(system.domain().cell_count(), 0);
  for (std::size_t i = 0; i < s.cubes.size(); ++i) {
    const auto cells = system.cells(s.cubes[i]);
    for (CellIndex c : s.f_sets[i]) {
      if (!std::binary_search(cells.begin(), cells.end(), c)) out.subsets = false;
      if (used[c]) out.disjoint = false;
      used[c] = 1;
    }
    out.eta = std::min(out.eta, static_cast<double>(s.f_sets[i].size()) / static_cast<double>(cells.size()));
  }
  if (s.cubes.empty()) out.eta = 0.0;
  return out;
}

SparseFormResult sparse_form(const DyadicSystem& system, const SparseCollection& s, const GridFunction& f,
                             const GridFunction& g, double p, double q) {
  if (!(p > 1.0) || !(q > 1.0) || !std::isfinite(p) || !std::isfinite(q))
    throw PreconditionError("sparse form exponents must lie in (1, inf)");
  SparseFormResult out;
  const double dv = system.domain().cell_volume();
  for (std::size_t i = 0; i < s.cubes.size(); ++i) {
    const Cube& c = system.cube(s.cubes[i]);
    SparseTerm t;
    t.cube = c.id;
    t.level = c.level;
    t.measure = c.measure;
    t.f_measure = static_cast<double>(s.f_sets[i].size()) * dv;
    t.avg_f = cell_average(f, system.cells(c.id), p);
    t.avg_g = cell_average(g, system.cells(c.id), q);
    t.value = t.measure * t.avg_f * t.avg_g;
    out.value += t.value;
    out.terms.push_back(t);
  }
  return out;
}

DominationResult domination_ratio(const GridFunction& f, const GridFunction& g, CubeId q0, double p, double q,
                                  const LocalizedLevels& levels, const SparseConfig& cfg) {
  const DyadicSystem& system = *levels.system;
  const ExponentPair e{1.0 / p, 1.0 / q};
  e.validate();
  if (sparse_region(system.domain().dim().n, e) != Region::inside)
    throw PreconditionError("(1/p, 1/q) is not inside the sparse triangle");
  const auto lin = linearization_sets(f, q0, levels);
  DominationResult out;
  out.k_lo = lin.k_lo;
  out.k_hi = lin.k_hi;
  out.pairing = maximal_pairing(lin, g);
  out.linearized = linearized_sum(lin, g);
  out.collection = sparse_decompose(f, g, q0, p, q, system, cfg);
  out.form = sparse_form(system, out.collection, f, g, p, q).value;
  const LacunaryConfig lac{system.delta(), lin.k_lo + 2, lin.k_hi + 2};
  out.lacunary_pairing = pairing(lacunary_maximal(f, lac, *levels.quadrature), g);
  if (out.form == 0.0) {
    if (out.pairing != 0.0 || out.lacunary_pairing != 0.0)
      throw InvariantError("sparse form vanishes while the pairing does not");
  } else {
    out.ratio = out.pairing / out.form;
    out.lacunary_ratio = out.lacunary_pairing / out.form;
  }
  return out;
}

double carleson_sum_check(const DyadicSystem& system, const SparseCollection& s, const GridFunction& phi, double s_exp,
                          double t_exp, CubeId q0) {
  if (!(s_exp >= 1.0 && s_exp < t_exp && std::isfinite(t_exp))) throw PreconditionError("need 1 <= s < t < inf");
  const double denom = cell_average(phi, system.cells(q0), t_exp) * system.cube(q0).measure;
  if (denom == 0.0) throw PreconditionError("phi vanishes on Q0");
  double num = 0.0;
  for (CubeId id : s.cubes) num += cell_average(phi, system.cells(id), s_exp) * system.cube(id).measure;
  return num / denom;
}

void write_csv(std::ostream& os, const SparseFormResult& r) {
  os << "cube_id,level,measure,f_measure,avg_f,avg_g,term\n";
  os.precision(17);
  for (const auto& t : r.terms)
    os << t.cube << ',' << t.level << ',' << t.measure << ',' << t.f_measure << ',' << t.avg_f << ',' << t.avg_g << ','
       << t.value << '\n';
}

}  // namespace heis
