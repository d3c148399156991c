#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "heis/group.hpp"
#include "heis/quadrature.hpp"

namespace heis {

using CellIndex = std::uint32_t;

/// Uniform cell-centred grid on the Euclidean box
/// center + [-hz, hz]^{2n} x [-ht, ht] in the (x, y, t) coordinates of H^n.
/// Cells are laid out with axis 0 slowest and the t axis fastest.
class BoxGrid {
 public:
  BoxGrid(GroupDim dim, Point center, double half_width_z, double half_width_t,
          std::vector<int> resolution);

  /// Box centred at the identity with `res_z` cells on each z axis and
  /// `res_t` cells along t.
  static BoxGrid centered(GroupDim dim, double half_width_z, double half_width_t, int res_z,
                          int res_t);

  GroupDim dim() const { return dim_; }
  const Point& center() const { return center_; }
  double half_width_z() const { return half_width_z_; }
  double half_width_t() const { return half_width_t_; }
  int axes() const { return dim_.coords(); }
  int resolution(int axis) const { return res_[axis]; }
  const std::vector<int>& resolutions() const { return res_; }
  double spacing(int axis) const { return spacing_[axis]; }
  double lower(int axis) const { return lower_[axis]; }
  /// Largest spacing over the z axes.
  double spacing_z() const;
  double spacing_t() const { return spacing_[axes() - 1]; }
  std::size_t cell_count() const { return cells_; }
  double cell_volume() const { return cell_volume_; }
  double volume() const { return cell_volume_ * static_cast<double>(cells_); }
  /// Number of cells in one t-row (= resolution of the t axis).
  int row_length() const { return res_.back(); }
  std::size_t row_count() const { return cells_ / static_cast<std::size_t>(res_.back()); }

  double cell_coordinate(int axis, int i) const { return lower_[axis] + (i + 0.5) * spacing_[axis]; }
  Point cell_center(std::size_t index) const;
  void cell_center(std::size_t index, std::span<double> coords) const;
  std::vector<int> multi_index(std::size_t index) const;
  std::size_t linear_index(std::span<const int> multi) const;
  std::optional<std::size_t> locate(const Point& p) const;
  bool contains(const Point& p) const;

  bool same_layout(const BoxGrid& other) const;

 private:
  GroupDim dim_;
  Point center_;
  double half_width_z_;
  double half_width_t_;
  std::vector<int> res_;
  std::vector<double> spacing_;
  std::vector<double> lower_;
  std::vector<std::size_t> stride_;
  std::size_t cells_;
  double cell_volume_;
};

/// Samples on a BoxGrid, extended by zero outside the box.
class GridFunction {
 public:
  GridFunction(BoxGrid grid, std::vector<double> samples);
  explicit GridFunction(BoxGrid grid, double value = 0.0);

  const BoxGrid& grid() const { return grid_; }
  std::span<const double> values() const { return samples_; }
  std::span<double> values() { return samples_; }
  double operator[](std::size_t i) const { return samples_[i]; }
  double& operator[](std::size_t i) { return samples_[i]; }
  std::size_t size() const { return samples_.size(); }

 private:
  BoxGrid grid_;
  std::vector<double> samples_;
};

GridFunction sample(const BoxGrid& grid, const PointFunction& f);

/// Multilinear interpolation between cell centres with zero ghost cells
/// outside the box; exactly zero at points outside the box.
double interpolate(const GridFunction& f, const Point& p);

/// (sum |F|^p w dV)^{1/p}, or max |F| for p = inf. Throws for p < 1.
double lp_norm(const GridFunction& f, double p, const GridFunction* weight = nullptr);

/// <F>_{S,p} over a set of cells: (|S|^{-1} sum_{S} |F|^p dV)^{1/p}.
double cell_average(const GridFunction& f, std::span<const CellIndex> cells, double p);

/// sum_i F_i G_i dV
double pairing(const GridFunction& f, const GridFunction& g);

GridFunction pointwise_product(const GridFunction& f, const GridFunction& g);
GridFunction scaled(const GridFunction& f, double c);

struct TestFunctionParams {
  double scale = 1.0;      ///< gaussian z coefficient / bump or ball radius
  double t_scale = 1.0;    ///< gaussian t coefficient
  double exponent = 0.0;   ///< power weight exponent a in |x|^a
  int modes = 4;           ///< random_trig mode count
  std::uint64_t seed = 0;  ///< random_trig seed
  std::optional<Point> center;
};

/// Named test closures: "gaussian" exp(-a|z|^2 - b t^2), "koranyi_ball_indicator",
/// "smooth_bump" (C-infinity, support in the Koranyi ball of radius `scale`),
/// "random_trig" (seeded trigonometric sum under a Gaussian envelope),
/// "power_weight" |x|^a. Centred variants evaluate at center^{-1} x.
PointFunction make_test_function(GroupDim dim, std::string_view kind,
                                 const TestFunctionParams& params = {});

void write_binary(std::ostream& os, const GridFunction& f);
GridFunction read_binary(std::istream& is);
void write_csv(std::ostream& os, const GridFunction& f);

}  // namespace heis
