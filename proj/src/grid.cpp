#include "heis/grid.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include "heis/errors.hpp"

namespace heis {

BoxGrid::BoxGrid(GroupDim dim, Point center, double half_width_z, double half_width_t,
                 std::vector<int> resolution)
    : dim_(dim),
      center_(std::move(center)),
      half_width_z_(half_width_z),
      half_width_t_(half_width_t),
      res_(std::move(resolution)) {
  const int d = dim_.coords();
  if (center_.n() != dim_.n) throw PreconditionError("grid centre has the wrong dimension");
  if (static_cast<int>(res_.size()) != d) throw PreconditionError("need one resolution per axis");
  if (!(half_width_z_ > 0.0) || !(half_width_t_ > 0.0))
    throw PreconditionError("grid half widths must be positive");
  spacing_.resize(d);
  lower_.resize(d);
  stride_.resize(d);
  cells_ = 1;
  cell_volume_ = 1.0;
  for (int a = d - 1; a >= 0; --a) {
    if (res_[a] < 2) throw PreconditionError("grid resolution must be >= 2 on every axis");
    const double hw = a == d - 1 ? half_width_t_ : half_width_z_;
    spacing_[a] = 2.0 * hw / res_[a];
    lower_[a] = center_.coords()[a] - hw;
    stride_[a] = cells_;
    cells_ *= static_cast<std::size_t>(res_[a]);
    cell_volume_ *= spacing_[a];
  }
  if (cells_ > std::numeric_limits<CellIndex>::max())
    throw PreconditionError("grid has too many cells for 32-bit cell indices");
}

BoxGrid BoxGrid::centered(GroupDim dim, double half_width_z, double half_width_t, int res_z,
                          int res_t) {
  std::vector<int> res(dim.coords(), res_z);
  res.back() = res_t;
  return BoxGrid(dim, Point(dim.n), half_width_z, half_width_t, std::move(res));
}

double BoxGrid::spacing_z() const {
  return *std::max_element(spacing_.begin(), spacing_.end() - 1);
}

void BoxGrid::cell_center(std::size_t index, std::span<double> coords) const {
  const int d = axes();
  for (int a = 0; a < d; ++a) {
    const int i = static_cast<int>((index / stride_[a]) % res_[a]);
    coords[a] = cell_coordinate(a, i);
  }
}

Point BoxGrid::cell_center(std::size_t index) const {
  Point p(dim_.n);
  cell_center(index, p.coords());
  return p;
}

std::vector<int> BoxGrid::multi_index(std::size_t index) const {
  std::vector<int> m(axes());
  for (int a = 0; a < axes(); ++a) m[a] = static_cast<int>((index / stride_[a]) % res_[a]);
  return m;
}

std::size_t BoxGrid::linear_index(std::span<const int> multi) const {
  std::size_t idx = 0;
  for (int a = 0; a < axes(); ++a) idx += static_cast<std::size_t>(multi[a]) * stride_[a];
  return idx;
}

std::optional<std::size_t> BoxGrid::locate(const Point& p) const {
  if (p.n() != dim_.n) throw PreconditionError("point dimension does not match grid");
  std::size_t idx = 0;
  for (int a = 0; a < axes(); ++a) {
    const double u = (p.coords()[a] - lower_[a]) / spacing_[a];
    if (!(u >= 0.0) || u > res_[a]) return std::nullopt;
    const int i = std::min(static_cast<int>(u), res_[a] - 1);
    idx += static_cast<std::size_t>(i) * stride_[a];
  }
  return idx;
}

bool BoxGrid::contains(const Point& p) const { return locate(p).has_value(); }

bool BoxGrid::same_layout(const BoxGrid& other) const {
  return dim_.n == other.dim_.n && res_ == other.res_ && center_ == other.center_ &&
         half_width_z_ == other.half_width_z_ && half_width_t_ == other.half_width_t_;
}

GridFunction::GridFunction(BoxGrid grid, std::vector<double> samples)
    : grid_(std::move(grid)), samples_(std::move(samples)) {
  if (samples_.size() != grid_.cell_count())
    throw PreconditionError("sample count does not match grid");
  for (double v : samples_)
    if (!std::isfinite(v)) throw PreconditionError("grid function samples must be finite");
}

GridFunction::GridFunction(BoxGrid grid, double value)
    : grid_(std::move(grid)), samples_(grid_.cell_count(), value) {}

GridFunction sample(const BoxGrid& grid, const PointFunction& f) {
  std::vector<double> v(grid.cell_count());
  Point p(grid.dim().n);
  for (std::size_t i = 0; i < v.size(); ++i) {
    grid.cell_center(i, p.coords());
    v[i] = f(p);
    if (!std::isfinite(v[i]))
      throw PreconditionError("non-finite sample at cell " + std::to_string(i));
  }
  return GridFunction(grid, std::move(v));
}

double interpolate(const GridFunction& f, const Point& p) {
  const BoxGrid& g = f.grid();
  const int d = g.axes();
  std::array<int, 16> base{};
  std::array<double, 16> frac{};
  std::array<std::size_t, 16> stride{};
  std::size_t s = 1;
  for (int a = d - 1; a >= 0; --a) {
    stride[a] = s;
    s *= static_cast<std::size_t>(g.resolution(a));
  }
  for (int a = 0; a < d; ++a) {
    const double pos = (p.coords()[a] - g.lower(a)) / g.spacing(a);
    if (!(pos >= 0.0) || pos > g.resolution(a)) return 0.0;
    const double u = pos - 0.5;
    double fl = std::floor(u);
    double fr = u - fl;
    // Snap so that cell centres reproduce samples exactly.
    if (fr < 1e-12) {
      fr = 0.0;
    } else if (fr > 1.0 - 1e-12) {
      fl += 1.0;
      fr = 0.0;
    }
    base[a] = static_cast<int>(fl);
    frac[a] = fr;
  }
  double acc = 0.0;
  const unsigned corners = 1u << d;
  for (unsigned c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t idx = 0;
    bool valid = true;
    for (int a = 0; a < d && valid; ++a) {
      const int bit = (c >> a) & 1u;
      const int i = base[a] + bit;
      w *= bit ? frac[a] : 1.0 - frac[a];
      valid = i >= 0 && i < g.resolution(a);
      idx += static_cast<std::size_t>(i) * stride[a];
    }
    if (valid && w != 0.0) acc += w * f[idx];
  }
  return acc;
}

double lp_norm(const GridFunction& f, double p, const GridFunction* weight) {
  if (!(p >= 1.0)) throw PreconditionError("L^p norm needs p >= 1");
  if (weight && !weight->grid().same_layout(f.grid()))
    throw PreconditionError("weight lives on a different grid");
  const auto v = f.values();
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!weight || (*weight)[i] > 0.0) m = std::max(m, std::abs(v[i]));
    return m;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double w = weight ? (*weight)[i] : 1.0;
    if (weight && !(w >= 0.0)) throw PreconditionError("weights must be nonnegative");
    s += std::pow(std::abs(v[i]), p) * w;
  }
  return std::pow(s * f.grid().cell_volume(), 1.0 / p);
}

double cell_average(const GridFunction& f, std::span<const CellIndex> cells, double p) {
  if (cells.empty()) throw PreconditionError("average over an empty cube");
  if (!(p >= 1.0)) throw PreconditionError("average exponent must be >= 1");
  double s = 0.0;
  if (p == 1.0) {
    for (CellIndex c : cells) s += std::abs(f[c]);
    return s / static_cast<double>(cells.size());
  }
  for (CellIndex c : cells) s += std::pow(std::abs(f[c]), p);
  return std::pow(s / static_cast<double>(cells.size()), 1.0 / p);
}

double pairing(const GridFunction& f, const GridFunction& g) {
  if (!f.grid().same_layout(g.grid())) throw PreconditionError("pairing across different grids");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return s * f.grid().cell_volume();
}

GridFunction pointwise_product(const GridFunction& f, const GridFunction& g) {
  if (!f.grid().same_layout(g.grid())) throw PreconditionError("product across different grids");
  GridFunction out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] * g[i];
  return out;
}

GridFunction scaled(const GridFunction& f, double c) {
  GridFunction out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = c * f[i];
  return out;
}

namespace {

Point relative(const std::optional<Point>& center, const Point& x) {
  return center ? multiply(inverse(*center), x) : x;
}

double bump_profile(double s) {
  if (s >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

}  // namespace

PointFunction make_test_function(GroupDim dim, std::string_view kind,
                                 const TestFunctionParams& params) {
  const auto c = params.center;
  if (c && c->n() != dim.n) throw PreconditionError("test function centre has wrong dimension");
  if (kind == "gaussian") {
    const double a = params.scale, b = params.t_scale;
    return [=](const Point& x) {
      const Point y = relative(c, x);
      return std::exp(-a * y.z_norm_sq() - b * y.t() * y.t());
    };
  }
  if (kind == "koranyi_ball_indicator") {
    const double r = params.scale;
    return [=](const Point& x) { return koranyi_norm(relative(c, x)) < r ? 1.0 : 0.0; };
  }
  if (kind == "smooth_bump") {
    const double r = params.scale;
    return [=](const Point& x) { return bump_profile(koranyi_norm(relative(c, x)) / r); };
  }
  if (kind == "power_weight") {
    const double a = params.exponent;
    return [=](const Point& x) { return std::pow(koranyi_norm(relative(c, x)), a); };
  }
  if (kind == "random_trig") {
    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> freq(-3.0, 3.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> amp(0.5, 1.0);
    const int d = dim.coords();
    std::vector<double> k(static_cast<std::size_t>(params.modes) * d);
    std::vector<double> ph(params.modes), am(params.modes);
    for (int m = 0; m < params.modes; ++m) {
      for (int a = 0; a < d; ++a) k[m * d + a] = freq(rng);
      ph[m] = phase(rng);
      am[m] = amp(rng);
    }
    const double s = params.scale;
    return [=](const Point& x) {
      const Point y = relative(c, x);
      double v = 0.0;
      for (int m = 0; m < params.modes; ++m) {
        double arg = ph[m];
        for (int a = 0; a < d; ++a) arg += k[m * d + a] * y.coords()[a];
        v += am[m] * std::cos(arg);
      }
      const double r = koranyi_norm(y) / s;
      return v * std::exp(-r * r * r * r);
    };
  }
  throw PreconditionError("unknown test function kind '" + std::string(kind) + "'");
}

namespace {

constexpr char kMagic[8] = {'H', 'E', 'I', 'S', 'G', 'R', 'I', 'D'};
constexpr std::uint32_t kFormatVersion = 1;

template <class T>
void put_le(std::ostream& os, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
    throw IoError("truncated grid function stream");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

// Layout (little-endian): magic[8], u32 version, u32 n, u32 resolution[2n+1],
// f64 centre[2n+1], f64 half_width_z, f64 half_width_t, u64 count, f64 samples[count].
void write_binary(std::ostream& os, const GridFunction& f) {
  const BoxGrid& g = f.grid();
  os.write(kMagic, sizeof kMagic);
  put_le<std::uint32_t>(os, kFormatVersion);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim().n));
  for (int r : g.resolutions()) put_le<std::uint32_t>(os, static_cast<std::uint32_t>(r));
  for (double c : g.center().coords()) put_le<double>(os, c);
  put_le<double>(os, g.half_width_z());
  put_le<double>(os, g.half_width_t());
  put_le<std::uint64_t>(os, f.size());
  for (double v : f.values()) put_le<double>(os, v);
  if (!os) throw IoError("failed writing grid function");
}

GridFunction read_binary(std::istream& is) {
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw IoError("not a grid function stream (bad magic)");
  if (get_le<std::uint32_t>(is) != kFormatVersion) throw IoError("unsupported grid format version");
  const int n = static_cast<int>(get_le<std::uint32_t>(is));
  if (n < 1 || n > 7) throw IoError("implausible dimension in grid header");
  std::vector<int> res(2 * n + 1);
  for (int& r : res) r = static_cast<int>(get_le<std::uint32_t>(is));
  std::vector<double> center(2 * n + 1);
  for (double& c : center) c = get_le<double>(is);
  const double hz = get_le<double>(is);
  const double ht = get_le<double>(is);
  BoxGrid grid(GroupDim{n}, Point::from_coords(n, center), hz, ht, res);
  const auto count = get_le<std::uint64_t>(is);
  if (count != grid.cell_count()) throw IoError("sample count does not match grid header");
  std::vector<double> v(count);
  for (double& x : v) x = get_le<double>(is);
  return GridFunction(std::move(grid), std::move(v));
}

void write_csv(std::ostream& os, const GridFunction& f) {
  const int n = f.grid().dim().n;
  for (int j = 0; j < n; ++j) os << 'x' << j + 1 << ',';
  for (int j = 0; j < n; ++j) os << 'y' << j + 1 << ',';
  os << "t,value\n";
  os.precision(17);
  std::vector<double> c(f.grid().axes());
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.grid().cell_center(i, c);
    for (double x : c) os << x << ',';
    os << f[i] << '\n';
  }
}

}  // namespace heis
