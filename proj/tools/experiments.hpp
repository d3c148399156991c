#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace heis::cli {

/// Unset fields take per-command defaults; the report records resolved values.
struct Config {
  std::optional<int> n;
  std::optional<int> grid;        ///< cells per z axis
  std::optional<int> grid_t;      ///< cells along t (defaults to grid)
  std::optional<double> half_width;
  std::optional<double> half_width_t;
  std::optional<double> delta;
  std::optional<int> kmin;
  std::optional<int> kmax;
  std::optional<double> p;
  std::optional<double> q;
  std::optional<double> p0;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<double> spacing_factor;
  std::string out;
  std::map<std::string, double> tol;
};

/// Fields present in `j` override unset fields of `cfg`.
void merge_json(Config& cfg, const nlohmann::json& j);

struct Metric {
  std::string name;
  nlohmann::json value;
  std::string paper_anchor;
  std::optional<std::string> op;  ///< "<=", ">=", "==" when the metric is a criterion
  std::optional<double> bound;
  std::optional<bool> pass;
};

struct Table {
  std::string name;
  std::string csv;
};

struct Report {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::vector<Metric> metrics;
  std::vector<Table> tables;

  bool passed() const;
  /// Adds an informational metric.
  void add(std::string name, nlohmann::json value, std::string anchor);
  /// Adds a criterion and returns its outcome; NaN never passes.
  bool check(std::string name, double value, std::string op, double bound, std::string anchor);
  void check_flag(std::string name, bool ok, std::string anchor);
  const Metric* find(const std::string& name) const;
};

inline constexpr int kSchemaVersion = 1;

const std::vector<std::string>& command_names();

/// Throws PreconditionError for unknown commands or invalid configs,
/// InvariantError when a hard invariant breaks mid-run.
Report run(const std::string& command, const Config& cfg);

nlohmann::json to_json(const Report& r);

/// <out>/<command>.json plus <out>/<command>.<table>.csv. Throws IoError.
void write_report(const Report& r, const std::string& out_dir);

}  // namespace heis::cli
