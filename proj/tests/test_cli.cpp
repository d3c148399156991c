#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "experiments.hpp"
#include "heis/errors.hpp"

using namespace heis;
using heis::cli::Config;

namespace {

std::size_t csv_rows(const std::string& csv) {
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  return lines - 1;  // header
}

const cli::Table& table(const cli::Report& r, const std::string& name) {
  for (const auto& t : r.tables)
    if (t.name == name) return t;
  FAIL("missing table " << name);
  throw 0;
}

double metric(const cli::Report& r, const std::string& name) {
  const auto* m = r.find(name);
  REQUIRE(m != nullptr);
  return m->value.get<double>();
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(HEIS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("empty report is valid JSON") {
  cli::Report r;
  r.command = "none";
  const auto j = cli::to_json(r);
  CHECK(j["metrics"].is_array());
  CHECK(j["metrics"].empty());
  CHECK(j["pass"] == true);
  CHECK(j["schema_version"] == cli::kSchemaVersion);
  CHECK(nlohmann::json::parse(j.dump()) == j);
}

TEST_CASE("criteria bookkeeping") {
  cli::Report r;
  CHECK(r.check("a", 1.0, "<=", 2.0, "x"));
  CHECK_FALSE(r.check("b", NAN, "<=", 2.0, "x"));
  CHECK_FALSE(r.passed());
  const auto j = cli::to_json(r);
  CHECK(j["criteria"]["a"] == true);
  CHECK(j["criteria"]["b"] == false);
  CHECK(j["metrics"][1]["value"].is_null());
  CHECK_THROWS_AS(r.check("c", 1.0, "<", 2.0, "x"), PreconditionError);
}

TEST_CASE("fast commands: anchors, row counts, determinism") {
  const char* fast[] = {"verify-group", "verify-quadrature", "verify-gamma", "verify-representation",
                        "spectral-rk", "weights", "build-grid", "verify-grid"};
  Config cfg;
  cfg.samples = std::nullopt;
  for (const char* name : fast) {
    Config c = cfg;
    if (std::string(name) == "verify-group") c.samples = 2000;
    const auto r = cli::run(name, c);
    CHECK_MESSAGE(r.passed(), name);
    for (const auto& m : r.metrics) CHECK_MESSAGE(!m.paper_anchor.empty(), name << ": " << m.name);
    const auto again = cli::run(name, c);
    CHECK(cli::to_json(r).dump() == cli::to_json(again).dump());
    if (std::string(name) == "verify-gamma")
      for (const char* q : {"Q4", "Q6", "Q8"}) CHECK(csv_rows(table(r, q).csv) == metric(r, "gamma_points"));
    if (std::string(name) == "verify-quadrature") CHECK(csv_rows(table(r, "mass").csv) == metric(r, "mass_dims"));
    if (std::string(name) == "verify-representation")
      CHECK(csv_rows(table(r, "profiles").csv) == metric(r, "profiles"));
    if (std::string(name) == "spectral-rk") CHECK(csv_rows(table(r, "rk").csv) == metric(r, "rk_rows"));
    if (std::string(name) == "weights") {
      CHECK(csv_rows(table(r, "regions").csv) == metric(r, "region_rows"));
      CHECK(csv_rows(table(r, "power_weights").csv) == metric(r, "power_weight_rows"));
    }
    if (std::string(name) == "verify-grid") CHECK(csv_rows(table(r, "levels").csv) == metric(r, "levels"));
    if (std::string(name) == "build-grid") CHECK(csv_rows(table(r, "cubes").csv) == metric(r, "cubes"));
  }
}

TEST_CASE("refusals are preconditions") {
  Config c;
  c.p = 2.0;
  c.q = 2.0;
  CHECK_THROWS_AS(cli::run("sparse-dominate", c), PreconditionError);
  Config lp;
  lp.p = 1.0 / 0.9;
  lp.q = 1.0 / 0.05;
  CHECK_THROWS_AS(cli::run("lp-improving", lp), PreconditionError);
  CHECK_THROWS_AS(cli::run("no-such-command", Config{}), PreconditionError);
  Config bad;
  bad.n = 0;
  CHECK_THROWS_AS(cli::run("verify-representation", bad), PreconditionError);
}

TEST_CASE("config file merging keeps flags") {
  Config c;
  c.n = 3;
  c.tol["group"] = 1e-9;
  cli::merge_json(c, nlohmann::json::parse(R"({"n": 1, "samples": 7, "tol": {"group": 1.0, "other": 2.0}})"));
  CHECK(*c.n == 3);
  CHECK(*c.samples == 7);
  CHECK(c.tol["group"] == 1e-9);
  CHECK(c.tol["other"] == 2.0);
  CHECK_THROWS_AS(cli::merge_json(c, nlohmann::json::array()), PreconditionError);
}

TEST_CASE("report files") {
  Config c;
  c.samples = 100;
  const auto r = cli::run("verify-group", c);
  const auto dir = std::filesystem::temp_directory_path() / "heis_cli_test";
  std::filesystem::remove_all(dir);
  cli::write_report(r, dir.string());
  std::ifstream is(dir / "verify-group.json");
  const auto j = nlohmann::json::parse(is);
  CHECK(j["command"] == "verify-group");
  CHECK(j["config"]["samples"] == 100);
  for (const auto& m : j["metrics"]) CHECK(m.contains("paper_anchor"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("binary exit codes") {
  CHECK(run_binary("verify-gamma") == 0);
  CHECK(run_binary("sparse-dominate --p 2 --q 2") == 2);
  CHECK(run_binary("verify-gamma --tol fhat=1e-300") == 3);
  CHECK(run_binary("verify-gamma --out /proc/heis-denied") == 4);
  CHECK(run_binary("verify-group --tol nonsense") == 2);
}
