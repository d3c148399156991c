#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "experiments.hpp"
#include "heis/errors.hpp"

namespace {

enum Exit { kPass = 0, kFail = 1, kPrecondition = 2, kInvariant = 3, kIo = 4 };

}  // namespace

int main(int argc, char** argv) {
  using heis::cli::Config;
  CLI::App app{"Heisenberg-group spherical means: desk-scale experiments"};
  app.require_subcommand(1);
  Config cfg;
  std::string config_file;
  std::vector<std::string> tols;
  int threads = 0;

  for (const auto& name : heis::cli::command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--n", cfg.n, "complex dimension");
    sub->add_option("--grid", cfg.grid, "cells per z axis");
    sub->add_option("--grid-t", cfg.grid_t, "cells along t");
    sub->add_option("--half-width", cfg.half_width, "box half width in z");
    sub->add_option("--half-width-t", cfg.half_width_t, "box half width in t");
    sub->add_option("--delta", cfg.delta, "dyadic ratio");
    sub->add_option("--kmin", cfg.kmin);
    sub->add_option("--kmax", cfg.kmax);
    sub->add_option("--p", cfg.p);
    sub->add_option("--q", cfg.q);
    sub->add_option("--p0", cfg.p0);
    sub->add_option("--seed", cfg.seed);
    sub->add_option("--samples", cfg.samples, "sample / pair count");
    sub->add_option("--spacing-factor", cfg.spacing_factor, "finest cube side in z spacings");
    sub->add_option("--out", cfg.out, "output directory (JSON to stdout when omitted)");
    sub->add_option("--tol", tols, "name=value overrides")->take_all();
    sub->add_option("--config", config_file, "JSON config; flags take precedence");
    sub->add_option("--threads", threads, "worker threads (HEIS_THREADS)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kPrecondition;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    for (const auto& t : tols) {
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw heis::PreconditionError("--tol expects name=value, got '" + t + "'");
      cfg.tol[t.substr(0, eq)] = std::stod(t.substr(eq + 1));
    }
    if (!config_file.empty()) {
      std::ifstream is(config_file);
      if (!is) throw heis::IoError("cannot read " + config_file);
      nlohmann::json j;
      try {
        is >> j;
      } catch (const nlohmann::json::exception& e) {
        throw heis::PreconditionError(std::string("bad config file: ") + e.what());
      }
      heis::cli::merge_json(cfg, j);
    }
    if (threads == 0)
      if (const char* env = std::getenv("HEIS_THREADS")) threads = std::atoi(env);
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif
    const auto report = heis::cli::run(command, cfg);
    if (cfg.out.empty()) std::cout << heis::cli::to_json(report).dump(2) << '\n';
    else heis::cli::write_report(report, cfg.out);
    if (!report.passed()) {
      std::cerr << command << ": criteria failed\n";
      return kInvariant;
    }
    return kPass;
  } catch (const heis::PreconditionError& e) {
    std::cerr << command << ": refused: " << e.what() << '\n';
    return kPrecondition;
  } catch (const heis::InvariantError& e) {
    std::cerr << command << ": invariant failure: " << e.what() << '\n';
    return kInvariant;
  } catch (const heis::IoError& e) {
    std::cerr << command << ": " << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << command << ": refused: " << e.what() << '\n';
    return kPrecondition;
  } catch (const std::exception& e) {
    std::cerr << command << ": " << e.what() << '\n';
    return kFail;
  }
}
