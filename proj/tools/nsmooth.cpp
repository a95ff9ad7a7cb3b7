#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nsmooth/cli/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"nsmooth: Clarke gradients, Riemannian smoothing and fibration checks"};
  app.require_subcommand(1, 1);
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  for (const char* name : {"probe", "scan", "smooth", "fibrate", "reeb", "selftest"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "configuration file (JSON)")->required();
    sub->add_option("--out", out, "output directory for report.json and grid.csv");
    sub->add_option("--seed", seed, "override the configuration seed");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return e.get_exit_code() == 0 ? app.exit(e) : (app.exit(e), 1);
  }
  nsmooth::cli::RunOptions opts;
  opts.subcommand = app.get_subcommands().front()->get_name();
  opts.config_path = config;
  opts.out_dir = out;
  opts.seed = seed;
  return nsmooth::cli::run(opts, std::cerr);
}
