#include "bsdelta/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace bsdelta::cli;
  CLI::App app{"Bound states of delta interactions on hyperplanes: Birman-Schwinger solver and checks"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path;
  std::string out_dir = "out";
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--set", sets, "override a config value, dotted key: --set grid.n_per_axis=2048")->allow_extra_args(false);
  app.add_option("--seed", seed, "seed for randomized trials");

  const char* names[] = {"mu-curve", "lambda1", "rearrange", "optimize-check", "oracle-compare", "convergence"};
  const char* help[] = {"sample lambda -> mu(lambda) into mu_curve.csv",
                        "locate lambda1 and write report.json",
                        "symmetric decreasing rearrangement of a grid function file",
                        "randomized check of the rearrangement inequality for lambda1",
                        "compare lambda1 with the finite-difference oracle",
                        "lambda1 over a list of (N, L) grids"};
  for (int i = 0; i < 6; ++i) app.add_subcommand(names[i], help[i]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path ? std::optional<std::filesystem::path>(*config_path) : std::nullopt, sets, seed);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return exit_config;
  }
  return run_command(app.get_subcommands().front()->get_name(), cfg, out_dir);
}
