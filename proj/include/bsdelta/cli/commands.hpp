#pragma once

#include "bsdelta/cli/config.hpp"

#include <filesystem>

namespace bsdelta::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  exit_ok = 0,
  exit_other = 1,
  exit_config = 2,
  exit_nonconvergence = 3,
  exit_invariant = 4,
};

/**
 * Perturbation of randomized trial `trial`. "mixed": `intervals` random
 * intervals (boxes for dim 2) inside [-support, support], each with a value
 * drawn from [value_min, value_max], later ones painted over earlier ones.
 * "indicator": beta times the indicator of a union of `intervals` random
 * intervals (boxes).
 */
Coupling random_trial_coupling(const OptimizeConfig& cfg, const Grid& grid, double alpha0, std::uint64_t seed,
                               int trial);

struct TrialOutcome {
  int trial = 0;
  double alpha0 = 0.0;
  BoundStateReport original;
  BoundStateReport rearranged;
  bool included = false;      ///< both sides have a lambda1
  double slack = 0.0;         ///< lambda1_original - lambda1_rearranged when included
  bool violation = false;     ///< slack < -tol
};

/// One optimize-check trial: lambda1(alpha0 + alpha1) against lambda1(alpha0 + (alpha1)_+^*).
TrialOutcome run_trial(const ExperimentConfig& cfg, const Grid& grid, int trial);

/// Writes config.json (resolved tree + schema_version) into `out`, creating it.
void echo_config(const ExperimentConfig& cfg, const std::filesystem::path& out);

int cmd_mu_curve(const ExperimentConfig& cfg, const std::filesystem::path& out);
int cmd_lambda1(const ExperimentConfig& cfg, const std::filesystem::path& out);
int cmd_rearrange(const ExperimentConfig& cfg, const std::filesystem::path& out);
int cmd_optimize_check(const ExperimentConfig& cfg, const std::filesystem::path& out);
int cmd_oracle_compare(const ExperimentConfig& cfg, const std::filesystem::path& out);
int cmd_convergence(const ExperimentConfig& cfg, const std::filesystem::path& out);

/// Dispatches by subcommand name, echoes the config and maps exceptions to exit codes.
int run_command(const std::string& name, const ExperimentConfig& cfg, const std::filesystem::path& out);

}  // namespace bsdelta::cli
