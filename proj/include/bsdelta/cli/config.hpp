#pragma once

#include "bsdelta/bsp.hpp"
#include "bsdelta/eigensolver.hpp"
#include "bsdelta/oracle.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bsdelta::cli {

inline constexpr const char* kSchemaVersion = "bsdelta-config/1";
inline constexpr const char* kReportSchema = "bsdelta-report/1";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  int dim = 1;
  int n_per_axis = 1024;
  double half_extent = 40.0;
};

struct CouplingSpec {
  double alpha0 = 0.0;
  std::string kind = "constant";  ///< constant | ball | box | file
  double beta = 0.0;
  double radius = 1.0;
  std::array<double, 2> center{0.0, 0.0};
  std::string path;
};

struct SurfaceConfig {
  std::string kind = "hyperplane";  ///< hyperplane | graph
  std::string xi_path;
  double lipschitz_bound = 0.0;
};

struct OracleConfig {
  double half_extent_normal = 20.0;
  double h_normal = 0.05;
  int eigenpairs = 2;
};

struct MuCurveConfig {
  double lambda_min = -9.0;
  double lambda_max = -0.25;
  int samples = 50;
};

struct OptimizeConfig {
  int trials = 50;
  std::vector<double> alpha0{0.0, 1.0};
  std::string family = "mixed";  ///< mixed | indicator
  int intervals = 3;
  double support = 4.0;
  double value_min = -2.0;
  double value_max = 4.0;
  double beta = 4.0;
  double tol = 1e-6;
};

struct ConvergenceConfig {
  std::vector<std::pair<int, double>> points;
  std::optional<double> reference;
};

struct ExperimentConfig {
  GridSpec grid;
  CouplingSpec coupling;
  SurfaceConfig surface;
  SolverConfig solver;
  RootConfig root;
  OracleConfig oracle;
  MuCurveConfig mu_curve;
  OptimizeConfig optimize_check;
  ConvergenceConfig convergence;
  std::string rearrange_input;
  std::uint64_t seed = 42;

  /// Fully resolved tree, as echoed into the output directory.
  nlohmann::json resolved;
};

/// Default tree; every accepted key appears here.
nlohmann::json default_config();

/**
 * Resolves a config: defaults, then the file (if any), then each "a.b.c=value"
 * override in order, then the seed override. Values are parsed as JSON and
 * fall back to strings. Unknown keys and ill-typed values are ConfigErrors.
 */
ExperimentConfig load_config(const std::optional<std::filesystem::path>& file, const std::vector<std::string>& sets,
                             std::optional<std::uint64_t> seed);

ExperimentConfig parse_config(const nlohmann::json& tree);

Grid make_grid(const GridSpec& spec);
/// Coupling on `grid` from the spec; "file" reads a GridFunction with the perturbation.
Coupling make_coupling(const CouplingSpec& spec, const Grid& grid);
SurfaceSpec make_surface(const SurfaceConfig& spec, const Grid& grid);

}  // namespace bsdelta::cli
