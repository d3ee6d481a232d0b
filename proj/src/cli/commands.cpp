#include "bsdelta/cli/commands.hpp"

#include "bsdelta/io.hpp"
#include "bsdelta/rearrange.hpp"

#include <cmath>
#include <iostream>
#include <random>

namespace bsdelta::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json solver_json(const SolverConfig& s) {
  return {{"tol", s.tol},
          {"max_iter", s.max_iter},
          {"force_dense", s.force_dense},
          {"seed", s.seed},
          {"dense_max_size", s.dense_max_size}};
}

json grid_json(const Grid& g) {
  return {{"dim", g.dim()}, {"n_per_axis", g.n_per_axis()}, {"half_extent", g.half_extent()}};
}

json report_json(const BoundStateReport& r) {
  json curve = json::array();
  for (const auto& [l, m] : r.mu_curve) curve.push_back({l, m});
  return {{"lambda1", optional_json(r.lambda1)},
          {"threshold", r.threshold},
          {"status", to_string(r.status)},
          {"mu_curve", curve},
          {"bracket", {r.bracket.first, r.bracket.second}},
          {"root_iterations", r.root_iterations},
          {"mu_at_lambda1", optional_json(r.mu_at_lambda1)},
          {"second_eigenvalue", optional_json(r.second_eigenvalue)}};
}

void save_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string optional_cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::mt19937_64 trial_rng(std::uint64_t seed, int trial) {
  std::seed_seq seq{std::uint32_t(seed & 0xffffffffu), std::uint32_t(seed >> 32), std::uint32_t(trial)};
  return std::mt19937_64(seq);
}

// Closed-form lambda1 for constant couplings: -alpha0^2/4 when alpha0 > 0.
std::optional<double> closed_form_lambda1(const CouplingSpec& c) {
  const bool constant = c.kind == "constant" || ((c.kind == "ball" || c.kind == "box") && c.beta == 0.0);
  if (constant && c.alpha0 > 0.0) return -c.alpha0 * c.alpha0 / 4.0;
  return std::nullopt;
}

}  // namespace

Coupling random_trial_coupling(const OptimizeConfig& cfg, const Grid& grid, double alpha0, std::uint64_t seed,
                               int trial) {
  if (!(cfg.support < grid.half_extent())) throw ConfigError("config: optimize_check.support must be below half_extent");
  auto rng = trial_rng(seed, trial);
  std::uniform_real_distribution<double> pos(-cfg.support, cfg.support);
  std::uniform_real_distribution<double> val(cfg.value_min, cfg.value_max);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(grid.cell_count());
  for (int i = 0; i < cfg.intervals; ++i) {
    std::array<double, 2> lo{0.0, 0.0}, hi{0.0, 0.0};
    for (int axis = 0; axis < grid.dim(); ++axis) {
      const double p = pos(rng), q = pos(rng);
      lo[axis] = std::min(p, q);
      hi[axis] = std::max(p, q);
    }
    const double value = cfg.family == "mixed" ? val(rng) : cfg.beta;
    for (Index c = 0; c < grid.cell_count(); ++c) {
      const auto x = grid.position(c);
      bool inside = true;
      for (int axis = 0; axis < grid.dim(); ++axis) inside = inside && x[axis] >= lo[axis] && x[axis] < hi[axis];
      if (inside) a[c] = value;
    }
  }
  return coupling_from_samples(alpha0, RealGridFunction(grid, std::move(a)));
}

TrialOutcome run_trial(const ExperimentConfig& cfg, const Grid& grid, int trial) {
  const auto& oc = cfg.optimize_check;
  TrialOutcome t;
  t.trial = trial;
  t.alpha0 = oc.alpha0[std::size_t(trial) % oc.alpha0.size()];
  const Coupling original = random_trial_coupling(oc, grid, t.alpha0, cfg.seed, trial);
  const Coupling rearranged = rearranged_positive_part(original, RankedCells(grid));
  t.original = find_lambda1(original, cfg.solver, cfg.root);
  t.rearranged = find_lambda1(rearranged, cfg.solver, cfg.root);
  t.included = t.original.lambda1.has_value() && t.rearranged.lambda1.has_value();
  if (t.included) {
    t.slack = *t.original.lambda1 - *t.rearranged.lambda1;
    t.violation = t.slack < -oc.tol;
  }
  return t;
}

void echo_config(const ExperimentConfig& cfg, const fs::path& out) {
  fs::create_directories(out);
  json j = cfg.resolved;
  j["schema_version"] = kSchemaVersion;
  save_json(out / "config.json", j);
}

int cmd_mu_curve(const ExperimentConfig& cfg, const fs::path& out) {
  const auto& m = cfg.mu_curve;
  if (!(m.lambda_max < 0.0) || !(m.lambda_min <= m.lambda_max) || (m.samples < 2 && m.lambda_min != m.lambda_max))
    throw ConfigError("mu-curve: need lambda_min <= lambda_max < 0 and at least two samples for a range");
  const Grid grid = make_grid(cfg.grid);
  const Coupling coupling = make_coupling(cfg.coupling, grid);
  CsvWriter csv({"lambda", "mu", "ess_threshold_D"});
  for (int i = 0; i < m.samples; ++i) {
    const double lambda =
        m.samples == 1 ? m.lambda_min : m.lambda_min + (m.lambda_max - m.lambda_min) * double(i) / (m.samples - 1);
    const auto r = lowest_eigenvalue(coupling, lambda, cfg.solver);
    csv.row(std::vector<double>{lambda, r.eigenvalue, essential_threshold_D(coupling.background(), lambda)});
  }
  csv.save(out / "mu_curve.csv");
  return exit_ok;
}

int cmd_lambda1(const ExperimentConfig& cfg, const fs::path& out) {
  const Grid grid = make_grid(cfg.grid);
  const Coupling coupling = make_coupling(cfg.coupling, grid);
  const auto report = find_lambda1(coupling, cfg.solver, cfg.root);
  json j = report_json(report);
  j["schema_version"] = kReportSchema;
  j["solver"] = solver_json(cfg.solver);
  j["grid"] = grid_json(grid);
  save_json(out / "report.json", j);
  CsvWriter csv({"lambda", "mu"});
  for (const auto& [l, mu] : report.mu_curve) csv.row(std::vector<double>{l, mu});
  csv.save(out / "mu_curve.csv");
  if (report.trace_phi) write_grid_function(out / "trace_phi.bin", *report.trace_phi);
  return exit_ok;
}

int cmd_rearrange(const ExperimentConfig& cfg, const fs::path& out) {
  if (cfg.rearrange_input.empty()) throw ConfigError("rearrange: set rearrange.input to a grid function file");
  GridFunction input = [&] {
    try {
      return read_grid_function(cfg.rearrange_input);
    } catch (const FormatError& e) {
      throw ConfigError(std::string("rearrange: ") + e.what());
    }
  }();
  const RankedCells ranking(input.grid());
  const RealGridFunction u = real_part(input, 0.0);
  const RealGridFunction star = symmetric_decreasing_rearrangement(u, ranking);
  write_grid_function(out / "rearranged.bin", to_complex(star));
  CsvWriter csv({"radius", "value"});
  for (Index c : ranking.order()) csv.row(std::vector<double>{input.grid().radius(c), star[c]});
  csv.save(out / "rearranged.csv");
  return exit_ok;
}

int cmd_optimize_check(const ExperimentConfig& cfg, const fs::path& out) {
  const Grid grid = make_grid(cfg.grid);
  CsvWriter csv({"trial", "alpha0", "lambda1_original", "lambda1_rearranged", "slack", "status_original",
                 "status_rearranged", "included", "violation"});
  int included = 0, violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < cfg.optimize_check.trials; ++trial) {
    const auto t = run_trial(cfg, grid, trial);
    if (t.included) {
      ++included;
      worst = std::min(worst, t.slack);
    }
    if (t.violation) ++violations;
    csv.row(std::vector<std::string>{std::to_string(t.trial), format_double(t.alpha0), optional_cell(t.original.lambda1),
                                     optional_cell(t.rearranged.lambda1), t.included ? format_double(t.slack) : "",
                                     to_string(t.original.status), to_string(t.rearranged.status),
                                     t.included ? "1" : "0", t.violation ? "1" : "0"});
  }
  csv.save(out / "optimize_check.csv");
  save_json(out / "optimize_check.json", {{"schema_version", kReportSchema},
                                          {"trials", cfg.optimize_check.trials},
                                          {"included", included},
                                          {"violations", violations},
                                          {"min_slack", included ? json(worst) : json(nullptr)},
                                          {"tol", cfg.optimize_check.tol}});
  if (violations > 0) {
    std::cerr << "optimize-check: " << violations << " trial(s) violate the rearrangement inequality\n";
    return exit_invariant;
  }
  return exit_ok;
}

int cmd_oracle_compare(const ExperimentConfig& cfg, const fs::path& out) {
  const Grid grid = make_grid(cfg.grid);
  const Coupling coupling = make_coupling(cfg.coupling, grid);
  const SurfaceSpec surface = make_surface(cfg.surface, grid);
  if (!(cfg.oracle.half_extent_normal > 4.0 * cfg.oracle.h_normal))
    throw ConfigError("oracle-compare: oracle.half_extent_normal too small for oracle.h_normal");

  BoundStateReport bsp = find_lambda1(coupling, cfg.solver, cfg.root);
  const BoxGrid box = make_box_grid(grid, cfg.oracle.half_extent_normal, cfg.oracle.h_normal);
  const FdOperator op = [&] {
    try {
      return assemble(coupling, surface, box);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("oracle-compare: ") + e.what());
    }
  }();
  const OracleSpectrum spectrum = lowest_eigenpairs(op, cfg.solver, cfg.oracle.eigenpairs);
  const auto gs = ground_state_checks(spectrum, op, 0);
  const double lambda_oracle = spectrum.eigenvalues[0];
  const bool oracle_bound = lambda_oracle < bsp.threshold;

  json reconstruction = nullptr;
  if (bsp.trace_phi && bsp.lambda1 && surface.kind == SurfaceKind::hyperplane && *bsp.lambda1 < 0.0) {
    const auto u = reconstruct_eigenfunction(*bsp.trace_phi, *bsp.lambda1, box.normal_coordinates());
    const SliceField<double> ur(u.transverse(), u.normal_coordinates(), u.values().real());
    reconstruction = stencil_residual(op, *bsp.lambda1, ur);
  }

  json eigenvalues = json::array(), residuals = json::array();
  for (Index i = 0; i < spectrum.eigenvalues.size(); ++i) {
    eigenvalues.push_back(spectrum.eigenvalues[i]);
    residuals.push_back(spectrum.residuals[i]);
  }
  json j = {
      {"schema_version", kReportSchema},
      {"threshold", bsp.threshold},
      {"bsp",
       {{"lambda1", optional_json(bsp.lambda1)},
        {"status", to_string(bsp.status)},
        {"root_iterations", bsp.root_iterations},
        {"mu_at_lambda1", optional_json(bsp.mu_at_lambda1)},
        {"second_eigenvalue", optional_json(bsp.second_eigenvalue)}}},
      {"oracle",
       {{"lambda1", lambda_oracle},
        {"status", oracle_bound ? "bound_state" : "no_bound_state_detected"},
        {"eigenvalues", eigenvalues},
        {"residuals", residuals},
        {"iterations", spectrum.iterations},
        {"method", to_string(spectrum.method)},
        {"unknowns", box.interior_count()},
        {"n_normal", box.n_normal()},
        {"spacing_max", box.spacing_max()},
        {"ground_state",
         {{"sign_definite", gs.sign_definite},
          {"min_off_surface", gs.min_off_surface},
          {"positivity_margin", gs.positivity_margin},
          {"noise_floor", gs.noise_floor},
          {"gap", gs.gap},
          {"relative_gap", gs.relative_gap},
          {"simple", gs.simple}}}}},
      {"relative_gap", bsp.lambda1 && *bsp.lambda1 != 0.0
                           ? json(std::abs(lambda_oracle - *bsp.lambda1) / std::abs(*bsp.lambda1))
                           : json(nullptr)},
      {"reconstruction_residual", reconstruction},
      {"reconstruction_budget", 5.0 * box.spacing_max()},
      {"solver", solver_json(cfg.solver)},
      {"grid", grid_json(grid)},
  };
  save_json(out / "oracle_compare.json", j);
  return exit_ok;
}

int cmd_convergence(const ExperimentConfig& cfg, const fs::path& out) {
  const auto& pts = cfg.convergence.points;
  if (pts.empty()) throw ConfigError("convergence: convergence.points is empty");
  std::vector<std::optional<double>> values;
  json point_info = json::array();
  for (const auto& [n, L] : pts) {
    const Grid grid = make_grid(GridSpec{cfg.grid.dim, n, L});
    const Coupling coupling = make_coupling(cfg.coupling, grid);
    const auto r = find_lambda1(coupling, cfg.solver, cfg.root);
    values.push_back(r.lambda1);
    point_info.push_back({{"N", n}, {"L", L}, {"status", to_string(r.status)}});
  }

  std::optional<double> reference;
  std::string kind;
  if (cfg.convergence.reference) {
    reference = cfg.convergence.reference;
    kind = "configured";
  } else if (auto cf = closed_form_lambda1(cfg.coupling)) {
    reference = cf;
    kind = "closed_form";
  } else if (pts.size() > 1) {
    // Finest grid: smallest spacing, ties broken by the larger box.
    std::size_t best = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const double hi = 2.0 * pts[i].second / pts[i].first, hb = 2.0 * pts[best].second / pts[best].first;
      if (hi < hb || (hi == hb && pts[i].second > pts[best].second)) best = i;
    }
    reference = values[best];
    kind = "finest_grid";
  }

  CsvWriter csv({"N", "L", "lambda1", "err_vs_reference"});
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::string err = (reference && values[i]) ? format_double(std::abs(*values[i] - *reference)) : "";
    csv.row(std::vector<std::string>{std::to_string(pts[i].first), format_double(pts[i].second),
                                     optional_cell(values[i]), err});
  }
  csv.save(out / "convergence.csv");
  save_json(out / "convergence.json", {{"schema_version", kReportSchema},
                                       {"reference", optional_json(reference)},
                                       {"reference_kind", kind.empty() ? json(nullptr) : json(kind)},
                                       {"reference_missing", !reference.has_value()},
                                       {"points", point_info}});
  return exit_ok;
}

int run_command(const std::string& name, const ExperimentConfig& cfg, const fs::path& out) {
  try {
    echo_config(cfg, out);
    if (name == "mu-curve") return cmd_mu_curve(cfg, out);
    if (name == "lambda1") return cmd_lambda1(cfg, out);
    if (name == "rearrange") return cmd_rearrange(cfg, out);
    if (name == "optimize-check") return cmd_optimize_check(cfg, out);
    if (name == "oracle-compare") return cmd_oracle_compare(cfg, out);
    if (name == "convergence") return cmd_convergence(cfg, out);
    std::cerr << "unknown subcommand '" << name << "'\n";
    return exit_config;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return exit_config;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return exit_config;
  } catch (const SolverNonConvergence& e) {
    std::cerr << e.what() << '\n';
    return exit_nonconvergence;
  } catch (const BracketFailure& e) {
    std::cerr << e.what() << '\n';
    return exit_nonconvergence;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return exit_invariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_other;
  }
}

}  // namespace bsdelta::cli
