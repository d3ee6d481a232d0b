#include "bsdelta/cli/config.hpp"

#include "bsdelta/io.hpp"

#include <fstream>
#include <sstream>

namespace bsdelta::cli {

using nlohmann::json;

json default_config() {
  return json{
      {"grid", {{"dim", 1}, {"n_per_axis", 1024}, {"half_extent", 40.0}}},
      {"coupling",
       {{"alpha0", 0.0},
        {"kind", "constant"},
        {"beta", 0.0},
        {"radius", 1.0},
        {"center", json::array({0.0, 0.0})},
        {"path", ""}}},
      {"surface", {{"kind", "hyperplane"}, {"xi_path", ""}, {"lipschitz_bound", 0.0}}},
      {"solver",
       {{"tol", 1e-10}, {"max_iter", 5000}, {"force_dense", false}, {"seed", 42}, {"dense_max_size", 256}}},
      {"root",
       {{"eps", nullptr}, {"tol", 1e-10}, {"detect_margin", 1e-6}, {"max_doublings", 60}, {"max_iter", 200}}},
      {"oracle", {{"half_extent_normal", 20.0}, {"h_normal", 0.05}, {"eigenpairs", 2}}},
      {"mu_curve", {{"lambda_min", -9.0}, {"lambda_max", -0.25}, {"samples", 50}}},
      {"optimize_check",
       {{"trials", 50},
        {"alpha0", json::array({0.0, 1.0})},
        {"family", "mixed"},
        {"intervals", 3},
        {"support", 4.0},
        {"value_min", -2.0},
        {"value_max", 4.0},
        {"beta", 4.0},
        {"tol", 1e-6}}},
      {"convergence", {{"points", json::array({json::array({512, 20.0}), json::array({1024, 40.0})})},
                       {"reference", nullptr}}},
      {"rearrange", {{"input", ""}}},
      {"seed", 42},
  };
}

namespace {

void merge(json& base, const json& patch, const std::string& prefix) {
  if (!patch.is_object()) throw ConfigError("config: expected an object at '" + prefix + "'");
  for (const auto& [key, value] : patch.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!base.contains(key)) throw ConfigError("config: unknown key '" + path + "'");
    if (base[key].is_object())
      merge(base[key], value, path);
    else
      base[key] = value;
  }
}

const json& at(const json& tree, const std::string& dotted) {
  const json* node = &tree;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!node->is_object() || !node->contains(part)) throw ConfigError("config: missing key '" + dotted + "'");
    node = &(*node)[part];
  }
  return *node;
}

double get_double(const json& t, const std::string& k) {
  const json& v = at(t, k);
  if (!v.is_number()) throw ConfigError("config: '" + k + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("config: '" + k + "' must be finite");
  return x;
}

std::optional<double> get_optional_double(const json& t, const std::string& k) {
  if (at(t, k).is_null()) return std::nullopt;
  return get_double(t, k);
}

long long get_int(const json& t, const std::string& k) {
  const json& v = at(t, k);
  if (!v.is_number_integer()) throw ConfigError("config: '" + k + "' must be an integer");
  return v.get<long long>();
}

int get_small_int(const json& t, const std::string& k, long long lo, long long hi) {
  const long long v = get_int(t, k);
  if (v < lo || v > hi)
    throw ConfigError("config: '" + k + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return int(v);
}

bool get_bool(const json& t, const std::string& k) {
  const json& v = at(t, k);
  if (!v.is_boolean()) throw ConfigError("config: '" + k + "' must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& t, const std::string& k) {
  const json& v = at(t, k);
  if (!v.is_string()) throw ConfigError("config: '" + k + "' must be a string");
  return v.get<std::string>();
}

std::string get_choice(const json& t, const std::string& k, std::initializer_list<const char*> choices) {
  const std::string v = get_string(t, k);
  std::string listed;
  for (const char* c : choices) {
    if (v == c) return v;
    listed += std::string(listed.empty() ? "" : "|") + c;
  }
  throw ConfigError("config: '" + k + "' must be one of " + listed + ", got '" + v + "'");
}

std::uint64_t get_u64(const json& t, const std::string& k) {
  const json& v = at(t, k);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
    throw ConfigError("config: '" + k + "' must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

void set_dotted(json& tree, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &tree;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!node->is_object() || !node->contains(parts[i])) throw ConfigError("--set: unknown key '" + key + "'");
    node = &(*node)[parts[i]];
  }
  if (node->is_object()) {
    json patched = *node;
    merge(patched, value, key);
    *node = std::move(patched);
  } else {
    *node = std::move(value);
  }
}

}  // namespace

ExperimentConfig parse_config(const json& t) {
  ExperimentConfig c;
  c.grid.dim = get_small_int(t, "grid.dim", 1, 2);
  c.grid.n_per_axis = get_small_int(t, "grid.n_per_axis", 4, 1 << 20);
  c.grid.half_extent = get_double(t, "grid.half_extent");

  c.coupling.alpha0 = get_double(t, "coupling.alpha0");
  c.coupling.kind = get_choice(t, "coupling.kind", {"constant", "ball", "box", "file"});
  c.coupling.beta = get_double(t, "coupling.beta");
  c.coupling.radius = get_double(t, "coupling.radius");
  const json& center = at(t, "coupling.center");
  if (!center.is_array() || center.size() < 1 || center.size() > 2)
    throw ConfigError("config: 'coupling.center' must be an array of 1 or 2 numbers");
  for (std::size_t i = 0; i < center.size(); ++i) {
    if (!center[i].is_number()) throw ConfigError("config: 'coupling.center' must hold numbers");
    c.coupling.center[i] = center[i].get<double>();
  }
  c.coupling.path = get_string(t, "coupling.path");

  c.surface.kind = get_choice(t, "surface.kind", {"hyperplane", "graph"});
  c.surface.xi_path = get_string(t, "surface.xi_path");
  c.surface.lipschitz_bound = get_double(t, "surface.lipschitz_bound");

  c.solver.tol = get_double(t, "solver.tol");
  c.solver.max_iter = get_small_int(t, "solver.max_iter", 1, 1 << 30);
  c.solver.force_dense = get_bool(t, "solver.force_dense");
  c.solver.seed = get_u64(t, "solver.seed");
  c.solver.dense_max_size = get_small_int(t, "solver.dense_max_size", 0, 1 << 16);
  if (!(c.solver.tol > 0.0)) throw ConfigError("config: 'solver.tol' must be positive");

  c.root.eps = get_optional_double(t, "root.eps");
  c.root.tol = get_double(t, "root.tol");
  c.root.detect_margin = get_double(t, "root.detect_margin");
  c.root.max_doublings = get_small_int(t, "root.max_doublings", 1, 1000);
  c.root.max_iter = get_small_int(t, "root.max_iter", 1, 1 << 20);
  if (c.root.eps && !(*c.root.eps > 0.0)) throw ConfigError("config: 'root.eps' must be positive");
  if (!(c.root.tol > 0.0)) throw ConfigError("config: 'root.tol' must be positive");
  if (!(c.root.detect_margin >= 0.0)) throw ConfigError("config: 'root.detect_margin' must be nonnegative");

  c.oracle.half_extent_normal = get_double(t, "oracle.half_extent_normal");
  c.oracle.h_normal = get_double(t, "oracle.h_normal");
  c.oracle.eigenpairs = get_small_int(t, "oracle.eigenpairs", 2, 16);
  if (!(c.oracle.half_extent_normal > 0.0) || !(c.oracle.h_normal > 0.0))
    throw ConfigError("config: oracle extents and spacing must be positive");

  c.mu_curve.lambda_min = get_double(t, "mu_curve.lambda_min");
  c.mu_curve.lambda_max = get_double(t, "mu_curve.lambda_max");
  c.mu_curve.samples = get_small_int(t, "mu_curve.samples", 1, 1 << 20);

  c.optimize_check.trials = get_small_int(t, "optimize_check.trials", 0, 1 << 20);
  const json& a0 = at(t, "optimize_check.alpha0");
  if (!a0.is_array() || a0.empty()) throw ConfigError("config: 'optimize_check.alpha0' must be a nonempty array");
  c.optimize_check.alpha0.clear();
  for (const auto& v : a0) {
    if (!v.is_number()) throw ConfigError("config: 'optimize_check.alpha0' must hold numbers");
    c.optimize_check.alpha0.push_back(v.get<double>());
  }
  c.optimize_check.family = get_choice(t, "optimize_check.family", {"mixed", "indicator"});
  c.optimize_check.intervals = get_small_int(t, "optimize_check.intervals", 1, 1000);
  c.optimize_check.support = get_double(t, "optimize_check.support");
  c.optimize_check.value_min = get_double(t, "optimize_check.value_min");
  c.optimize_check.value_max = get_double(t, "optimize_check.value_max");
  c.optimize_check.beta = get_double(t, "optimize_check.beta");
  c.optimize_check.tol = get_double(t, "optimize_check.tol");
  if (!(c.optimize_check.support > 0.0)) throw ConfigError("config: 'optimize_check.support' must be positive");
  if (!(c.optimize_check.value_min <= c.optimize_check.value_max))
    throw ConfigError("config: 'optimize_check.value_min' exceeds value_max");

  const json& pts = at(t, "convergence.points");
  if (!pts.is_array()) throw ConfigError("config: 'convergence.points' must be an array of [N, L] pairs");
  for (const auto& p : pts) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number())
      throw ConfigError("config: 'convergence.points' entries must be [N, L]");
    c.convergence.points.emplace_back(p[0].get<int>(), p[1].get<double>());
  }
  c.convergence.reference = get_optional_double(t, "convergence.reference");

  c.rearrange_input = get_string(t, "rearrange.input");
  c.seed = get_u64(t, "seed");
  c.resolved = t;
  return c;
}

ExperimentConfig load_config(const std::optional<std::filesystem::path>& file, const std::vector<std::string>& sets,
                             std::optional<std::uint64_t> seed) {
  json tree = default_config();
  if (file) {
    std::ifstream is(*file);
    if (!is) throw ConfigError("config: cannot open '" + file->string() + "'");
    json user;
    try {
      user = json::parse(is, nullptr, true, true);
    } catch (const json::parse_error& e) {
      throw ConfigError("config: parse error in '" + file->string() + "': " + e.what());
    }
    if (user.is_object()) user.erase("schema_version");
    merge(tree, user, "");
  }
  for (const auto& s : sets) set_dotted(tree, s);
  if (seed) tree["seed"] = *seed;
  return parse_config(tree);
}

Grid make_grid(const GridSpec& spec) {
  try {
    return Grid(spec.dim, spec.n_per_axis, spec.half_extent);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

Coupling make_coupling(const CouplingSpec& spec, const Grid& grid) {
  try {
    if (spec.kind == "constant") return constant_coupling(spec.alpha0, grid);
    if (spec.kind == "ball" || spec.kind == "box")
      return indicator_coupling(spec.beta, spec.kind == "ball" ? Region::ball : Region::box, spec.radius, spec.center,
                                spec.alpha0, grid);
    const GridFunction f = read_grid_function(spec.path);
    if (!(f.grid() == grid)) throw ConfigError("config: coupling file grid differs from the configured grid");
    return coupling_from_samples(spec.alpha0, real_part(f, 0.0));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const FormatError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

SurfaceSpec make_surface(const SurfaceConfig& spec, const Grid& grid) {
  if (spec.kind == "hyperplane") return SurfaceSpec::hyperplane();
  try {
    const GridFunction xi = read_grid_function(spec.xi_path);
    if (!(xi.grid() == grid)) throw ConfigError("config: xi file grid differs from the configured grid");
    return SurfaceSpec::graph(real_part(xi, 0.0), spec.lipschitz_bound);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const FormatError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

}  // namespace bsdelta::cli
