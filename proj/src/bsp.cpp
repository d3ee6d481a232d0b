#include "bsdelta/bsp.hpp"

#include <cmath>
#include <map>

namespace bsdelta {

double essential_threshold(double alpha0) { return alpha0 >= 0.0 ? -alpha0 * alpha0 / 4.0 : 0.0; }

double essential_threshold_D(double alpha0, double lambda) {
  if (!(lambda < 0.0)) throw std::invalid_argument("essential_threshold_D: lambda must be negative");
  return 2.0 * std::sqrt(-lambda) - alpha0;
}

double gamma_trace_multiplier(double lambda, double k) {
  if (!(lambda < 0.0)) throw std::invalid_argument("gamma_trace_multiplier: lambda must be negative");
  return 0.5 / std::sqrt(k * k - lambda);
}

const char* to_string(BoundStateStatus s) {
  switch (s) {
    case BoundStateStatus::bound_state:
      return "bound_state";
    case BoundStateStatus::at_threshold:
      return "at_threshold";
    case BoundStateStatus::no_bound_state_detected:
      return "no_bound_state_detected";
  }
  return "unknown";
}

namespace {

class MuCurve {
 public:
  MuCurve(const Coupling& coupling, const SolverConfig& solver) : coupling_(coupling), solver_(solver) {}

  const SpectralResult& at(double lambda) {
    auto it = results_.find(lambda);
    if (it == results_.end()) {
      it = results_.emplace(lambda, lowest_eigenvalue(coupling_, lambda, solver_)).first;
      check_monotone(it);
    }
    return it->second;
  }
  double mu(double lambda) { return at(lambda).eigenvalue; }

  std::vector<std::pair<double, double>> samples() const {
    std::vector<std::pair<double, double>> out;
    out.reserve(results_.size());
    for (const auto& [l, r] : results_) out.emplace_back(l, r.eigenvalue);
    return out;
  }

 private:
  // mu is nonincreasing in lambda; an increase beyond solver accuracy is a solver failure.
  void check_monotone(std::map<double, SpectralResult>::iterator it) {
    const double slack = 10.0 * solver_.tol * std::max(1.0, std::abs(it->second.eigenvalue));
    if (it != results_.begin()) {
      const auto prev = std::prev(it);
      if (it->second.eigenvalue > prev->second.eigenvalue + slack)
        throw InvariantViolation("mu curve increases between lambda = " + std::to_string(prev->first) + " and " +
                                 std::to_string(it->first));
    }
    const auto next = std::next(it);
    if (next != results_.end() && next->second.eigenvalue > it->second.eigenvalue + slack)
      throw InvariantViolation("mu curve increases between lambda = " + std::to_string(it->first) + " and " +
                               std::to_string(next->first));
  }

  const Coupling& coupling_;
  const SolverConfig& solver_;
  std::map<double, SpectralResult> results_;
};

struct RootResult {
  double lambda;
  int iterations;
};

// lo has mu > 0, hi has mu <= 0. Even steps regula falsi (kept away from the
// bracket ends), odd steps bisection.
RootResult refine_root(MuCurve& curve, double lo, double hi, const RootConfig& root) {
  double mu_lo = curve.mu(lo);
  double mu_hi = curve.mu(hi);
  if (std::abs(mu_hi) <= root.tol) return {hi, 0};
  for (int it = 1; it <= root.max_iter; ++it) {
    const double width = hi - lo;
    double x;
    if (it % 2 == 1) {
      x = hi - mu_hi * width / (mu_hi - mu_lo);
      const double guard = 1e-3 * width;
      x = std::clamp(x, lo + guard, hi - guard);
    } else {
      x = 0.5 * (lo + hi);
    }
    const double mu_x = curve.mu(x);
    if (std::abs(mu_x) <= root.tol) return {x, it};
    if (mu_x > 0.0) {
      lo = x;
      mu_lo = mu_x;
    } else {
      hi = x;
      mu_hi = mu_x;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(hi)))
      return {std::abs(mu_lo) < std::abs(mu_hi) ? lo : hi, it};
  }
  throw BracketFailure("root refinement did not reach |mu| <= tol in " + std::to_string(root.max_iter) + " steps");
}

}  // namespace

BoundStateReport find_lambda1(const Coupling& coupling, const SolverConfig& solver, const RootConfig& root) {
  const double alpha0 = coupling.background();
  const double eps = root.probe_offset(alpha0);
  if (!(eps > 0.0) || !(root.tol > 0.0)) throw std::invalid_argument("find_lambda1: eps and tol must be positive");

  BoundStateReport report;
  report.threshold = essential_threshold(alpha0);
  const double t = report.threshold;
  MuCurve curve(coupling, solver);

  std::optional<std::pair<double, double>> bracket;  // (mu > 0, mu <= 0)
  const double probe = t - eps;
  const double mu_probe = curve.mu(probe);

  if (mu_probe <= 0.0) {
    double hi = probe;
    for (int m = 1; m <= root.max_doublings; ++m) {
      const double lo = t - std::ldexp(eps, m);
      if (curve.mu(lo) > 0.0) {
        bracket = {lo, hi};
        break;
      }
      hi = lo;
    }
    if (!bracket) throw BracketFailure("find_lambda1: bracket expansion exceeded max_doublings");
  } else if (t < 0.0) {
    const double mu_t = curve.mu(t);
    if (mu_t < -root.tol) {
      bracket = {probe, t};
    } else if (mu_t <= root.detect_margin) {
      report.status = BoundStateStatus::at_threshold;
      report.lambda1 = t;
      report.bracket = {probe, t};
    }
  } else if (mu_probe <= root.detect_margin) {
    // Threshold 0 is excluded; creep toward it while mu is within the margin.
    double prev = probe;
    for (int m = 1; m <= root.max_doublings; ++m) {
      const double x = -std::ldexp(eps, -m);
      if (curve.mu(x) <= 0.0) {
        bracket = {prev, x};
        break;
      }
      prev = x;
    }
  }

  if (bracket) {
    const auto r = refine_root(curve, bracket->first, bracket->second, root);
    report.lambda1 = r.lambda;
    report.root_iterations = r.iterations;
    report.bracket = *bracket;
    report.status = BoundStateStatus::bound_state;
  }
  if (report.lambda1) {
    const auto& res = curve.at(*report.lambda1);
    report.trace_phi = res.eigenvector;
    report.mu_at_lambda1 = res.eigenvalue;
    report.second_eigenvalue = res.second_eigenvalue;
  } else {
    report.bracket = {probe, t};
  }
  report.mu_curve = curve.samples();
  return report;
}

SliceField<Complex> reconstruct_eigenfunction(const GridFunction& trace_phi, double lambda,
                                               const std::vector<double>& xd_samples) {
  if (!(lambda < 0.0)) throw std::invalid_argument("reconstruct_eigenfunction: lambda must be negative");
  const Grid& g = trace_phi.grid();
  const auto rho = frequency_multiplier(g, [lambda](double k2) { return std::sqrt(k2 - lambda); });
  Eigen::MatrixXcd values(g.cell_count(), Index(xd_samples.size()));
  for (std::size_t s = 0; s < xd_samples.size(); ++s) {
    const double a = std::abs(xd_samples[s]);
    if (a == 0.0) {
      values.col(Index(s)) = trace_phi.samples();
      continue;
    }
    const Eigen::VectorXd kernel = (-rho.array() * a).exp();
    values.col(Index(s)) = fourier_multiply(trace_phi, kernel).samples();
  }
  return {g, xd_samples, std::move(values)};
}

}  // namespace bsdelta
