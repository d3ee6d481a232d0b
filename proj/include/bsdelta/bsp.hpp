#pragma once

#include "bsdelta/box_grid.hpp"
#include "bsdelta/relop.hpp"

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bsdelta {

/// inf of the essential spectrum of the bulk operator: -alpha0^2/4 for alpha0 >= 0, else 0.
double essential_threshold(double alpha0);

/// inf of the essential spectrum of D_{alpha,lambda}: 2 sqrt(-lambda) - alpha0.
double essential_threshold_D(double alpha0, double lambda);

/// Trace multiplier of the gamma field, (1/2)(|k|^2 - lambda)^{-1/2}.
double gamma_trace_multiplier(double lambda, double k);

struct RootConfig {
  /// Probe offset below the threshold; default 1e-4 max(1, alpha0^2).
  std::optional<double> eps;
  double tol = 1e-10;
  double detect_margin = 1e-6;
  int max_doublings = 60;
  int max_iter = 200;

  double probe_offset(double alpha0) const { return eps.value_or(1e-4 * std::max(1.0, alpha0 * alpha0)); }
};

enum class BoundStateStatus {
  bound_state,              ///< zero of mu strictly below the threshold
  at_threshold,             ///< mu vanishes at the threshold itself (lambda1 = threshold)
  no_bound_state_detected,  ///< mu stays positive up to the threshold at this resolution
};

const char* to_string(BoundStateStatus s);

struct BoundStateReport {
  std::optional<double> lambda1;
  double threshold = 0.0;
  std::optional<GridFunction> trace_phi;
  std::vector<std::pair<double, double>> mu_curve;  ///< visited (lambda, mu), ascending lambda
  std::pair<double, double> bracket{0.0, 0.0};
  BoundStateStatus status = BoundStateStatus::no_bound_state_detected;
  int root_iterations = 0;
  std::optional<double> mu_at_lambda1;
  /// Spectral gap of D at lambda1 above the zero eigenvalue.
  std::optional<double> second_eigenvalue;
};

class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BracketFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * lambda1(alpha) as the zero of lambda -> mu_alpha(lambda) at or below the
 * essential threshold. Probes at threshold - eps; a nonpositive mu there is
 * bracketed by doubling the offset and refined by bisection with a
 * regula-falsi step. With a positive probe the threshold itself decides
 * (alpha0 > 0 only): mu(threshold) < -tol still brackets a zero, |mu| within
 * the detection margin means lambda1 equals the threshold.
 */
BoundStateReport find_lambda1(const Coupling& coupling, const SolverConfig& solver, const RootConfig& root);

/// Slices u(., x_d) = F^{-1}[exp(-rho(k)|x_d|) F phi], rho = (|k|^2 - lambda)^{1/2}; u(., 0) = phi exactly.
SliceField<Complex> reconstruct_eigenfunction(const GridFunction& trace_phi, double lambda,
                                               const std::vector<double>& xd_samples);

}  // namespace bsdelta
