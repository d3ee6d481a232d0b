#pragma once

#include "bsdelta/eigensolver.hpp"
#include "bsdelta/grid.hpp"
#include "bsdelta/potential.hpp"

#include <optional>

namespace bsdelta {

/**
 * D = 2 (-Delta - lambda)^{1/2} - alpha on the periodic transverse grid,
 * lambda < 0. The kinetic part is the Fourier multiplier 2 (|k|^2 - lambda)^{1/2}.
 * D maps real samples to real samples (the multiplier is real and even).
 */
class RelativisticOperator {
 public:
  RelativisticOperator(Coupling coupling, double lambda);

  const Coupling& coupling() const { return coupling_; }
  double lambda() const { return lambda_; }
  const Grid& grid() const { return coupling_.grid(); }
  const Eigen::VectorXd& multiplier() const { return multiplier_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }

  GridFunction apply(const GridFunction& phi) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& phi) const;
  Eigen::MatrixXd apply_block(const Eigen::MatrixXd& block) const;

  /// Column-by-column dense matrix in the Euclidean sample basis.
  Eigen::MatrixXd dense() const;

  /// Upper bound on |spectrum|: max multiplier + max |alpha|.
  double scale() const;

 private:
  Coupling coupling_;
  double lambda_;
  Eigen::VectorXd multiplier_;
  Eigen::VectorXd alpha_;
};

/// 2 sum (|k|^2 - lambda)^{1/2} |phi^|^2 dk^dim - sum alpha |phi|^2 h^dim.
double form_value(const RelativisticOperator& op, const GridFunction& phi);

/// ||(-Delta - lambda)^{1/4} phi||^2, the kinetic term of the form without the factor 2.
double fractional_kinetic_energy(const GridFunction& phi, double lambda);

struct SpectralResult {
  double eigenvalue = 0.0;
  GridFunction eigenvector;  ///< unit L2 norm, largest-magnitude sample positive
  double residual = 0.0;     ///< ||D phi - mu phi||_L2
  int iterations = 0;
  SolverMethod method = SolverMethod::lobpcg;
  /// Next Ritz value; an upper bound on the second eigenvalue.
  std::optional<double> second_eigenvalue;
  std::optional<double> second_residual;
};

/// mu_alpha(lambda) = inf spectrum of the discrete D.
SpectralResult lowest_eigenvalue(const Coupling& coupling, double lambda, const SolverConfig& solver);

}  // namespace bsdelta
