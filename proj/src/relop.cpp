#include "bsdelta/relop.hpp"

namespace bsdelta {

RelativisticOperator::RelativisticOperator(Coupling coupling, double lambda)
    : coupling_(std::move(coupling)), lambda_(lambda) {
  if (!(lambda < 0.0)) throw std::invalid_argument("relativistic operator: lambda must be negative");
  multiplier_ = frequency_multiplier(grid(), [lambda](double k2) { return 2.0 * std::sqrt(k2 - lambda); });
  alpha_ = sample_coupling(coupling_).samples();
}

GridFunction RelativisticOperator::apply(const GridFunction& phi) const {
  if (!(phi.grid() == grid())) throw std::invalid_argument("relativistic operator: grid mismatch");
  const auto kinetic = fourier_multiply(phi, multiplier_);
  return {grid(), kinetic.samples() - (alpha_.cast<Complex>().array() * phi.samples().array()).matrix()};
}

Eigen::VectorXd RelativisticOperator::apply(const Eigen::VectorXd& phi) const {
  return fourier_multiply(grid(), phi, multiplier_) - alpha_.cwiseProduct(phi);
}

Eigen::MatrixXd RelativisticOperator::apply_block(const Eigen::MatrixXd& block) const {
  Eigen::MatrixXd out(block.rows(), block.cols());
  for (Index c = 0; c < block.cols(); ++c) out.col(c) = apply(Eigen::VectorXd(block.col(c)));
  return out;
}

Eigen::MatrixXd RelativisticOperator::dense() const {
  const Index n = grid().cell_count();
  Eigen::MatrixXd D(n, n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    D.col(j) = apply(e);
    e[j] = 0.0;
  }
  return 0.5 * (D + D.transpose());
}

double RelativisticOperator::scale() const { return multiplier_.maxCoeff() + alpha_.cwiseAbs().maxCoeff(); }

double form_value(const RelativisticOperator& op, const GridFunction& phi) {
  if (!(phi.grid() == op.grid())) throw std::invalid_argument("form_value: grid mismatch");
  if (phi.samples().squaredNorm() == 0.0) throw std::invalid_argument("form_value: zero input");
  const double kinetic = spectral_quadratic_form(phi, op.multiplier());
  const double potential = (op.alpha().array() * phi.samples().array().abs2()).sum() * op.grid().cell_volume();
  return kinetic - potential;
}

double fractional_kinetic_energy(const GridFunction& phi, double lambda) {
  if (!(lambda < 0.0)) throw std::invalid_argument("fractional_kinetic_energy: lambda must be negative");
  const auto m = frequency_multiplier(phi.grid(), [lambda](double k2) { return std::sqrt(k2 - lambda); });
  return spectral_quadratic_form(phi, m);
}

SpectralResult lowest_eigenvalue(const Coupling& coupling, double lambda, const SolverConfig& solver) {
  const RelativisticOperator op(coupling, lambda);
  const Grid& g = op.grid();
  const Index n = g.cell_count();

  EigenPairs pairs;
  if (solver.force_dense || n <= solver.dense_max_size) {
    pairs = dense_lowest(op.dense(), 2);
  } else {
    // Preconditioner (K - min K + c)^{-1}, c above max alpha: SPD and shifted below the spectrum.
    const double alpha_max = op.alpha().maxCoeff();
    const double shift = std::max(alpha_max, 0.0) + 1.0;
    const double kmin = op.multiplier().minCoeff();
    const Eigen::VectorXd inverse = (op.multiplier().array() - kmin + shift).inverse();
    auto precondition = [&](const Eigen::MatrixXd& R) {
      Eigen::MatrixXd out(R.rows(), R.cols());
      for (Index c = 0; c < R.cols(); ++c) out.col(c) = fourier_multiply(g, Eigen::VectorXd(R.col(c)), inverse);
      return out;
    };
    auto apply = [&](const Eigen::MatrixXd& X) { return op.apply_block(X); };
    const int block = int(std::min<Index>(3, n));
    pairs = lobpcg(apply, precondition, deterministic_start_block(n, block, solver.seed), 1, solver.tol,
                   solver.max_iter, op.scale());
  }

  const double to_l2 = 1.0 / std::sqrt(g.cell_volume());
  SpectralResult out{
      pairs.values[0],
      GridFunction(g, (pairs.vectors.col(0) * to_l2).cast<Complex>()),
      pairs.residuals[0],
      pairs.iterations,
      pairs.method,
      std::nullopt,
      std::nullopt,
  };
  if (pairs.values.size() > 1) {
    out.second_eigenvalue = pairs.values[1];
    out.second_residual = pairs.residuals[1];
  }
  return out;
}

}  // namespace bsdelta
