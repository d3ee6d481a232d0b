#include "bsdelta/eigensolver.hpp"

#include <doctest.h>

using namespace bsdelta;

namespace {

Eigen::MatrixXd random_symmetric(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd A(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) A(i, j) = g(rng);
  A = 0.5 * (A + A.transpose()).eval();
  A.diagonal().array() += Eigen::VectorXd::LinSpaced(n, 0.0, 50.0).array();
  return A;
}

}  // namespace

TEST_CASE("start block is deterministic and normalized") {
  const auto a = deterministic_start_block(50, 3, 42);
  const auto b = deterministic_start_block(50, 3, 42);
  CHECK(a == b);
  CHECK(deterministic_start_block(50, 3, 43) != a);
  for (int c = 0; c < 3; ++c) CHECK(a.col(c).norm() == doctest::Approx(1.0));
  CHECK((a.col(0).array() > 0.0).all());
}

TEST_CASE("dense_lowest returns ascending pairs with sign convention") {
  const auto A = random_symmetric(30, 1);
  const auto p = dense_lowest(A, 3);
  CHECK(p.values.size() == 3);
  CHECK(p.values[0] <= p.values[1]);
  for (int c = 0; c < 3; ++c) {
    Eigen::Index imax;
    p.vectors.col(c).cwiseAbs().maxCoeff(&imax);
    CHECK(p.vectors(imax, c) > 0.0);
    CHECK(p.residuals[c] < 1e-10);
  }
}

TEST_CASE("lobpcg agrees with dense diagonalization") {
  const auto A = random_symmetric(200, 5);
  const auto dense = dense_lowest(A, 2);
  auto apply = [&](const Eigen::MatrixXd& X) -> Eigen::MatrixXd { return A * X; };
  const Eigen::VectorXd d = A.diagonal();
  const double shift = d.minCoeff() - 30.0;
  auto precond = [&](const Eigen::MatrixXd& R) -> Eigen::MatrixXd {
    return (d.array() - shift).inverse().matrix().asDiagonal() * R;
  };
  const auto p = lobpcg(apply, precond, deterministic_start_block(200, 3, 42), 2, 1e-11, 2000, 100.0);
  CHECK(p.converged);
  CHECK(p.values[0] == doctest::Approx(dense.values[0]).epsilon(1e-10));
  CHECK(p.values[1] == doctest::Approx(dense.values[1]).epsilon(1e-10));
  CHECK(std::abs(p.vectors.col(0).dot(dense.vectors.col(0))) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(p.residuals.head(2).maxCoeff() <= 1e-11 * 100.0);

  const auto q = lobpcg(apply, precond, deterministic_start_block(200, 3, 42), 2, 1e-11, 2000, 100.0);
  CHECK(q.values == p.values);
  CHECK(q.iterations == p.iterations);
}

TEST_CASE("lobpcg reports non-convergence with the best residual") {
  const auto A = random_symmetric(200, 6);
  auto apply = [&](const Eigen::MatrixXd& X) -> Eigen::MatrixXd { return A * X; };
  auto identity = [](const Eigen::MatrixXd& R) -> Eigen::MatrixXd { return R; };
  try {
    lobpcg(apply, identity, deterministic_start_block(200, 3, 42), 1, 1e-14, 2, 1.0);
    FAIL("expected non-convergence");
  } catch (const SolverNonConvergence& e) {
    CHECK(e.best_residual() > 0.0);
    CHECK(std::isfinite(e.best_residual()));
  }
}
