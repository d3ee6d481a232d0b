#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsdelta {

struct SolverConfig {
  /// Residual target ||A x - theta x|| for unit x, relative to max(1, operator scale).
  double tol = 1e-10;
  int max_iter = 5000;
  bool force_dense = false;
  std::uint64_t seed = 42;
  /// Dense diagonalization at or below this many unknowns.
  Eigen::Index dense_max_size = 256;
};

enum class SolverMethod { dense, lobpcg };

inline const char* to_string(SolverMethod m) { return m == SolverMethod::dense ? "dense" : "lobpcg"; }

/// Lowest eigenpairs of a symmetric operator, ascending.
struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  ///< unit Euclidean columns
  Eigen::VectorXd residuals;
  int iterations = 0;
  bool converged = false;
  SolverMethod method = SolverMethod::lobpcg;
};

class SolverNonConvergence : public std::runtime_error {
 public:
  SolverNonConvergence(const std::string& what, double best_residual)
      : std::runtime_error(what + " (best residual " + std::to_string(best_residual) + ")"),
        best_residual_(best_residual) {}
  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

/// Fixed start block: normalized ones plus seeded perturbation in column 0, seeded noise elsewhere.
inline Eigen::MatrixXd deterministic_start_block(Eigen::Index n, int block, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::MatrixXd X(n, block);
  for (int b = 0; b < block; ++b)
    for (Eigen::Index i = 0; i < n; ++i) X(i, b) = unif(rng);
  X.col(0) = X.col(0) * 0.1 + Eigen::VectorXd::Ones(n);
  for (int b = 0; b < block; ++b) X.col(b).normalize();
  return X;
}

/// Flips each column so its largest-magnitude entry is positive.
inline void normalize_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index imax = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&imax);
    if (vectors(imax, c) < 0.0) vectors.col(c) *= -1.0;
  }
}

inline EigenPairs dense_lowest(const Eigen::MatrixXd& A, int wanted) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw SolverNonConvergence("dense eigensolver failed", std::numeric_limits<double>::infinity());
  const int k = std::min<int>(wanted, int(A.rows()));
  EigenPairs out;
  out.values = es.eigenvalues().head(k);
  out.vectors = es.eigenvectors().leftCols(k);
  out.residuals = (A * out.vectors - out.vectors * out.values.asDiagonal()).colwise().norm().transpose();
  out.iterations = 1;
  out.converged = true;
  out.method = SolverMethod::dense;
  normalize_signs(out.vectors);
  return out;
}

namespace detail {

// Orthonormalizes the columns of V against the orthonormal Q and among
// themselves (two Gram-Schmidt passes), dropping numerically dependent ones.
inline Eigen::MatrixXd orthonormalize_against(const Eigen::MatrixXd& V, const Eigen::MatrixXd& Q) {
  std::vector<Eigen::VectorXd> kept;
  for (Eigen::Index c = 0; c < V.cols(); ++c) {
    Eigen::VectorXd v = V.col(c);
    const double n0 = v.norm();
    if (!(n0 > 0.0)) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (Q.cols() > 0) v -= Q * (Q.transpose() * v);
      for (const auto& q : kept) v -= q * q.dot(v);
    }
    const double n1 = v.norm();
    if (!(n1 > 1e-10 * n0)) continue;
    kept.push_back(v / n1);
  }
  Eigen::MatrixXd out(V.rows(), Eigen::Index(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) out.col(Eigen::Index(c)) = kept[c];
  return out;
}

inline Eigen::MatrixXd hcat(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

}  // namespace detail

/**
 * Block LOBPCG for the lowest `wanted` eigenpairs of a symmetric operator.
 *
 * apply(X) returns A X and precondition(R) an SPD approximation of
 * (A - sigma)^{-1} R for some sigma below the spectrum. Every iteration the
 * Rayleigh-Ritz problem is solved on the explicitly orthonormalized span of
 * [X, T R, P], and A X is recomputed from scratch so residuals are exact.
 * Convergence: residual of each wanted column <= tol * max(1, scale).
 */
template <typename Apply, typename Precondition>
EigenPairs lobpcg(Apply&& apply, Precondition&& precondition, Eigen::MatrixXd X0, int wanted, double tol,
                  int max_iter, double scale) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const int block = int(X0.cols());
  const double target = tol * std::max(1.0, scale);

  auto rayleigh_ritz = [&](const MatrixXd& Q, const MatrixXd& AQ, int k) {
    MatrixXd H = Q.transpose() * AQ;
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(H);
    return std::pair<VectorXd, MatrixXd>{es.eigenvalues().head(k), es.eigenvectors().leftCols(k)};
  };

  MatrixXd X = detail::orthonormalize_against(X0, MatrixXd(X0.rows(), 0));
  if (X.cols() < block) throw std::invalid_argument("lobpcg: start block is rank deficient");
  MatrixXd AX = apply(X);
  {
    auto [theta, C] = rayleigh_ritz(X, AX, block);
    X = X * C;
  }
  MatrixXd P(X.rows(), 0);
  EigenPairs out;
  double best = std::numeric_limits<double>::infinity();

  for (int it = 0; it <= max_iter; ++it) {
    AX = apply(X);
    VectorXd theta = (X.transpose() * AX).diagonal();
    MatrixXd R = AX - X * theta.asDiagonal();
    VectorXd res = R.colwise().norm().transpose();
    best = std::min(best, res.head(wanted).maxCoeff());
    if (res.head(wanted).maxCoeff() <= target || it == max_iter) {
      out.values = theta;
      out.vectors = X;
      out.residuals = res;
      out.iterations = it;
      out.converged = res.head(wanted).maxCoeff() <= target;
      break;
    }
    MatrixXd W = detail::orthonormalize_against(precondition(R), X);
    if (W.cols() == 0) throw SolverNonConvergence("lobpcg: stagnated at round-off level", best);
    MatrixXd XW = detail::hcat(X, W);
    MatrixXd Pn = P.cols() > 0 ? detail::orthonormalize_against(P, XW) : MatrixXd(X.rows(), 0);
    MatrixXd Q = detail::hcat(XW, Pn);
    MatrixXd AQ(Q.rows(), Q.cols());
    AQ << AX, apply(detail::hcat(W, Pn));
    auto [vals, C] = rayleigh_ritz(Q, AQ, block);
    MatrixXd Xn = Q * C;
    P = Q.rightCols(Q.cols() - block) * C.bottomRows(Q.cols() - block);
    X = detail::orthonormalize_against(Xn, MatrixXd(X.rows(), 0));
    if (X.cols() < block) throw SolverNonConvergence("lobpcg: lost rank in the iteration block", best);
  }
  if (!out.converged)
    throw SolverNonConvergence("lobpcg: no convergence in " + std::to_string(max_iter) + " iterations", best);
  normalize_signs(out.vectors);
  return out;
}

}  // namespace bsdelta
