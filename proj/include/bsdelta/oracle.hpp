#pragma once

#include "bsdelta/box_grid.hpp"
#include "bsdelta/eigensolver.hpp"
#include "bsdelta/potential.hpp"

#include <Eigen/Sparse>

#include <optional>
#include <utility>
#include <vector>

namespace bsdelta {

enum class SurfaceKind { hyperplane, graph };

/// Sigma = {(x', xi(x'))}; xi = 0 for the hyperplane.
struct SurfaceSpec {
  SurfaceKind kind = SurfaceKind::hyperplane;
  std::optional<RealGridFunction> xi;
  double lipschitz_bound = 0.0;

  static SurfaceSpec hyperplane() { return {}; }
  /// Validates compact support (inside the box) and the Lipschitz bound on one-sided differences.
  static SurfaceSpec graph(RealGridFunction xi, double lipschitz_bound);
};

/**
 * Finite-difference realization of -Delta - alpha delta_Sigma on a Dirichlet
 * box: (2d+1)-point Laplacian on the interior nodes plus the diagonal term
 * -alpha(x') w(x') / h_d at the node of each transverse column nearest to
 * Sigma, w = sqrt(1 + |grad xi|^2) from forward differences (w = 1 on the
 * hyperplane).
 */
class FdOperator {
 public:
  FdOperator(Coupling coupling, SurfaceSpec surface, BoxGrid box);

  const BoxGrid& box() const { return box_; }
  const Coupling& coupling() const { return coupling_; }
  const SurfaceSpec& surface() const { return surface_; }
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix() const { return matrix_; }

  /// Normal node index carrying the delta weight in each transverse cell.
  const std::vector<int>& surface_nodes() const { return surface_nodes_; }
  /// Surface-measure weight per transverse cell.
  const Eigen::VectorXd& surface_weights() const { return surface_weights_; }

  /// max |A - A^T|.
  double asymmetry() const;
  /// Gershgorin bound on |spectrum|.
  double scale() const;

 private:
  Coupling coupling_;
  SurfaceSpec surface_;
  BoxGrid box_;
  std::vector<int> surface_nodes_;
  Eigen::VectorXd surface_weights_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix_;
};

FdOperator assemble(const Coupling& coupling, const SurfaceSpec& surface, const BoxGrid& box);

struct OracleSpectrum {
  Eigen::VectorXd eigenvalues;
  std::vector<SliceField<double>> eigenvectors;  ///< unit L2 on the box, walls zero
  Eigen::VectorXd residuals;                     ///< ||A u - lambda u||_L2 for unit u
  int iterations = 0;
  SolverMethod method = SolverMethod::lobpcg;
};

/// Lowest `count` eigenpairs: preconditioned LOBPCG (fast Dirichlet Poisson solve as preconditioner), dense at small size.
OracleSpectrum lowest_eigenpairs(const FdOperator& op, const SolverConfig& solver, int count = 2);

struct GroundStateReport {
  bool sign_definite = false;
  double min_off_surface = 0.0;  ///< min over interior nodes off Sigma, unit-Euclidean scaling
  double max_value = 0.0;
  double positivity_margin = 0.0;  ///< min / max
  double noise_floor = 0.0;        ///< certified pointwise error 2 ||r|| / gap of the computed vector
  double gap = 0.0;                ///< lambda_2 - lambda_1
  double relative_gap = 0.0;       ///< gap / |lambda_1|
  bool simple = false;             ///< gap > gap_tol
  double gap_tol = 0.0;
};

/**
 * Sign-definiteness and simplicity of eigenvector `index` of the spectrum.
 * Samples below zero by no more than the noise floor count as zero, so a
 * vector is sign-definite when min u >= -noise_floor off Sigma.
 */
GroundStateReport ground_state_checks(const OracleSpectrum& spectrum, const FdOperator& op, int index = 0,
                                      double relative_gap_tol = 1e-6);

/// Discrete quadratic form: sum over grid edges |du/h|^2 vol - sum_x' alpha w u(x', Sigma)^2 h_t^{d-1}.
/// Evaluated edge by edge, independent of the assembled matrix.
double discrete_form(const FdOperator& op, const SliceField<double>& u);
/// Same form with another coupling on the surface layout of `op`.
double discrete_form(const FdOperator& op, const Coupling& coupling, const SliceField<double>& u);

/// Discrete Dirichlet energy alone, sum |du/h|^2 vol.
double dirichlet_energy(const BoxGrid& box, const SliceField<double>& u);

/// L2 norm on the box.
double box_norm(const BoxGrid& box, const SliceField<double>& u);

/**
 * (form of the rearranged coupling alpha0 + (alpha1)_+^* at the Steiner
 * symmetrized ground state, form of the original coupling at the ground
 * state). Hyperplane only; the ground state must pass the sign check.
 */
std::pair<double, double> steiner_rayleigh_check(const OracleSpectrum& spectrum, const Coupling& coupling,
                                                 const FdOperator& op);

/// ||(A_h - lambda) u|| / ||u|| over interior nodes.
double stencil_residual(const FdOperator& op, double lambda, const SliceField<double>& u);

}  // namespace bsdelta
