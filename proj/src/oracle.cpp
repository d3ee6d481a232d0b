#include "bsdelta/oracle.hpp"

#include "bsdelta/rearrange.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <stdexcept>

namespace bsdelta {

namespace {

bool on_outer_ring(const Grid& g, Index cell) {
  const auto idx = g.axis_indices(cell);
  const int last = g.n_per_axis() - 1;
  if (idx[0] == 0 || idx[0] == last) return true;
  return g.dim() == 2 && (idx[1] == 0 || idx[1] == last);
}

// Forward-difference gradient of xi at a cell (periodic wrap; xi vanishes near the wall).
std::array<double, 2> forward_gradient(const RealGridFunction& xi, Index cell) {
  const Grid& g = xi.grid();
  const int n = g.n_per_axis();
  const auto idx = g.axis_indices(cell);
  const double h = g.spacing();
  std::array<double, 2> grad{0.0, 0.0};
  if (g.dim() == 1) {
    grad[0] = (xi[g.flat_index((idx[0] + 1) % n)] - xi[cell]) / h;
  } else {
    grad[0] = (xi[g.flat_index((idx[0] + 1) % n, idx[1])] - xi[cell]) / h;
    grad[1] = (xi[g.flat_index(idx[0], (idx[1] + 1) % n)] - xi[cell]) / h;
  }
  return grad;
}

// Dirichlet-Laplacian power solve via the DST-I along every axis.
class DstPoisson {
 public:
  DstPoisson(const BoxGrid& box, double shift) : box_(box) {
    const int m_t = box.transverse_interior_per_axis();
    const int m_n = box.n_normal() - 1;
    transverse_dims_ = box.transverse().dim();
    m_t_ = m_t;
    m_n_ = m_n;
    const auto lam_t = eigenvalues(m_t, box.spacing_transverse());
    const auto lam_n = eigenvalues(m_n, box.spacing_normal());
    const Index per_slice = box.transverse_interior_count();
    inverse_.resize(per_slice * m_n);
    for (int j = 0; j < m_n; ++j)
      for (Index t = 0; t < per_slice; ++t) {
        double lt = 0.0;
        if (transverse_dims_ == 1) {
          lt = lam_t[t];
        } else {
          lt = lam_t[t / m_t] + lam_t[t % m_t];
        }
        inverse_[Index(j) * per_slice + t] = 1.0 / (lt + lam_n[j] + shift);
      }
    fft_.SetFlag(Eigen::FFT<double>::Unscaled);
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& r) {
    Eigen::VectorXd v = r;
    transform_all(v);
    v.array() *= inverse_.array();
    transform_all(v);
    // DST-I is its own inverse up to 2/(m+1) per axis.
    double scale = 2.0 / (m_n_ + 1);
    for (int a = 0; a < transverse_dims_; ++a) scale *= 2.0 / (m_t_ + 1);
    return v * scale;
  }

 private:
  static std::vector<double> eigenvalues(int m, double h) {
    std::vector<double> out(m);
    for (int k = 1; k <= m; ++k) {
      const double s = std::sin(std::numbers::pi * k / (2.0 * (m + 1)));
      out[k - 1] = 4.0 / (h * h) * s * s;
    }
    return out;
  }

  // Unnormalized DST-I, S_k = sum_j x_j sin(pi j k / (m+1)), on lines of `v`.
  void dst_lines(Eigen::VectorXd& v, int m, Index count, Index stride, Index line_step, Index block_count,
                 Index block_step) {
    const int n = 2 * (m + 1);
    in_.assign(n, 0.0);
    for (Index b = 0; b < block_count; ++b)
      for (Index line = 0; line < count; ++line) {
        const Index base = b * block_step + line * line_step;
        in_[0] = 0.0;
        in_[m + 1] = 0.0;
        for (int j = 1; j <= m; ++j) {
          const double x = v[base + Index(j - 1) * stride];
          in_[j] = x;
          in_[n - j] = -x;
        }
        fft_.fwd(out_, in_);
        for (int k = 1; k <= m; ++k) v[base + Index(k - 1) * stride] = -0.5 * out_[k].imag();
      }
  }

  void transform_all(Eigen::VectorXd& v) {
    const Index per_slice = box_.transverse_interior_count();
    if (transverse_dims_ == 1) {
      dst_lines(v, m_t_, 1, 1, 0, m_n_, per_slice);
    } else {
      const Index mt = m_t_;
      dst_lines(v, m_t_, mt, 1, mt, m_n_, per_slice);  // last transverse axis
      dst_lines(v, m_t_, mt, mt, 1, m_n_, per_slice);  // first transverse axis
    }
    dst_lines(v, m_n_, per_slice, per_slice, 1, 1, 0);  // normal axis
  }

  const BoxGrid& box_;
  int transverse_dims_ = 1;
  int m_t_ = 0;
  int m_n_ = 0;
  Eigen::VectorXd inverse_;
  Eigen::FFT<double> fft_;
  std::vector<double> in_;
  std::vector<Complex> out_;
};

// Kinetic edge sum and interface sum of the discrete form on a full field (walls zero).
double kinetic_part(const BoxGrid& box, const Eigen::MatrixXd& u) {
  const Grid& g = box.transverse();
  const int n = g.n_per_axis();
  const double ht = box.spacing_transverse();
  const double hn = box.spacing_normal();
  double sum_t = 0.0;
  double sum_n = 0.0;
  for (Index cell = 0; cell < g.cell_count(); ++cell) {
    const auto idx = g.axis_indices(cell);
    for (int a = 0; a < g.dim(); ++a) {
      const int next = idx[a] + 1;
      if (next == n) {
        sum_t += u.row(cell).squaredNorm();
        continue;
      }
      const Index nb = a == 0 ? g.flat_index(next, idx[1]) : g.flat_index(idx[0], next);
      sum_t += (u.row(nb) - u.row(cell)).squaredNorm();
    }
    for (Index j = 0; j + 1 < u.cols(); ++j) {
      const double d = u(cell, j + 1) - u(cell, j);
      sum_n += d * d;
    }
  }
  return (sum_t / (ht * ht) + sum_n / (hn * hn)) * box.cell_volume();
}

Eigen::MatrixXd walled_values(const BoxGrid& box, const SliceField<double>& u) {
  return box.to_field(box.to_interior(u)).values();
}

}  // namespace

SurfaceSpec SurfaceSpec::graph(RealGridFunction xi, double lipschitz_bound) {
  if (!(lipschitz_bound >= 0.0)) throw std::invalid_argument("surface: lipschitz bound must be nonnegative");
  const Grid& g = xi.grid();
  for (Index c = 0; c < g.cell_count(); ++c) {
    if (on_outer_ring(g, c) && xi[c] != 0.0)
      throw std::invalid_argument("surface: xi must vanish next to the box boundary (cell " + std::to_string(c) + ")");
    const auto grad = forward_gradient(xi, c);
    for (double d : grad)
      if (std::abs(d) > lipschitz_bound * (1.0 + 1e-12))
        throw std::invalid_argument("surface: one-sided slope " + std::to_string(d) + " exceeds the lipschitz bound");
  }
  SurfaceSpec s;
  s.kind = SurfaceKind::graph;
  s.xi = std::move(xi);
  s.lipschitz_bound = lipschitz_bound;
  return s;
}

FdOperator::FdOperator(Coupling coupling, SurfaceSpec surface, BoxGrid box)
    : coupling_(std::move(coupling)), surface_(std::move(surface)), box_(std::move(box)) {
  const Grid& g = box_.transverse();
  if (!(coupling_.grid() == g)) throw std::invalid_argument("fd operator: coupling grid differs from the box");
  if (surface_.kind == SurfaceKind::graph && !(surface_.xi && surface_.xi->grid() == g))
    throw std::invalid_argument("fd operator: graph surface needs xi on the transverse grid");

  const int n_normal = box_.n_normal();
  const double hn = box_.spacing_normal();
  surface_nodes_.assign(g.cell_count(), box_.interface_index());
  surface_weights_ = Eigen::VectorXd::Ones(g.cell_count());
  if (surface_.kind == SurfaceKind::graph) {
    for (Index c = 0; c < g.cell_count(); ++c) {
      const double xi = (*surface_.xi)[c];
      const long j = box_.interface_index() + std::lround(xi / hn);
      if (j < 1 || j > n_normal - 1) throw std::invalid_argument("fd operator: surface exits the box");
      surface_nodes_[c] = int(j);
      const auto grad = forward_gradient(*surface_.xi, c);
      surface_weights_[c] = std::sqrt(1.0 + grad[0] * grad[0] + grad[1] * grad[1]);
    }
  }

  const Eigen::VectorXd alpha = sample_coupling(coupling_).samples();
  const int n = g.n_per_axis();
  const double ct = 1.0 / (box_.spacing_transverse() * box_.spacing_transverse());
  const double cn = 1.0 / (hn * hn);
  const Index unknowns = box_.interior_count();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(std::size_t(unknowns) * (2 * box_.dim() + 1));
  for (Index u = 0; u < unknowns; ++u) {
    const auto [cell, j] = box_.interior_location(u);
    const auto idx = g.axis_indices(cell);
    double diag = 2.0 * g.dim() * ct + 2.0 * cn;
    if (j == surface_nodes_[cell]) diag -= alpha[cell] * surface_weights_[cell] / hn;
    for (int a = 0; a < g.dim(); ++a) {
      for (int step : {-1, 1}) {
        const int i = idx[a] + step;
        if (i <= 0 || i >= n) continue;
        const Index nb = a == 0 ? g.flat_index(i, idx[1]) : g.flat_index(idx[0], i);
        entries.emplace_back(u, box_.interior_index(nb, j), -ct);
      }
    }
    for (int step : {-1, 1}) {
      const int jj = j + step;
      if (jj <= 0 || jj >= n_normal) continue;
      entries.emplace_back(u, box_.interior_index(cell, jj), -cn);
    }
    entries.emplace_back(u, u, diag);
  }
  matrix_.resize(unknowns, unknowns);
  matrix_.setFromTriplets(entries.begin(), entries.end());
  matrix_.makeCompressed();
  if (asymmetry() != 0.0) throw std::logic_error("fd operator: assembled matrix is not symmetric");
}

double FdOperator::asymmetry() const {
  const Eigen::SparseMatrix<double> a = matrix_;
  const Eigen::SparseMatrix<double> at = matrix_.transpose();
  const Eigen::SparseMatrix<double> diff = a - at;
  return diff.nonZeros() == 0 ? 0.0 : diff.coeffs().cwiseAbs().maxCoeff();
}

double FdOperator::scale() const {
  double best = 0.0;
  for (Index r = 0; r < matrix_.outerSize(); ++r) {
    double s = 0.0;
    for (decltype(matrix_)::InnerIterator it(matrix_, r); it; ++it) s += std::abs(it.value());
    best = std::max(best, s);
  }
  return best;
}

FdOperator assemble(const Coupling& coupling, const SurfaceSpec& surface, const BoxGrid& box) {
  return FdOperator(coupling, surface, box);
}

OracleSpectrum lowest_eigenpairs(const FdOperator& op, const SolverConfig& solver, int count) {
  if (count < 1) throw std::invalid_argument("lowest_eigenpairs: count must be positive");
  const BoxGrid& box = op.box();
  const Index n = box.interior_count();
  EigenPairs pairs;
  if (solver.force_dense || n <= solver.dense_max_size) {
    pairs = dense_lowest(Eigen::MatrixXd(op.matrix()), count);
  } else {
    const Eigen::VectorXd alpha_w =
        sample_coupling(op.coupling()).samples().cwiseProduct(op.surface_weights());
    const double a = std::max(alpha_w.maxCoeff(), 0.0);
    DstPoisson poisson(box, 0.25 * a * a + 1.0);
    auto precondition = [&](const Eigen::MatrixXd& R) {
      Eigen::MatrixXd out(R.rows(), R.cols());
      for (Index c = 0; c < R.cols(); ++c) out.col(c) = poisson.solve(R.col(c));
      return out;
    };
    auto apply = [&](const Eigen::MatrixXd& X) {
      Eigen::MatrixXd out(X.rows(), X.cols());
      for (Index c = 0; c < X.cols(); ++c) out.col(c) = op.matrix() * X.col(c);
      return out;
    };
    const int block = int(std::min<Index>(count + 1, n));
    pairs = lobpcg(apply, precondition, deterministic_start_block(n, block, solver.seed), std::min(count, block),
                   solver.tol, solver.max_iter, op.scale());
  }

  const int k = std::min<int>(count, int(pairs.values.size()));
  OracleSpectrum out;
  out.eigenvalues = pairs.values.head(k);
  out.residuals = pairs.residuals.head(k);
  out.iterations = pairs.iterations;
  out.method = pairs.method;
  const double to_l2 = 1.0 / std::sqrt(box.cell_volume());
  for (int i = 0; i < k; ++i) out.eigenvectors.push_back(box.to_field(pairs.vectors.col(i) * to_l2));
  return out;
}

GroundStateReport ground_state_checks(const OracleSpectrum& spectrum, const FdOperator& op, int index,
                                      double relative_gap_tol) {
  const Index count = spectrum.eigenvalues.size();
  if (index < 0 || index >= count) throw std::invalid_argument("ground_state_checks: eigenpair index out of range");
  if (count < 2) throw std::invalid_argument("ground_state_checks: need at least two eigenpairs for the gap");
  const BoxGrid& box = op.box();
  const double lambda = spectrum.eigenvalues[index];

  GroundStateReport r;
  double gap = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < count; ++i)
    if (i != index) gap = std::min(gap, std::abs(spectrum.eigenvalues[i] - lambda));
  r.gap = gap;
  r.relative_gap = lambda != 0.0 ? gap / std::abs(lambda) : std::numeric_limits<double>::infinity();
  r.gap_tol = relative_gap_tol * std::abs(spectrum.eigenvalues[0]);
  r.simple = gap > r.gap_tol;

  // Unit-Euclidean scaling, where the residual bound applies entrywise.
  const Eigen::VectorXd v = box.to_interior(spectrum.eigenvectors[index]) * std::sqrt(box.cell_volume());
  r.noise_floor = gap > 0.0 ? 2.0 * spectrum.residuals[index] / gap : std::numeric_limits<double>::infinity();
  double mn = std::numeric_limits<double>::infinity();
  for (Index u = 0; u < v.size(); ++u) {
    const auto [cell, j] = box.interior_location(u);
    if (j == op.surface_nodes()[cell]) continue;
    mn = std::min(mn, v[u]);
  }
  r.min_off_surface = mn;
  r.max_value = v.maxCoeff();
  r.positivity_margin = r.max_value != 0.0 ? mn / r.max_value : 0.0;
  r.sign_definite = mn >= -r.noise_floor;
  return r;
}

double dirichlet_energy(const BoxGrid& box, const SliceField<double>& u) {
  return kinetic_part(box, walled_values(box, u));
}

double box_norm(const BoxGrid& box, const SliceField<double>& u) {
  return std::sqrt(u.values().squaredNorm() * box.cell_volume());
}

double discrete_form(const FdOperator& op, const Coupling& coupling, const SliceField<double>& u) {
  const BoxGrid& box = op.box();
  if (!(coupling.grid() == box.transverse())) throw std::invalid_argument("discrete_form: coupling grid mismatch");
  const Eigen::MatrixXd values = walled_values(box, u);
  const Eigen::VectorXd alpha = sample_coupling(coupling).samples();
  const Grid& g = box.transverse();
  double interface = 0.0;
  for (Index cell = 0; cell < g.cell_count(); ++cell) {
    if (box.is_transverse_wall(cell)) continue;
    const double s = values(cell, op.surface_nodes()[cell]);
    interface += alpha[cell] * op.surface_weights()[cell] * s * s;
  }
  return kinetic_part(box, values) - interface * box.cell_volume() / box.spacing_normal();
}

double discrete_form(const FdOperator& op, const SliceField<double>& u) { return discrete_form(op, op.coupling(), u); }

std::pair<double, double> steiner_rayleigh_check(const OracleSpectrum& spectrum, const Coupling& coupling,
                                                 const FdOperator& op) {
  if (op.surface().kind != SurfaceKind::hyperplane)
    throw std::invalid_argument("steiner_rayleigh_check: hyperplane surface only");
  const auto report = ground_state_checks(spectrum, op, 0);
  if (!report.sign_definite)
    throw std::invalid_argument("steiner_rayleigh_check: ground state is not sign-definite");
  const BoxGrid& box = op.box();
  const Grid& g = box.transverse();
  const SliceField<double>& u1 = spectrum.eigenvectors[0];

  // |u1| equals u1 up to the noise floor and has the same norm and no larger energy.
  const SliceField<double> u_abs(g, u1.normal_coordinates(), walled_values(box, u1).cwiseAbs());
  const auto ranking = RankedCells::interior(g);
  const SliceField<double> u_sharp = steiner_symmetrize(u_abs, ranking);
  const Coupling rearranged = rearranged_positive_part(coupling, ranking);

  const double norm_sharp = box_norm(box, u_sharp);
  const double norm_u = box_norm(box, u1);
  return {discrete_form(op, rearranged, u_sharp) / (norm_sharp * norm_sharp),
          discrete_form(op, coupling, u1) / (norm_u * norm_u)};
}

double stencil_residual(const FdOperator& op, double lambda, const SliceField<double>& u) {
  const Eigen::VectorXd v = op.box().to_interior(u);
  const double nv = v.norm();
  if (!(nv > 0.0)) throw std::invalid_argument("stencil_residual: zero field");
  return (op.matrix() * v - lambda * v).norm() / nv;
}

}  // namespace bsdelta
