#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bsdelta {

using Complex = std::complex<double>;
using Index = Eigen::Index;

/**
 * Uniform periodic lattice on the box [-L, L)^dim, dim in {1, 2}.
 *
 * Sample j along an axis sits at x_j = -L + j h, so the origin is the sample
 * j = n/2. Cells are stored row-major (the last axis runs fastest). The dual
 * lattice is k_m = (pi / L) m with m in [-n/2, n/2) in DFT storage order; the
 * unpaired Nyquist index n/2 maps to m = -n/2.
 */
class Grid {
 public:
  Grid(int dim, int n_per_axis, double half_extent);

  int dim() const { return dim_; }
  int n_per_axis() const { return n_; }
  double half_extent() const { return half_extent_; }
  double spacing() const { return 2.0 * half_extent_ / n_; }
  double cell_volume() const { return std::pow(spacing(), dim_); }
  double dual_spacing() const { return std::numbers::pi / half_extent_; }
  double dual_cell_volume() const { return std::pow(dual_spacing(), dim_); }
  Index cell_count() const { return dim_ == 1 ? Index(n_) : Index(n_) * n_; }

  double coordinate(int j) const { return -half_extent_ + j * spacing(); }
  /// Signed frequency index of storage slot j.
  int frequency_index(int j) const { return j < n_ / 2 ? j : j - n_; }
  double frequency(int j) const { return dual_spacing() * frequency_index(j); }

  std::array<int, 2> axis_indices(Index cell) const {
    if (dim_ == 1) return {int(cell), 0};
    return {int(cell / n_), int(cell % n_)};
  }
  Index flat_index(int i0, int i1 = 0) const { return dim_ == 1 ? Index(i0) : Index(i0) * n_ + i1; }

  std::array<double, 2> position(Index cell) const;
  /// Squared distance from the origin in units of h^2; exact integer.
  long long squared_lattice_radius(Index cell) const;
  double radius(Index cell) const { return spacing() * std::sqrt(double(squared_lattice_radius(cell))); }
  /// Max-norm of the cell position.
  double sup_radius(Index cell) const;
  /// |k|^2 of frequency storage slot `cell`.
  double frequency_norm_sq(Index cell) const;

  bool operator==(const Grid&) const = default;

 private:
  int dim_;
  int n_;
  double half_extent_;
};

Grid make_grid(int dim, int n_per_axis, double half_extent);

/**
 * Samples on a Grid. The same type carries physical-space samples and
 * frequency-space samples (the output of transform()); which view a value is
 * in is up to the caller.
 */
template <typename Scalar>
class BasicGridFunction {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit BasicGridFunction(const Grid& grid) : grid_(grid), samples_(Vector::Zero(grid.cell_count())) {}

  BasicGridFunction(const Grid& grid, Vector samples) : grid_(grid), samples_(std::move(samples)) {
    if (samples_.size() != grid_.cell_count())
      throw std::invalid_argument("grid function: expected " + std::to_string(grid_.cell_count()) +
                                  " samples, got " + std::to_string(samples_.size()));
    if (!samples_.allFinite()) throw std::invalid_argument("grid function: non-finite sample");
  }

  const Grid& grid() const { return grid_; }
  const Vector& samples() const { return samples_; }
  Index size() const { return samples_.size(); }
  Scalar operator[](Index i) const { return samples_[i]; }

 private:
  Grid grid_;
  Vector samples_;
};

using GridFunction = BasicGridFunction<Complex>;
using RealGridFunction = BasicGridFunction<double>;

/// Evaluates f(position) at every cell.
template <typename F>
RealGridFunction sample(const Grid& grid, F&& f) {
  Eigen::VectorXd values(grid.cell_count());
  for (Index c = 0; c < grid.cell_count(); ++c) values[c] = f(grid.position(c));
  return {grid, std::move(values)};
}

/// Evaluates m(|k|^2) at every frequency slot.
template <typename F>
Eigen::VectorXd frequency_multiplier(const Grid& grid, F&& m) {
  Eigen::VectorXd values(grid.cell_count());
  for (Index c = 0; c < grid.cell_count(); ++c) values[c] = m(grid.frequency_norm_sq(c));
  return values;
}

GridFunction to_complex(const RealGridFunction& f);
/// Real part; throws if any imaginary part exceeds `imag_tol` in magnitude.
RealGridFunction real_part(const GridFunction& f, double imag_tol = std::numeric_limits<double>::infinity());

enum class Direction { forward, inverse };

/**
 * Unitary DFT approximating the continuum Fourier transform,
 *   f^(k_m) = (h / sqrt(2 pi))^dim sum_j f(x_j) exp(-i k_m . x_j),
 * with inverse weight (dk / sqrt(2 pi))^dim. Round trip is the identity and
 * sum |f|^2 h^dim = sum |f^|^2 dk^dim.
 */
GridFunction transform(const GridFunction& f, Direction direction);

enum class NormKind { L2, Hhalf };

/// L2: physical samples weighted by h^dim. Hhalf: multiplier (1+|k|^2)^(1/2) on the frequency side.
double norm(const GridFunction& f, NormKind kind);

/// Volume-weighted <f, g> = sum f conj(g) h^dim.
Complex inner_product(const GridFunction& f, const GridFunction& g);
double inner_product(const RealGridFunction& f, const RealGridFunction& g);

/// F^{-1} [m F f] for a multiplier in storage order; phases and weights cancel, so this is the raw DFT pair.
GridFunction fourier_multiply(const GridFunction& f, const Eigen::VectorXd& multiplier);
Eigen::VectorXd fourier_multiply(const Grid& grid, const Eigen::VectorXd& real_samples, const Eigen::VectorXd& multiplier);

/// Sum over frequency slots of m |f^|^2 dk^dim.
double spectral_quadratic_form(const GridFunction& f, const Eigen::VectorXd& multiplier);

}  // namespace bsdelta
