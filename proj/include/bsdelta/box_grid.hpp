#pragma once

#include "bsdelta/grid.hpp"

#include <vector>

namespace bsdelta {

/**
 * Samples of a function on R^{d-1} x R stored slice by slice: column s of
 * `values` is the transverse GridFunction at normal coordinate
 * normal_coordinates[s].
 */
template <typename Scalar>
class SliceField {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  SliceField(const Grid& transverse, std::vector<double> normal_coordinates, Matrix values)
      : transverse_(transverse), normal_(std::move(normal_coordinates)), values_(std::move(values)) {
    if (values_.rows() != transverse_.cell_count() || values_.cols() != Index(normal_.size()))
      throw std::invalid_argument("slice field: shape does not match grid and slice count");
    if (!values_.allFinite()) throw std::invalid_argument("slice field: non-finite sample");
  }

  const Grid& transverse() const { return transverse_; }
  const std::vector<double>& normal_coordinates() const { return normal_; }
  const Matrix& values() const { return values_; }
  Index slice_count() const { return values_.cols(); }
  BasicGridFunction<Scalar> slice(Index s) const { return {transverse_, values_.col(s)}; }

 private:
  Grid transverse_;
  std::vector<double> normal_;
  Matrix values_;
};

/**
 * Dirichlet box for the finite-difference operator on R^d, d = transverse
 * dim + 1. Transverse nodes are the Grid samples; nodes with any axis index 0
 * lie on the wall x = -L (the wall x = +L is the implicit index n). Normal
 * nodes are x_d = -L_n + j h_n, j = 0..n_normal, walls at j = 0 and
 * j = n_normal, and the interface x_d = 0 at j = n_normal / 2.
 */
class BoxGrid {
 public:
  BoxGrid(const Grid& transverse, int n_normal, double half_extent_normal);

  int dim() const { return transverse_.dim() + 1; }
  const Grid& transverse() const { return transverse_; }
  int n_normal() const { return n_normal_; }
  double half_extent_transverse() const { return transverse_.half_extent(); }
  double half_extent_normal() const { return half_extent_normal_; }
  double spacing_transverse() const { return transverse_.spacing(); }
  double spacing_normal() const { return 2.0 * half_extent_normal_ / n_normal_; }
  double spacing_max() const { return std::max(spacing_transverse(), spacing_normal()); }
  double cell_volume() const { return transverse_.cell_volume() * spacing_normal(); }

  int interface_index() const { return n_normal_ / 2; }
  int normal_node_count() const { return n_normal_ + 1; }
  double normal_coordinate(int j) const;
  std::vector<double> normal_coordinates() const;

  bool is_transverse_wall(Index cell) const;

  /// Interior unknowns: normal index 1..n_normal-1 outermost, transverse interior cells inner (row-major).
  Index interior_count() const { return transverse_interior_count() * (n_normal_ - 1); }
  Index transverse_interior_count() const;
  int transverse_interior_per_axis() const { return transverse_.n_per_axis() - 1; }
  Index interior_index(Index cell, int j) const;
  /// Inverse of interior_index: (transverse cell, normal node).
  std::pair<Index, int> interior_location(Index unknown) const;

  /// Scatters interior unknowns onto all nodes (walls zero).
  SliceField<double> to_field(const Eigen::VectorXd& interior) const;
  /// Gathers interior unknowns; field must sit on this box's nodes.
  Eigen::VectorXd to_interior(const SliceField<double>& field) const;

  bool operator==(const BoxGrid&) const = default;

 private:
  Grid transverse_;
  int n_normal_;
  double half_extent_normal_;
};

/// Smallest even n_normal with spacing not above max_normal_spacing.
BoxGrid make_box_grid(const Grid& transverse, double half_extent_normal, double max_normal_spacing);

}  // namespace bsdelta
