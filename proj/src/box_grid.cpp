#include "bsdelta/box_grid.hpp"

namespace bsdelta {

BoxGrid::BoxGrid(const Grid& transverse, int n_normal, double half_extent_normal)
    : transverse_(transverse), n_normal_(n_normal), half_extent_normal_(half_extent_normal) {
  if (n_normal < 4 || n_normal % 2 != 0)
    throw std::invalid_argument("box grid: n_normal must be even and >= 4 so x_d = 0 is a node");
  if (!(half_extent_normal > 0.0) || !std::isfinite(half_extent_normal))
    throw std::invalid_argument("box grid: normal half extent must be positive");
}

BoxGrid make_box_grid(const Grid& transverse, double half_extent_normal, double max_normal_spacing) {
  if (!(max_normal_spacing > 0.0)) throw std::invalid_argument("box grid: spacing must be positive");
  int n = int(std::ceil(2.0 * half_extent_normal / max_normal_spacing - 1e-9));
  if (n % 2) ++n;
  return BoxGrid(transverse, std::max(n, 4), half_extent_normal);
}

double BoxGrid::normal_coordinate(int j) const { return -half_extent_normal_ + j * spacing_normal(); }

std::vector<double> BoxGrid::normal_coordinates() const {
  std::vector<double> xs(normal_node_count());
  for (int j = 0; j < normal_node_count(); ++j) xs[j] = normal_coordinate(j);
  xs[interface_index()] = 0.0;
  return xs;
}

bool BoxGrid::is_transverse_wall(Index cell) const {
  const auto idx = transverse_.axis_indices(cell);
  return idx[0] == 0 || (transverse_.dim() == 2 && idx[1] == 0);
}

Index BoxGrid::transverse_interior_count() const {
  const Index m = transverse_interior_per_axis();
  return transverse_.dim() == 1 ? m : m * m;
}

Index BoxGrid::interior_index(Index cell, int j) const {
  const auto idx = transverse_.axis_indices(cell);
  const Index m = transverse_interior_per_axis();
  const Index t = transverse_.dim() == 1 ? Index(idx[0] - 1) : Index(idx[0] - 1) * m + (idx[1] - 1);
  return Index(j - 1) * transverse_interior_count() + t;
}

std::pair<Index, int> BoxGrid::interior_location(Index unknown) const {
  const Index per_slice = transverse_interior_count();
  const int j = int(unknown / per_slice) + 1;
  const Index t = unknown % per_slice;
  const Index m = transverse_interior_per_axis();
  if (transverse_.dim() == 1) return {t + 1, j};
  return {transverse_.flat_index(int(t / m) + 1, int(t % m) + 1), j};
}

SliceField<double> BoxGrid::to_field(const Eigen::VectorXd& interior) const {
  if (interior.size() != interior_count()) throw std::invalid_argument("box grid: interior vector size mismatch");
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(transverse_.cell_count(), normal_node_count());
  for (Index u = 0; u < interior.size(); ++u) {
    const auto [cell, j] = interior_location(u);
    values(cell, j) = interior[u];
  }
  return {transverse_, normal_coordinates(), std::move(values)};
}

Eigen::VectorXd BoxGrid::to_interior(const SliceField<double>& field) const {
  if (!(field.transverse() == transverse_) || field.slice_count() != normal_node_count())
    throw std::invalid_argument("box grid: field does not live on this box");
  Eigen::VectorXd out(interior_count());
  for (Index u = 0; u < out.size(); ++u) {
    const auto [cell, j] = interior_location(u);
    out[u] = field.values()(cell, j);
  }
  return out;
}

}  // namespace bsdelta
