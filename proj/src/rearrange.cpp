#include "bsdelta/rearrange.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace bsdelta {

namespace {

std::vector<Index> rank_cells(const Grid& grid, std::vector<Index> cells) {
  std::stable_sort(cells.begin(), cells.end(), [&](Index a, Index b) {
    const auto ra = grid.squared_lattice_radius(a);
    const auto rb = grid.squared_lattice_radius(b);
    return ra != rb ? ra < rb : a < b;
  });
  return cells;
}

Eigen::VectorXd rearrange_samples(const Eigen::VectorXd& u, const RankedCells& ranking) {
  std::vector<char> ranked(u.size(), 0);
  for (Index c : ranking.order()) ranked[c] = 1;
  std::vector<double> values;
  values.reserve(ranking.order().size());
  for (Index c = 0; c < u.size(); ++c) {
    if (u[c] < 0.0)
      throw std::invalid_argument("rearrangement: negative sample " + std::to_string(u[c]) + " at index " +
                                  std::to_string(c));
    if (!ranked[c]) {
      if (u[c] != 0.0)
        throw std::invalid_argument("rearrangement: nonzero sample outside the ranked cells at index " +
                                    std::to_string(c));
      continue;
    }
    values.push_back(u[c]);
  }
  std::sort(values.begin(), values.end(), std::greater<>());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(u.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[ranking.order()[i]] = values[i];
  return out;
}

}  // namespace

RankedCells::RankedCells(const Grid& grid, std::vector<Index> cells) : grid_(grid), order_(rank_cells(grid, std::move(cells))) {}

RankedCells::RankedCells(const Grid& grid)
    : RankedCells(grid, [&] {
        std::vector<Index> all(grid.cell_count());
        std::iota(all.begin(), all.end(), Index(0));
        return all;
      }()) {}

RankedCells RankedCells::interior(const Grid& grid) {
  std::vector<Index> cells;
  for (Index c = 0; c < grid.cell_count(); ++c) {
    const auto idx = grid.axis_indices(c);
    if (idx[0] == 0 || (grid.dim() == 2 && idx[1] == 0)) continue;
    cells.push_back(c);
  }
  return RankedCells(grid, std::move(cells));
}

RealGridFunction symmetric_decreasing_rearrangement(const RealGridFunction& u, const RankedCells& ranking) {
  if (!(u.grid() == ranking.grid())) throw std::invalid_argument("rearrangement: grid mismatch");
  return {u.grid(), rearrange_samples(u.samples(), ranking)};
}

std::pair<double, double> hardy_littlewood_pairing(const RealGridFunction& u, const RealGridFunction& v,
                                                   const RankedCells& ranking) {
  if (!(u.grid() == v.grid())) throw std::invalid_argument("hardy_littlewood_pairing: grid mismatch");
  const auto us = symmetric_decreasing_rearrangement(u, ranking);
  const auto vs = symmetric_decreasing_rearrangement(v, ranking);
  return {inner_product(u, v), inner_product(us, vs)};
}

SliceField<double> steiner_symmetrize(const SliceField<double>& u, const RankedCells& transverse_ranking) {
  if (!(u.transverse() == transverse_ranking.grid())) throw std::invalid_argument("steiner: grid mismatch");
  Eigen::MatrixXd out(u.values().rows(), u.values().cols());
  for (Index s = 0; s < u.slice_count(); ++s) out.col(s) = rearrange_samples(u.values().col(s), transverse_ranking);
  return {u.transverse(), u.normal_coordinates(), std::move(out)};
}

Coupling rearranged_positive_part(const Coupling& c, const RankedCells& ranking) {
  return coupling_from_samples(c.background(),
                               symmetric_decreasing_rearrangement(positive_part(c).perturbation(), ranking));
}

}  // namespace bsdelta
