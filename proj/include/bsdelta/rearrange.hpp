#pragma once

#include "bsdelta/box_grid.hpp"
#include "bsdelta/grid.hpp"
#include "bsdelta/potential.hpp"

#include <utility>
#include <vector>

namespace bsdelta {

/**
 * Cells sorted by distance of their lattice point from the origin, ties by
 * flat index. A ranking may cover a subset of the grid (interior()), in which
 * case rearrangements act on that subset and leave the rest at zero.
 */
class RankedCells {
 public:
  explicit RankedCells(const Grid& grid);
  /// Ranking of the cells off the Dirichlet wall (every axis index >= 1).
  static RankedCells interior(const Grid& grid);

  const Grid& grid() const { return grid_; }
  const std::vector<Index>& order() const { return order_; }
  Index size() const { return Index(order_.size()); }
  bool covers_grid() const { return size() == grid_.cell_count(); }

 private:
  RankedCells(const Grid& grid, std::vector<Index> cells);
  Grid grid_;
  std::vector<Index> order_;
};

/// Places the i-th largest sample at the i-th ranked cell. Rejects negative samples.
RealGridFunction symmetric_decreasing_rearrangement(const RealGridFunction& u, const RankedCells& ranking);

/// (sum u v h^dim, sum u* v* h^dim).
std::pair<double, double> hardy_littlewood_pairing(const RealGridFunction& u, const RealGridFunction& v,
                                                   const RankedCells& ranking);

/// Slice-wise rearrangement in the transverse variables at every normal coordinate.
SliceField<double> steiner_symmetrize(const SliceField<double>& u, const RankedCells& transverse_ranking);

/// alpha0 + ((alpha1)_+)^*: background kept, positive part of the perturbation rearranged.
Coupling rearranged_positive_part(const Coupling& c, const RankedCells& ranking);

}  // namespace bsdelta
