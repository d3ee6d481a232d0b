#include "bsdelta/potential.hpp"

namespace bsdelta {

Coupling::Coupling(double background, RealGridFunction perturbation, double support_radius)
    : background_(background), perturbation_(std::move(perturbation)), support_radius_(support_radius) {
  const Grid& g = perturbation_.grid();
  if (!std::isfinite(background)) throw std::invalid_argument("coupling: background must be finite");
  if (!(support_radius >= 0.0) || !(support_radius < g.half_extent()))
    throw std::invalid_argument("coupling: support radius must lie in [0, half_extent)");
  for (Index c = 0; c < g.cell_count(); ++c) {
    if (perturbation_[c] != 0.0 && g.sup_radius(c) > support_radius)
      throw std::invalid_argument("coupling: perturbation nonzero outside support radius at cell " +
                                  std::to_string(c));
  }
}

Coupling constant_coupling(double alpha0, const Grid& grid) { return {alpha0, RealGridFunction(grid), 0.0}; }

Coupling indicator_coupling(double beta, Region region, double radius, std::array<double, 2> center, double alpha0,
                            const Grid& grid) {
  if (!(radius >= 0.0)) throw std::invalid_argument("indicator coupling: radius must be nonnegative");
  double reach = 0.0;
  for (int a = 0; a < grid.dim(); ++a) reach = std::max(reach, std::abs(center[a]) + radius);
  if (!(reach < grid.half_extent()))
    throw std::invalid_argument("indicator coupling: region touches the box boundary");
  if (beta == 0.0) return constant_coupling(alpha0, grid);

  auto alpha1 = sample(grid, [&](std::array<double, 2> x) {
    double d = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const double t = x[a] - center[a];
      d = region == Region::ball ? d + t * t : std::max(d, std::abs(t));
    }
    const bool inside = region == Region::ball ? d < radius * radius : d < radius;
    return inside ? beta : 0.0;
  });
  return {alpha0, std::move(alpha1), reach};
}

Coupling coupling_from_samples(double alpha0, const RealGridFunction& perturbation) {
  const Grid& g = perturbation.grid();
  double reach = 0.0;
  for (Index c = 0; c < g.cell_count(); ++c)
    if (perturbation[c] != 0.0) reach = std::max(reach, g.sup_radius(c));
  return {alpha0, perturbation, reach};
}

Coupling positive_part(const Coupling& c) {
  RealGridFunction p(c.grid(), c.perturbation().samples().cwiseMax(0.0));
  return {c.background(), std::move(p), c.support_radius()};
}

RealGridFunction sample_coupling(const Coupling& c) {
  return {c.grid(), c.perturbation().samples().array() + c.background()};
}

double perturbation_integral(const Coupling& c) { return c.perturbation().samples().sum() * c.grid().cell_volume(); }

}  // namespace bsdelta
