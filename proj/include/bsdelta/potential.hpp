#pragma once

#include "bsdelta/grid.hpp"

#include <array>

namespace bsdelta {

/**
 * Interaction strength alpha = alpha0 + alpha1 on the hyperplane, with a
 * constant background alpha0 and a real perturbation alpha1 that vanishes
 * outside the centered box [-R, R]^dim, R = support_radius < L.
 */
class Coupling {
 public:
  Coupling(double background, RealGridFunction perturbation, double support_radius);

  double background() const { return background_; }
  const RealGridFunction& perturbation() const { return perturbation_; }
  double support_radius() const { return support_radius_; }
  const Grid& grid() const { return perturbation_.grid(); }

 private:
  double background_;
  RealGridFunction perturbation_;
  double support_radius_;
};

enum class Region { ball, box };

Coupling constant_coupling(double alpha0, const Grid& grid);

/// alpha1 = beta * indicator of {|x - center| < radius} (ball) or {|x - center|_inf < radius} (box), sampled at lattice points.
Coupling indicator_coupling(double beta, Region region, double radius, std::array<double, 2> center, double alpha0,
                            const Grid& grid);

/// Wraps arbitrary samples; support radius is the smallest one covering every nonzero sample.
Coupling coupling_from_samples(double alpha0, const RealGridFunction& perturbation);

Coupling positive_part(const Coupling& c);

/// alpha0 + alpha1 as one field.
RealGridFunction sample_coupling(const Coupling& c);

/// sum alpha1 h^dim.
double perturbation_integral(const Coupling& c);

}  // namespace bsdelta
