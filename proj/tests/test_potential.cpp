#include "bsdelta/potential.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace bsdelta;

namespace {

std::vector<double> sorted_samples(const RealGridFunction& f) {
  std::vector<double> v(f.samples().data(), f.samples().data() + f.size());
  std::sort(v.begin(), v.end());
  return v;
}

void check_support(const Coupling& c) {
  for (Index i = 0; i < c.grid().cell_count(); ++i)
    if (c.grid().sup_radius(i) > c.support_radius()) CHECK(c.perturbation()[i] == 0.0);
  CHECK(c.support_radius() < c.grid().half_extent());
}

}  // namespace

TEST_CASE("constant couplings") {
  const Grid g(1, 32, 4.0);
  for (double a0 : {2.0, 0.0, -1.0}) {
    const auto c = constant_coupling(a0, g);
    CHECK(c.background() == a0);
    CHECK(c.perturbation().samples().isZero(0.0));
    CHECK((sample_coupling(c).samples().array() == a0).all());
    check_support(c);
  }
}

TEST_CASE("ball indicator sampling rule") {
  const Grid g(2, 32, 4.0);
  const auto c = indicator_coupling(3.0, Region::ball, 1.0, {0.0, 0.0}, 0.0, g);
  for (Index i = 0; i < g.cell_count(); ++i) {
    const auto x = g.position(i);
    const bool inside = x[0] * x[0] + x[1] * x[1] < 1.0;
    CHECK(c.perturbation()[i] == (inside ? 3.0 : 0.0));
  }
  check_support(c);

  // Lattice-aligned shift: the same multiset of samples.
  const auto shifted = indicator_coupling(3.0, Region::ball, 1.0, {2.0, 0.0}, 0.0, g);
  CHECK(sorted_samples(shifted.perturbation()) == sorted_samples(c.perturbation()));
  check_support(shifted);
}

TEST_CASE("box indicator and boundary rejection") {
  const Grid g(1, 64, 4.0);
  const auto c = indicator_coupling(2.0, Region::box, 1.5, {0.5, 0.0}, 1.0, g);
  for (Index i = 0; i < g.cell_count(); ++i) {
    const double x = g.position(i)[0];
    CHECK(c.perturbation()[i] == (std::abs(x - 0.5) < 1.5 ? 2.0 : 0.0));
  }
  check_support(c);
  CHECK_THROWS_AS(indicator_coupling(1.0, Region::ball, 4.0, {0.0, 0.0}, 0.0, g), std::invalid_argument);
  CHECK_THROWS_AS(indicator_coupling(1.0, Region::box, 1.0, {3.5, 0.0}, 0.0, g), std::invalid_argument);

  const auto zero = indicator_coupling(0.0, Region::ball, 1.0, {0.0, 0.0}, 1.5, g);
  CHECK(zero.background() == 1.5);
  CHECK(zero.perturbation().samples().isZero(0.0));
}

TEST_CASE("coupling rejects perturbation outside its support radius") {
  const Grid g(1, 16, 2.0);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(16);
  v[1] = 1.0;
  CHECK_THROWS_AS(Coupling(0.0, RealGridFunction(g, v), 0.5), std::invalid_argument);
  CHECK_THROWS_AS(Coupling(0.0, RealGridFunction(g), 2.0), std::invalid_argument);
  const auto c = coupling_from_samples(0.0, RealGridFunction(g, v));
  CHECK(c.support_radius() == doctest::Approx(1.75));
}

TEST_CASE("positive part") {
  const Grid g(1, 64, 4.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(64);
  for (int i = 24; i < 40; ++i) v[i] = u(rng);
  const auto c = coupling_from_samples(0.5, RealGridFunction(g, v));
  const auto p = positive_part(c);
  CHECK(p.background() == 0.5);
  CHECK(perturbation_integral(p) >= perturbation_integral(c));
  CHECK(positive_part(p).perturbation().samples() == p.perturbation().samples());
  CHECK((sample_coupling(p).samples().array() >= 0.5).all());
  check_support(p);

  const auto nonneg = positive_part(indicator_coupling(1.0, Region::ball, 1.0, {0, 0}, 0.0, g));
  CHECK(nonneg.perturbation().samples() == indicator_coupling(1.0, Region::ball, 1.0, {0, 0}, 0.0, g).perturbation().samples());
  const auto neg = positive_part(indicator_coupling(-1.0, Region::ball, 1.0, {0, 0}, 0.0, g));
  CHECK(neg.perturbation().samples().isZero(0.0));
}

TEST_CASE("sample_coupling round trip") {
  const Grid g(2, 16, 4.0);
  const auto c = indicator_coupling(1.0, Region::ball, 1.5, {0.0, 0.0}, 1.0, g);
  const auto s = sample_coupling(c);
  for (Index i = 0; i < g.cell_count(); ++i) {
    CHECK((s[i] == 1.0 || s[i] == 2.0));
    CHECK(s[i] - c.background() == c.perturbation()[i]);
  }
}
