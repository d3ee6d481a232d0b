#include "bsdelta/bsp.hpp"
#include "bsdelta/oracle.hpp"

#include <doctest.h>

#include <random>

using namespace bsdelta;

namespace {

constexpr double pi = std::numbers::pi;

SolverConfig iterative() {
  SolverConfig s;
  s.dense_max_size = 0;
  return s;
}

}  // namespace

TEST_CASE("box grid layout") {
  const Grid g(1, 8, 2.0);
  const BoxGrid box(g, 8, 1.0);
  CHECK(box.dim() == 2);
  CHECK(box.interface_index() == 4);
  CHECK(box.normal_coordinates()[4] == 0.0);
  CHECK(box.interior_count() == 7 * 7);
  for (Index u = 0; u < box.interior_count(); ++u) {
    const auto [cell, j] = box.interior_location(u);
    CHECK(box.interior_index(cell, j) == u);
    CHECK(!box.is_transverse_wall(cell));
  }
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(box.interior_count(), 1.0, 2.0);
  CHECK(box.to_interior(box.to_field(v)) == v);
  CHECK_THROWS_AS(BoxGrid(g, 5, 1.0), std::invalid_argument);
  CHECK(make_box_grid(g, 2.0, 0.3).spacing_normal() <= 0.3);
}

TEST_CASE("assembly is symmetric and matches the discrete form") {
  const Grid g(1, 16, 2.0);
  const BoxGrid box(g, 12, 1.5);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 3.0);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(16);
  for (int i = 5; i < 11; ++i) a[i] = u(rng);
  const auto c = coupling_from_samples(0.7, RealGridFunction(g, a));
  const auto op = assemble(c, SurfaceSpec::hyperplane(), box);
  CHECK(op.asymmetry() == 0.0);
  for (int t = 0; t < 5; ++t) {
    Eigen::VectorXd x(box.interior_count());
    for (auto& v : x) v = u(rng);
    const auto f = box.to_field(x);
    const double quad = x.dot(op.matrix() * x) * box.cell_volume();
    CHECK(discrete_form(op, f) == doctest::Approx(quad).epsilon(1e-12));
  }
}

TEST_CASE("free Laplacian on the unit square") {
  const Grid g(1, 64, 0.5);
  const BoxGrid box(g, 64, 0.5);
  const auto op = assemble(constant_coupling(0.0, g), SurfaceSpec::hyperplane(), box);
  const auto sp = lowest_eigenpairs(op, iterative(), 2);
  CHECK(sp.eigenvalues[0] == doctest::Approx(2.0 * pi * pi).epsilon(0.01));
  // Discrete box mode is known exactly.
  const double h = 1.0 / 64;
  const double exact = 2.0 * 4.0 / (h * h) * std::pow(std::sin(pi * h / 2.0), 2);
  CHECK(sp.eigenvalues[0] == doctest::Approx(exact).epsilon(1e-10));
  CHECK(sp.method == SolverMethod::lobpcg);
}

TEST_CASE("dense and iterative oracle solves agree") {
  const Grid g(1, 16, 3.0);
  const BoxGrid box(g, 16, 3.0);
  const auto c = indicator_coupling(3.0, Region::ball, 1.0, {0, 0}, 0.0, g);
  const auto op = assemble(c, SurfaceSpec::hyperplane(), box);
  SolverConfig dense;
  dense.force_dense = true;
  const auto a = lowest_eigenpairs(op, dense, 2);
  const auto b = lowest_eigenpairs(op, iterative(), 2);
  CHECK(a.method == SolverMethod::dense);
  CHECK(std::abs(a.eigenvalues[0] - b.eigenvalues[0]) < 1e-8);
  CHECK(std::abs(a.eigenvalues[1] - b.eigenvalues[1]) < 1e-8);
  CHECK(box_norm(box, b.eigenvectors[0]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("constant coupling approaches the threshold under refinement") {
  // Fixed box, h in {0.2, 0.1, 0.05} along the normal; transverse spacing fixed.
  const Grid g(1, 128, 10.0);
  double prev_err = std::numeric_limits<double>::infinity();
  double prev_lambda = 0.0;
  for (double h : {0.2, 0.1, 0.05}) {
    const auto box = make_box_grid(g, 10.0, h);
    const auto op = assemble(constant_coupling(2.0, g), SurfaceSpec::hyperplane(), box);
    const auto sp = lowest_eigenpairs(op, SolverConfig{}, 2);
    const double err = std::abs(sp.eigenvalues[0] + 1.0);
    CHECK(err < prev_err);
    prev_err = err;
    prev_lambda = sp.eigenvalues[0];
    const auto gs = ground_state_checks(sp, op);
    CHECK(gs.sign_definite);
    CHECK(gs.simple);
  }
  CHECK(prev_lambda == doctest::Approx(-1.0).epsilon(0.05));
}

TEST_CASE("enlarging the box never raises the lowest eigenvalue") {
  double prev = std::numeric_limits<double>::infinity();
  for (double L : {4.0, 8.0, 16.0}) {
    const Grid g(1, int(8 * L), L);  // fixed spacing 0.25
    const auto box = make_box_grid(g, L, 0.25);
    const auto c = indicator_coupling(2.0, Region::ball, 1.0, {0, 0}, 0.5, g);
    const auto sp = lowest_eigenpairs(assemble(c, SurfaceSpec::hyperplane(), box), SolverConfig{}, 2);
    CHECK(sp.eigenvalues[0] <= prev + 1e-9);
    prev = sp.eigenvalues[0];
  }
}

TEST_CASE("ground state checks and negative control") {
  const Grid g(1, 64, 8.0);
  const auto box = make_box_grid(g, 8.0, 0.25);
  const auto c = indicator_coupling(4.0, Region::ball, 1.0, {0, 0}, 0.0, g);
  const auto op = assemble(c, SurfaceSpec::hyperplane(), box);
  const auto sp = lowest_eigenpairs(op, SolverConfig{}, 2);
  const auto gs = ground_state_checks(sp, op, 0);
  CHECK(gs.sign_definite);
  CHECK(gs.simple);
  CHECK(gs.positivity_margin > -1e-12);
  const auto second = ground_state_checks(sp, op, 1);
  CHECK(!second.sign_definite);
  CHECK(second.min_off_surface < 0.0);
}

TEST_CASE("oracle and Birman-Schwinger route agree for a ball coupling") {
  const Grid g(1, 256, 12.0);
  const auto c = indicator_coupling(4.0, Region::ball, 1.0, {0, 0}, 0.0, g);
  const auto bsp = find_lambda1(c, SolverConfig{}, RootConfig{});
  REQUIRE(bsp.lambda1);
  const auto box = make_box_grid(g, 12.0, 0.05);
  const auto op = assemble(c, SurfaceSpec::hyperplane(), box);
  const auto sp = lowest_eigenpairs(op, SolverConfig{}, 2);
  CHECK(std::abs(sp.eigenvalues[0] - *bsp.lambda1) / std::abs(*bsp.lambda1) < 0.02);

  const auto u = reconstruct_eigenfunction(*bsp.trace_phi, *bsp.lambda1, box.normal_coordinates());
  const SliceField<double> ur(g, u.normal_coordinates(), u.values().real());
  CHECK(stencil_residual(op, *bsp.lambda1, ur) <= 5.0 * box.spacing_max());
}

TEST_CASE("Steiner check on the oracle") {
  const Grid g(1, 64, 6.0);
  const auto box = make_box_grid(g, 6.0, 0.2);
  SolverConfig s;

  // Zero perturbation: both values are the ground-state eigenvalue.
  {
    const auto c = constant_coupling(1.0, g);
    const auto op = assemble(c, SurfaceSpec::hyperplane(), box);
    const auto sp = lowest_eigenpairs(op, s, 2);
    const auto [a, b] = steiner_rayleigh_check(sp, c, op);
    CHECK(b == doctest::Approx(sp.eigenvalues[0]).epsilon(1e-9));
    CHECK(a <= b + 1e-9);
  }
  // Random mixed sign perturbation.
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-2.0, 4.0);
  for (int t = 0; t < 3; ++t) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(g.cell_count());
    for (Index i = 0; i < g.cell_count(); ++i)
      if (g.sup_radius(i) < 3.0 && i % 3 == t) v[i] = u(rng);
    const auto c = coupling_from_samples(0.0, RealGridFunction(g, v));
    const auto op = assemble(c, SurfaceSpec::hyperplane(), box);
    const auto sp = lowest_eigenpairs(op, s, 2);
    const auto [a, b] = steiner_rayleigh_check(sp, c, op);
    CHECK(b == doctest::Approx(sp.eigenvalues[0]).epsilon(1e-8));
    CHECK(a <= b + 1e-9);
  }
}

TEST_CASE("graph surfaces") {
  const Grid g(1, 64, 4.0);
  const auto box = make_box_grid(g, 4.0, 0.125);
  // Small tent bump of height 0.25 and slope 0.5.
  const auto xi = sample(g, [](auto x) { return std::max(0.0, 0.25 - 0.5 * std::abs(x[0])); });
  const auto surf = SurfaceSpec::graph(xi, 0.5);
  const auto c = constant_coupling(2.0, g);
  const auto op = assemble(c, surf, box);
  CHECK(op.asymmetry() == 0.0);
  CHECK(op.surface_nodes()[32] == box.interface_index() + 2);
  CHECK(op.surface_weights().maxCoeff() == doctest::Approx(std::sqrt(1.25)));
  CHECK(op.surface_weights().minCoeff() == 1.0);
  const auto sp = lowest_eigenpairs(op, SolverConfig{}, 2);
  CHECK(ground_state_checks(sp, op).sign_definite);

  CHECK_THROWS_AS(SurfaceSpec::graph(xi, 0.1), std::invalid_argument);
  const auto tall = sample(g, [](auto x) { return std::abs(x[0]) < 1.0 ? 10.0 : 0.0; });
  CHECK_THROWS_AS(assemble(c, SurfaceSpec::graph(tall, 1e9), box), std::invalid_argument);
  CHECK_THROWS_AS(steiner_rayleigh_check(sp, c, op), std::invalid_argument);
}
