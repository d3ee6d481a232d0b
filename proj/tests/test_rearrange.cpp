#include "bsdelta/oracle.hpp"
#include "bsdelta/rearrange.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace bsdelta;

namespace {

RealGridFunction random_nonneg(const Grid& g, std::mt19937_64& rng, double zero_fraction = 0.3) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd v(g.cell_count());
  for (auto& x : v) x = u(rng) < zero_fraction ? 0.0 : u(rng);
  return {g, v};
}

std::vector<double> sorted(const Eigen::VectorXd& v) {
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end());
  return s;
}

double lp(const RealGridFunction& f, double p) {
  return std::pow(f.samples().array().abs().pow(p).sum() * f.grid().cell_volume(), 1.0 / p);
}

}  // namespace

TEST_CASE("ranking is a distance-sorted bijection") {
  for (int dim : {1, 2}) {
    const Grid g(dim, 16, 2.0);
    const RankedCells r(g);
    CHECK(r.covers_grid());
    std::vector<Index> order = r.order();
    std::sort(order.begin(), order.end());
    std::vector<Index> expect(g.cell_count());
    std::iota(expect.begin(), expect.end(), Index(0));
    CHECK(order == expect);
    for (std::size_t i = 1; i < r.order().size(); ++i) {
      const auto a = g.squared_lattice_radius(r.order()[i - 1]);
      const auto b = g.squared_lattice_radius(r.order()[i]);
      CHECK(a <= b);
      if (a == b) CHECK(r.order()[i - 1] < r.order()[i]);
    }
    const auto interior = RankedCells::interior(g);
    CHECK(interior.size() == (dim == 1 ? 15 : 225));
  }
}

TEST_CASE("sorting definition on a small 1D grid") {
  const Grid g(1, 8, 4.0);  // origin at index 4
  Eigen::VectorXd v = Eigen::VectorXd::Zero(8);
  v[0] = 3;
  v[1] = 1;
  v[2] = 2;
  const auto s = symmetric_decreasing_rearrangement(RealGridFunction(g, v), RankedCells(g));
  CHECK(s[4] == 3.0);
  CHECK(s[3] == 2.0);  // distance 1, lower index first
  CHECK(s[5] == 1.0);
  CHECK(s.samples().sum() == 6.0);
}

TEST_CASE("centered ball indicator is fixed") {
  const Grid g(2, 32, 4.0);
  const auto ball = indicator_coupling(1.0, Region::ball, 1.3, {0, 0}, 0.0, g).perturbation();
  const auto s = symmetric_decreasing_rearrangement(ball, RankedCells(g));
  CHECK(s.samples() == ball.samples());
}

TEST_CASE("rejects negative input with its index") {
  const Grid g(1, 8, 1.0);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(8);
  v[5] = -0.1;
  try {
    symmetric_decreasing_rearrangement(RealGridFunction(g, v), RankedCells(g));
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("index 5") != std::string::npos);
  }
}

TEST_CASE("structural properties on random inputs") {
  std::mt19937_64 rng(2024);
  for (int dim : {1, 2}) {
    const Grid g(dim, dim == 1 ? 64 : 16, 3.0);
    const RankedCells r(g);
    for (int t = 0; t < 20; ++t) {
      const auto u = random_nonneg(g, rng);
      const auto us = symmetric_decreasing_rearrangement(u, r);
      CHECK(sorted(us.samples()) == sorted(u.samples()));
      CHECK(symmetric_decreasing_rearrangement(us, r).samples() == us.samples());
      for (std::size_t i = 1; i < r.order().size(); ++i) CHECK(us[r.order()[i - 1]] >= us[r.order()[i]]);
      for (double p : {1.0, 2.0, 4.0}) {
        // Equal multisets of |u|^p; the sums differ only by summation order.
        CHECK(sorted(us.samples().array().abs().pow(p).matrix()) == sorted(u.samples().array().abs().pow(p).matrix()));
        CHECK(lp(us, p) == doctest::Approx(lp(u, p)).epsilon(1e-14));
      }
      const RealGridFunction u2(g, u.samples().array().square());
      CHECK(symmetric_decreasing_rearrangement(u2, r).samples() == us.samples().array().square().matrix());

      // u <= v pointwise implies u* <= v*.
      const RealGridFunction v(g, u.samples() + random_nonneg(g, rng).samples());
      const auto vs = symmetric_decreasing_rearrangement(v, r);
      CHECK((us.samples().array() <= vs.samples().array()).all());
    }
  }
}

TEST_CASE("Hardy-Littlewood pairing") {
  std::mt19937_64 rng(99);
  const Grid g(1, 32, 2.0);
  const RankedCells r(g);
  for (int t = 0; t < 100; ++t) {
    const auto u = random_nonneg(g, rng), v = random_nonneg(g, rng);
    const auto [plain, star] = hardy_littlewood_pairing(u, v, r);
    CHECK(plain <= star);
  }
  const auto u = random_nonneg(g, rng);
  const auto [a, b] = hardy_littlewood_pairing(u, u, r);
  CHECK(a == doctest::Approx(b).epsilon(1e-15));

  Eigen::VectorXd A = Eigen::VectorXd::Zero(32), B = Eigen::VectorXd::Zero(32);
  A.segment(2, 4).setOnes();
  B.segment(20, 3).setOnes();
  const auto [d0, d1] = hardy_littlewood_pairing(RealGridFunction(g, A), RealGridFunction(g, B), r);
  CHECK(d0 == 0.0);
  CHECK(d1 >= 0.0);
}

TEST_CASE("sorted pairing is the maximum over all permutations") {
  std::mt19937_64 rng(7);
  const Grid g(1, 8, 1.0);
  const RankedCells r(g);
  for (int t = 0; t < 10; ++t) {
    const auto u = random_nonneg(g, rng, 0.2), v = random_nonneg(g, rng, 0.2);
    std::vector<int> perm(8);
    std::iota(perm.begin(), perm.end(), 0);
    double best = -1.0;
    do {
      double s = 0.0;
      for (int i = 0; i < 8; ++i) s += u[i] * v[perm[i]];
      best = std::max(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    const auto [plain, star] = hardy_littlewood_pairing(u, v, r);
    CHECK(star == doctest::Approx(best * g.cell_volume()).epsilon(1e-14));
    CHECK(plain <= star);
  }
}

TEST_CASE("Steiner symmetrization") {
  std::mt19937_64 rng(31);
  const Grid g(1, 32, 4.0);
  const BoxGrid box(g, 16, 2.0);
  const auto ranking = RankedCells::interior(g);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXd interior(box.interior_count());
    for (auto& x : interior) x = unif(rng);
    const auto u = box.to_field(interior);
    const auto us = steiner_symmetrize(u, ranking);
    for (Index s = 0; s < u.slice_count(); ++s)
      CHECK(sorted(us.values().col(s)) == sorted(u.values().col(s)));
    CHECK(us.values().squaredNorm() == doctest::Approx(u.values().squaredNorm()).epsilon(1e-15));
    CHECK(box_norm(box, us) == doctest::Approx(box_norm(box, u)).epsilon(1e-15));
    // The wall stays zero, so the symmetrized field lives on the same box.
    CHECK(box.to_field(box.to_interior(us)).values() == us.values());
    // Slice-wise rearrangement cannot raise the discrete Dirichlet energy.
    CHECK(dirichlet_energy(box, us) <= dirichlet_energy(box, u) * (1.0 + 1e-13));
    CHECK(steiner_symmetrize(us, ranking).values() == us.values());
  }
  Eigen::MatrixXd neg = Eigen::MatrixXd::Zero(32, 17);
  neg(3, 2) = -1.0;
  CHECK_THROWS_AS(steiner_symmetrize(SliceField<double>(g, box.normal_coordinates(), neg), ranking),
                  std::invalid_argument);
}

TEST_CASE("rearranged positive part of a coupling") {
  const Grid g(1, 64, 4.0);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(64);
  v[20] = -1.0;
  v[21] = 2.0;
  v[40] = 3.0;
  const auto c = coupling_from_samples(0.5, RealGridFunction(g, v));
  const auto r = rearranged_positive_part(c, RankedCells(g));
  CHECK(r.background() == 0.5);
  CHECK(r.perturbation()[32] == 3.0);
  CHECK(r.perturbation()[31] == 2.0);
  CHECK(r.perturbation().samples().sum() == 5.0);
}
