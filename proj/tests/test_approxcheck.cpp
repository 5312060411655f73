#include "golden.hpp"
#include "quasilat/approxcheck.hpp"

#include <doctest.h>

#include <random>

using namespace quasilat;
using quasilat::testing::golden;

namespace {

PointSet line(std::initializer_list<double> xs, double trunc) {
  Eigen::MatrixXd m(1, static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) m(0, i++) = x;
  return make_point_set(1, m, trunc);
}

}  // namespace

TEST_CASE("lattices are 1-approximate with F = {0}") {
  for (auto [a, b] : {std::pair{0.5, 1.0}, {1.0, 1.0}, {0.7, 0.35}}) {
    Eigen::Matrix2d B;
    B << a, b * 0.5, 0, b;
    const auto base = lattice_points_in_box(Lattice(B), 12);
    const auto sum = sumset_truncated(base, base, 6);
    const auto c = find_cover_set(sum, base);
    CHECK(c.k == 1);
    REQUIRE(c.defect_set.size() == 1);
    CHECK(c.defect_set[0].cwiseAbs().maxCoeff() < 1e-12);
    CHECK(verify_cover(sum, base, c.defect_set, c.coverage_tol, c.verified_region_radius));
  }
}

TEST_CASE("integer toy example") {
  // base {-1,0,1} (as a set large enough to hold the translates), sumset {-2..2}
  const auto base = line({-1, 0, 1}, 4);
  const auto sum = line({-2, -1, 0, 1, 2}, 2);
  CoverOptions co;
  co.verified_region_radius = 2.0;
  const auto c = find_cover_set(sum, base, co);
  // Greedy takes 0 first (all candidates gain 3, 0 has the smallest norm).
  CHECK(c.k == 3);
  CHECK(verify_cover(sum, base, c.defect_set, 1e-6, 2.0));
  co.minimize = true;
  const auto m = find_cover_set(sum, base, co);
  CHECK(m.k == 2);
  CHECK(m.defect_set[0](0) == -1.0);
  CHECK(m.defect_set[1](0) == 1.0);
}

TEST_CASE("fibonacci cover matches the oracle") {
  const auto& g = golden()["fibonacci"];
  const auto base = model_set_generate(fibonacci_scheme(), 100);
  const auto sum = sumset_truncated(base, base, 100);
  const auto c = find_cover_set(sum, base);
  CHECK(c.k == g["cover_k_greedy"].get<std::size_t>());
  const auto expect = g["cover_defect_set"].get<std::vector<double>>();
  REQUIRE(c.defect_set.size() == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) CHECK(c.defect_set[i](0) == doctest::Approx(expect[i]).epsilon(1e-9));
  CHECK(verify_cover(sum, base, c.defect_set, c.coverage_tol, c.verified_region_radius));

  CoverOptions co;
  co.minimize = true;
  const auto m = find_cover_set(sum, base, co);
  CHECK(m.minimal);
  CHECK(m.greedy_k == c.k);
  CHECK(m.k == g["cover_k_min"].get<std::size_t>());
  CHECK(verify_cover(sum, base, m.defect_set, m.coverage_tol, m.verified_region_radius));
}

TEST_CASE("greedy k bounds the exhaustive minimum on small instances") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coin(0, 3);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    // Random symmetric subsets of Z containing 0.
    std::vector<double> xs{0.0};
    for (int x = 1; x <= 6; ++x) {
      if (coin(rng) != 0) {
        xs.push_back(x);
        xs.push_back(-x);
      }
    }
    Eigen::MatrixXd m(1, static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = xs[i];
    const auto base = make_point_set(1, m, 6);
    const auto sum = sumset_truncated(base, base, 3);
    if (sum.size() > 20) continue;
    CoverOptions co;
    co.verified_region_radius = 3.0;
    try {
      const auto greedy = find_cover_set(sum, base, co);
      co.minimize = true;
      const auto exact = find_cover_set(sum, base, co);
      CHECK(exact.minimal);
      CHECK(exact.k <= greedy.k);
      CHECK(verify_cover(sum, base, greedy.defect_set, 1e-6, 3.0));
      CHECK(verify_cover(sum, base, exact.defect_set, 1e-6, 3.0));
      ++checked;
    } catch (const Error&) {
      // Some thin sets are not closed within the candidate reach; skip them.
    }
  }
  CHECK(checked >= 20);
}

TEST_CASE("exhaustive set cover on abstract instances") {
  // Universe {0..5}; greedy picks the big set first and needs 3, optimum is 2.
  const std::vector<std::vector<std::size_t>> sets{{0, 1, 2, 3}, {0, 1, 4}, {2, 3, 5}, {4}, {5}};
  const auto g = greedy_set_cover(sets, 6, 10);
  REQUIRE(g);
  CHECK(g->size() == 3);
  const auto e = exhaustive_set_cover(sets, 6, 5, 1000);
  CHECK(e.complete);
  REQUIRE(e.picks);
  CHECK(*e.picks == std::vector<std::size_t>{1, 2});
  CHECK_FALSE(exhaustive_set_cover(sets, 6, 1, 1000).picks);
  CHECK_FALSE(exhaustive_set_cover({{0}, {1}}, 3, 2, 1000).picks);
}

TEST_CASE("not closed at truncation") {
  const auto base = line({0, 1, 5}, 6);
  const auto sum = sumset_truncated(base, base, 3);
  CoverOptions co;
  co.verified_region_radius = 3.0;
  co.max_iterations = 1;
  CHECK_THROWS_WITH_AS(find_cover_set(sum, base, co), "not approximately closed at this truncation", Error);
}

TEST_CASE("delone report for a lattice") {
  Eigen::Matrix2d B;
  B << 0.5, 0, 0, 1;
  const auto rep = delone_report(lattice_points_in_box(Lattice(B), 10), 2);
  CHECK(rep.min_separation == doctest::Approx(0.5));
  CHECK(rep.covering_radius == doctest::Approx(0.5).epsilon(0.02));
  CHECK(rep.is_symmetric);
  CHECK(rep.contains_identity);
}
