#include "golden.hpp"
#include "quasilat/approxcheck.hpp"
#include "quasilat/pointset.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

using namespace quasilat;
using quasilat::testing::golden;

namespace {

Eigen::Matrix2d diag(double a, double b) {
  Eigen::Matrix2d B;
  B << a, 0, 0, b;
  return B;
}

bool contains(const PointSet& ps, const Eigen::VectorXd& q) {
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if ((ps.point(i) - q).cwiseAbs().maxCoeff() <= 1e-9) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("lattice truncation counts") {
  CHECK(lattice_points_in_box(Lattice(diag(0.5, 1.0)), 10).size() == 41 * 21);
  CHECK(lattice_points_in_box(Lattice(diag(1.0, 1.0)), 3).size() == 49);
  Eigen::MatrixXd one(1, 1);
  one << 0.25;
  CHECK(lattice_points_in_box(Lattice(one), 1).size() == 9);
}

TEST_CASE("degenerate inputs are rejected") {
  Eigen::Matrix2d singular;
  singular << 1, 2, 2, 4;
  CHECK_THROWS_AS(Lattice{Eigen::MatrixXd(singular)}, Error);
  CHECK_THROWS_AS(Window({0.0}), Error);
  CHECK_THROWS_AS(Window({-1.0}), Error);
  CHECK_THROWS_AS(scale(lattice_points_in_box(Lattice(diag(1, 1)), 2), -1.0), Error);
}

TEST_CASE("fibonacci scheme density and goldens") {
  const auto sch = fibonacci_scheme();
  CHECK(sch.covolume() == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  CHECK(sch.density() == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-12));
  const auto& g = golden()["fibonacci"];
  CHECK(model_set_generate(sch, 10).size() == g["count_radius_10"].get<std::size_t>());
  const auto big = model_set_generate(sch, 100);
  CHECK(restrict_to_box(big, 50).size() == g["count_r100_center0_r50"].get<std::size_t>());
  const auto rep = delone_report(big, 10);
  CHECK(rep.min_separation == doctest::Approx(g["min_separation_r100"].get<double>()).epsilon(1e-9));
}

TEST_CASE("model set is symmetric and contains the origin") {
  for (double r : {0.5, 3.0, 17.0}) {
    const auto ps = model_set_generate(fibonacci_scheme(), r);
    CHECK(contains(ps, Eigen::VectorXd::Zero(1)));
    const auto neg = negate(ps);
    REQUIRE(neg.size() == ps.size());
    CHECK((neg.points - ps.points).cwiseAbs().maxCoeff() < 1e-9);
  }
  const auto sch = product_scheme(fibonacci_scheme(), fibonacci_scheme(1.0, 0.6));
  const auto ps = model_set_generate(sch, 8);
  CHECK(contains(ps, Eigen::VectorXd::Zero(2)));
  CHECK((negate(ps).points - ps.points).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("regeneration is deterministic and canonical") {
  const auto ps = model_set_generate(product_scheme(fibonacci_scheme(), fibonacci_scheme()), 12);
  const auto again = regenerate(ps.source);
  REQUIRE(again.size() == ps.size());
  CHECK(again.points == ps.points);
  for (std::size_t i = 1; i < ps.size(); ++i) {
    const auto a = ps.point(i - 1), b = ps.point(i);
    CHECK((a(0) < b(0) || (a(0) == b(0) && a(1) < b(1))));
  }
  CHECK_FALSE(has_near_duplicates(ps.points));
  const auto thin = thinned_lattice(Lattice(diag(0.5, 1)), 10, 0.3, 42);
  CHECK(regenerate(thin.source).points == thin.points);
  CHECK_THROWS_AS(regenerate(make_point_set(1, Eigen::MatrixXd::Zero(1, 1), 1.0).source), Error);
}

TEST_CASE("sumset of a lattice is the lattice on the safe region") {
  const auto lat = lattice_points_in_box(Lattice(diag(0.5, 1)), 24);
  const auto sum = sumset_truncated(lat, restrict_to_box(lat, 16), 8);
  const auto expect = restrict_to_box(lat, 8);
  REQUIRE(sum.size() == expect.size());
  CHECK((sum.points - expect.points).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(sum.source["complete"].get<bool>());
  CHECK_FALSE(sumset_truncated(expect, expect, 8).source["complete"].get<bool>());
}

TEST_CASE("fibonacci sumset lies in the doubled window") {
  const auto& g = golden()["fibonacci"];
  const auto base = model_set_generate(fibonacci_scheme(), 10);
  const auto sum = sumset_truncated(base, base, 10);
  CHECK(sum.size() == g["sumset_r10_count"].get<std::size_t>());
  const auto doubled = model_set_generate(fibonacci_scheme(2.0), 10);
  for (std::size_t i = 0; i < sum.size(); ++i) CHECK(contains(doubled, sum.point(i)));
}

TEST_CASE("fibonacci truncations are Delone") {
  for (double r : {20.0, 60.0, 150.0}) {
    const auto rep = delone_report(model_set_generate(fibonacci_scheme(), r), r / 10);
    CHECK(rep.min_separation > 0.6);
    CHECK(std::isfinite(rep.covering_radius));
    CHECK(rep.covering_radius < 1.0);
    CHECK(rep.is_symmetric);
    CHECK(rep.contains_identity);
  }
}

TEST_CASE("symmetrize contains its parts") {
  const auto thin = thinned_lattice(Lattice(diag(0.5, 1)), 12, 0.05, 7);
  const auto sym = symmetrize(thin, Lattice(diag(2, 1)), 12);
  for (std::size_t i = 0; i < thin.size(); ++i) {
    CHECK(contains(sym, thin.point(i)));
    CHECK(contains(sym, -thin.point(i)));
  }
  const auto sub = lattice_points_in_box(Lattice(diag(2, 1)), 12);
  for (std::size_t i = 0; i < sub.size(); ++i) CHECK(contains(sym, sub.point(i)));
  CHECK((negate(sym).points - sym.points).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("canonicalize drops near duplicates") {
  Eigen::MatrixXd pts(2, 4);
  pts << 1, 0, 1 + 1e-12, 0, 2, 0, 2, 1;
  const auto c = canonicalize_points(pts);
  CHECK(c.cols() == 3);
  CHECK(has_near_duplicates(pts));
  CHECK_THROWS_AS(make_point_set(2, pts, 1.5), Error);
}

TEST_CASE("thinning keeps roughly the requested fraction") {
  const auto thin = thinned_lattice(Lattice(diag(0.5, 1)), 20, 0.25, 3);
  const double full = 81.0 * 41.0;
  CHECK(static_cast<double>(thin.size()) / full == doctest::Approx(0.25).epsilon(0.1));
}
