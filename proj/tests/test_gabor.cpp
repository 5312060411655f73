#include "golden.hpp"
#include "quasilat/gabor.hpp"
#include "quasilat/hermite.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace quasilat;
using quasilat::testing::golden;

namespace {

Eigen::Matrix2d diag(double a, double b) {
  Eigen::Matrix2d B;
  B << a, 0, 0, b;
  return B;
}

const GridSpec& std_grid() {
  static const GridSpec g(12.0, 0.01);
  return g;
}

double max_diff(const Waveform& a, const Waveform& b) { return (a.samples - b.samples).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("grid") {
  const GridSpec g(2.0, 0.5);
  CHECK(g.L() == 9);
  CHECK(g.t(0) == -2.0);
  CHECK(g.t(8) == 2.0);
  CHECK(g.xi_max() == doctest::Approx(0.5));
  CHECK_THROWS_AS(GridSpec(0.1, 0.05), Error);
}

TEST_CASE("hermite functions are orthonormal") {
  const auto H = hermite_basis(std_grid(), 40);
  const Eigen::MatrixXcd G = H.adjoint() * H * std_grid().dt();
  CHECK((G - Eigen::MatrixXcd::Identity(40, 40)).cwiseAbs().maxCoeff() < 1e-10);
  const auto g = gaussian_window(std_grid());
  CHECK(g.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(g.samples(std_grid().L() / 2) - std::pow(2.0, 0.25)) < 1e-12);
}

TEST_CASE("time-frequency shift of the gaussian matches the closed form") {
  const auto& grid = std_grid();
  const auto g = gaussian_window(grid);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const double x = u(rng), xi = u(rng);
    const auto s = tf_shift(g, x, xi);
    double err = 0.0;
    for (Eigen::Index k = 0; k < grid.L(); ++k) {
      const double t = grid.t(k);
      const Complex exact = std::polar(std::pow(2.0, 0.25) * std::exp(-kPi * (t - x) * (t - x)), 2 * kPi * xi * t);
      err = std::max(err, std::abs(s.samples(k) - exact));
    }
    CHECK(err < 1e-6);
  }
}

TEST_CASE("unitarity and cocycle battery") {
  const auto& grid = std_grid();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const auto f = hermite_function(grid, 3);
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng), xi = u(rng), xp = u(rng), xip = u(rng);
    const auto a = tf_shift(tf_shift(f, xp, xip), x, xi);
    Waveform b = tf_shift(f, x + xp, xi + xip);
    b.samples *= cocycle(x, xi, xp, xip);
    CHECK(max_diff(a, b) < 1e-6);
    CHECK(std::abs(tf_shift(f, x, xi).norm() - f.norm()) < 1e-6);
  }
  CHECK(std::abs(cocycle(0.3, 0.0, 0.0, 0.7) - std::polar(1.0, -2 * kPi * 0.7 * 0.3)) < 1e-15);
}

TEST_CASE("shift range is enforced") {
  const auto g = gaussian_window(std_grid());
  CHECK_THROWS_AS(tf_shift(g, 11.0, 0.0), Error);
  CHECK_THROWS_AS(tf_shift(g, 0.0, 30.0), Error);
}

TEST_CASE("ambiguity and orthogonality relations") {
  const GridSpec fine(12.0, 0.001);
  const auto g = gaussian_window(fine);
  CHECK(std::abs(inner(g, tf_shift(g, 1.0, 0.0))) ==
        doctest::Approx(golden()["gabor"]["ambiguity_1_0"].get<double>()).epsilon(1e-9));
  const auto gs = gaussian_window(std_grid());
  const auto h1 = hermite_function(std_grid(), 1);
  CHECK(orthogonality_check(gs, gs, 0.1, 6.0) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(orthogonality_check(h1, gs, 0.1, 6.0) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("gram matrix is hermitian positive semidefinite") {
  const auto sys = make_gabor_system(gaussian_window(std_grid()), lattice_points_in_box(Lattice(diag(0.75, 0.75)), 4));
  const auto G = gram_matrix(sys);
  CHECK((G - G.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
  CHECK(es.eigenvalues().minCoeff() > -1e-12);
  CHECK(std::abs(G(0, 0) - 1.0) < 1e-12);
  const auto rb = riesz_bounds(sys);
  CHECK(rb.A_est <= rb.B_est);
}

TEST_CASE("frame bounds match the oracle sweep") {
  const double s = std::sqrt(0.5);
  const auto sys = make_gabor_system(gaussian_window(std_grid()), lattice_points_in_box(Lattice(diag(s, s)), 9.6));
  const auto b = frame_bounds(sys);
  const auto& g = golden()["gabor"];
  CHECK(b.A_est == doctest::Approx(g["frame_05_N40_T12_lower"].get<double>()).epsilon(1e-8));
  CHECK(b.B_est == doctest::Approx(g["frame_05_N40_T12_upper"].get<double>()).epsilon(1e-8));
  for (std::size_t i = 1; i < b.sizes.size(); ++i) {
    CHECK(b.lower[i] <= b.lower[i - 1] + 1e-12);
    CHECK(b.upper[i] >= b.upper[i - 1] - 1e-12);
  }
}

TEST_CASE("removing points never increases the lower frame bound") {
  const auto ps = lattice_points_in_box(Lattice(diag(0.8, 0.8)), 9.6);
  const auto window = gaussian_window(std_grid());
  FrameOptions fo;
  fo.N = 20;
  const auto full = frame_bounds(make_gabor_system(window, ps), fo);
  std::mt19937_64 rng(9);
  Eigen::MatrixXd kept(2, 0);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (rng() % 5 == 0) continue;
    kept.conservativeResize(2, kept.cols() + 1);
    kept.col(kept.cols() - 1) = ps.point(i);
  }
  const auto sub = frame_bounds(make_gabor_system(window, make_point_set(2, kept, ps.truncation_radius)), fo);
  CHECK(sub.A_est <= full.A_est + 1e-12);
  CHECK(sub.B_est <= full.B_est + 1e-12);
}

TEST_CASE("truncation guard for the test basis") {
  const auto sys = make_gabor_system(gaussian_window(std_grid()), lattice_points_in_box(Lattice(diag(1, 1)), 5));
  CHECK_THROWS_AS(frame_bounds(sys), Error);
}

TEST_CASE("riesz bounds, dual and uniform minimality on 2Z x Z") {
  const auto sys = make_gabor_system(gaussian_window(std_grid()), lattice_points_in_box(Lattice(diag(2, 1)), 6));
  const auto& g = golden()["gabor"];
  REQUIRE(sys.size() == g["riesz_2x1_r6_count"].get<std::size_t>());
  const auto rb = riesz_bounds(sys);
  CHECK(rb.A_est == doctest::Approx(g["riesz_2x1_r6_lower"].get<double>()).epsilon(1e-8));
  CHECK(rb.B_est == doctest::Approx(g["riesz_2x1_r6_upper"].get<double>()).epsilon(1e-8));
  const auto d = biorthogonal_dual(sys);
  CHECK(d.biorthogonality_residual < 1e-10);
  CHECK(d.B_sup == doctest::Approx(g["riesz_2x1_r6_bsup"].get<double>()).epsilon(1e-8));
  const double delta = uniform_min_delta(sys);
  CHECK(delta == doctest::Approx(g["riesz_2x1_r6_delta"].get<double>()).epsilon(1e-8));
  CHECK(delta * d.dual_norms.maxCoeff() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("duality consistency on random interior families") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 4; ++trial) {
    Eigen::MatrixXd pts(2, 12);
    for (Eigen::Index i = 0; i < pts.cols(); ++i) pts.col(i) << u(rng), u(rng);
    const auto sys = make_gabor_system(gaussian_window(std_grid()), make_point_set(2, pts, 6.0));
    const auto d = biorthogonal_dual(sys);
    CHECK(d.biorthogonality_residual < 1e-6);
    CHECK(uniform_min_delta(sys) * d.dual_norms.maxCoeff() == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("duplicated atoms are not minimal") {
  GaborSystem sys = make_gabor_system(gaussian_window(std_grid()), lattice_points_in_box(Lattice(diag(2, 2)), 2));
  sys.points.conservativeResize(2, sys.points.cols() + 1);
  sys.points.col(sys.points.cols() - 1) = sys.points.col(0);
  CHECK_THROWS_WITH_AS(biorthogonal_dual(sys), doctest::Contains("not minimal at tolerance"), Error);
}

TEST_CASE("hap residual decreases with K and matches the oracle") {
  const double s = std::sqrt(0.5);
  const auto sys = make_gabor_system(gaussian_window(std_grid()), lattice_points_in_box(Lattice(diag(s, s)), 10.5));
  const auto g = gaussian_window(std_grid());
  const auto& gold = golden()["gabor"]["hap_05_max_residual"];
  double worst2 = 0.0;
  for (double x0 : {-1.0, 0.0, 0.5}) {
    for (double x1 : {-0.5, 1.0}) {
      const Eigen::Vector2d x(x0, x1);
      const double r1 = hap_residual(sys, g, x, 1.0);
      const double r2 = hap_residual(sys, g, x, 2.0);
      const double r3 = hap_residual(sys, g, x, 3.0);
      CHECK(r2 <= r1 + 1e-12);
      CHECK(r3 <= r2 + 1e-12);
      worst2 = std::max(worst2, r2);
    }
  }
  CHECK(worst2 <= gold["2"].get<double>() * (1 + 1e-6));
  CHECK(hap_residual(sys, g, Eigen::Vector2d(0.3, 0.3), 0.01) == doctest::Approx(1.0));
  CHECK_THROWS_WITH_AS(hap_residual(sys, g, Eigen::Vector2d(8, 0), 6.0), "insufficient truncation", Error);
}

TEST_CASE("completeness proxy") {
  const double s = std::sqrt(0.5);
  const auto dense = make_gabor_system(gaussian_window(std_grid()), lattice_points_in_box(Lattice(diag(s, s)), 10.5));
  std::vector<Waveform> probes;
  for (int n = 0; n < 10; ++n) probes.push_back(hermite_function(std_grid(), n));
  CHECK(completeness_residual(dense, probes) < 1e-10);
  const auto sparse = make_gabor_system(gaussian_window(std_grid()), lattice_points_in_box(Lattice(diag(2, 1)), 8));
  CHECK(completeness_residual(sparse, probes) > 0.1);
}

TEST_CASE("hermite recurrence is templated on the scalar") {
  Eigen::VectorXf t = Eigen::VectorXf::LinSpaced(5, -1.0f, 1.0f);
  const auto H = hermite_functions<float>(t, 3);
  CHECK(H.rows() == 5);
  CHECK(H.cols() == 3);
  CHECK(std::abs(H(2, 0) - std::pow(2.0f, 0.25f)) < 1e-6f);
  CHECK(std::abs(H(2, 1)) < 1e-6f);
}
