#pragma once

#include "quasilat/pointset.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <optional>
#include <vector>

namespace quasilat {

/// Sample grid t_i = -T + i dt, i = 0 .. L-1, with L = floor(2T / dt) + 1.
class GridSpec {
 public:
  GridSpec(double T, double dt);

  double T() const { return T_; }
  double dt() const { return dt_; }
  Eigen::Index L() const { return L_; }
  /// Largest modulation accepted by tf_shift, 1 / (4 dt).
  double xi_max() const { return 1.0 / (4.0 * dt_); }
  double t(Eigen::Index i) const { return -T_ + static_cast<double>(i) * dt_; }
  Eigen::VectorXd times() const;

  bool operator==(const GridSpec& o) const { return T_ == o.T_ && dt_ == o.dt_; }

 private:
  double T_, dt_;
  Eigen::Index L_;
};

struct Waveform {
  GridSpec grid;
  Eigen::VectorXcd samples;

  Waveform(GridSpec g, Eigen::VectorXcd s);
  /// Trapezoidal norm (the end samples are negligible for every preset, so
  /// plain Riemann weights dt are used throughout).
  double norm() const;
};

/// <f, g> = sum f conj(g) dt, linear in the first argument.
Complex inner(const Waveform& f, const Waveform& g);

/// 2^{1/4} e^{-pi t^2}, unit norm.
Waveform gaussian_window(const GridSpec& grid);
Waveform hermite_function(const GridSpec& grid, int n);
/// First n Hermite functions as the columns of an L x n matrix.
Eigen::MatrixXcd hermite_basis(const GridSpec& grid, int n);

/// Smallest s such that the energy of f outside [-s, s] is at most
/// tail * |f|^2.
double essential_support(const Waveform& f, double tail = 1e-12);

/// pi(x, xi) f = e^{2 pi i xi t} f(t - x). Shifts by whole samples move the
/// samples; other shifts multiply the spectrum of the zero-padded signal by
/// the shift phase (band-limited interpolation). Throws unless
/// |x| <= T - essential_support(f) and |xi| <= 1 / (4 dt).
Waveform tf_shift(const Waveform& f, double x, double xi);

/// sigma((x, xi), (x', xi')) = e^{-2 pi i xi' x}, so that
/// pi(z) pi(z') = sigma(z, z') pi(z + z').
Complex cocycle(double x, double xi, double xp, double xip);

/// Riemann sum of |<f, pi(x, xi) g>|^2 over the grid step * Z^2 inside
/// [-radius, radius]^2. Approximates |f|^2 |g|^2 / d_pi.
double orthogonality_check(const Waveform& f, const Waveform& g, double tf_grid_step, double tf_radius);

/// Coherent system pi(lambda) g. Points are the columns of a 2 x n matrix
/// (x, xi); repeated points are allowed so that degenerate families can be
/// studied directly.
struct GaborSystem {
  Waveform window;
  Eigen::MatrixXd points;
  double truncation_radius = 0.0;
  double formal_degree = 1.0;

  std::size_t size() const { return static_cast<std::size_t>(points.cols()); }
};

GaborSystem make_gabor_system(const Waveform& window, const PointSet& ps);

/// L x n matrix whose columns are pi(lambda) g.
Eigen::MatrixXcd synthesis_matrix(const GaborSystem& sys);

/// G[i][j] = <pi(lambda_j) g, pi(lambda_i) g>.
Eigen::MatrixXcd gram_matrix(const GaborSystem& sys);

struct SpectralBounds {
  double A_est = 0.0;
  double B_est = 0.0;
  std::size_t subspace_dim = 0;
  bool converged = false;
  /// Finite-section history: bounds at each subspace size.
  std::vector<std::size_t> sizes;
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Estimated bound below which a system is not reported as a frame / Riesz
/// sequence.
inline constexpr double kFrameFloor = 1e-2;

struct FrameOptions {
  int N = 40;
  int N_step = 10;
  double rel_tol = 1e-2;
  /// Required truncation: sqrt(N / pi) + guard.
  double guard = 6.0;
};

/// Finite-section frame bounds: extremal eigenvalues of
/// M[i][j] = sum_lambda <h_i, pi(lambda) g><pi(lambda) g, h_j> over the first
/// N Hermite functions, swept in steps of N_step.
SpectralBounds frame_bounds(const GaborSystem& sys, const FrameOptions& opts = {});

struct RieszOptions {
  /// Only points with |lambda|_inf <= truncation_radius - edge_margin enter.
  double edge_margin = 0.0;
};

/// Extremal eigenvalues of the Gram matrix of the interior sub-family.
SpectralBounds riesz_bounds(const GaborSystem& sys, const RieszOptions& opts = {});

/// Restriction of sys to |lambda|_inf <= truncation_radius - edge_margin.
GaborSystem interior_system(const GaborSystem& sys, double edge_margin);

struct DualResult {
  /// Column lambda is h_lambda = sum_mu (G^-1)[mu][lambda] pi(mu) g.
  Eigen::MatrixXcd duals;
  Eigen::VectorXd dual_norms;  // |h_lambda|
  double B_sup = 0.0;          // max_lambda |h_lambda|^2
  double biorthogonality_residual = 0.0;  // max |<pi(lambda) g, h_lambda'> - delta|
  double min_gram_eigenvalue = 0.0;
};

/// Gram eigenvalue at or below which a family counts as not minimal.
inline constexpr double kMinimalityTol = 1e-10;

/// Throws Error("not minimal at tolerance") for a (numerically) singular Gram.
DualResult biorthogonal_dual(const GaborSystem& sys);

/// min over lambda of dist(pi(lambda) g, span of the others), computed from a
/// QR factorization of the synthesis matrix without forming the Gram inverse.
double uniform_min_delta(const GaborSystem& sys);

/// Least-squares residual of pi(x) f against the atoms with
/// |lambda - x|_inf <= K_radius. An empty local family returns |f|. Throws
/// Error("insufficient truncation") if the box leaves the truncation.
double hap_residual(const GaborSystem& sys, const Waveform& f, const Eigen::Vector2d& x, double K_radius);

/// Max over probes of the least-squares residual against the whole family.
double completeness_residual(const GaborSystem& sys, const std::vector<Waveform>& probes);

nlohmann::json to_json(const SpectralBounds& b);

}  // namespace quasilat
