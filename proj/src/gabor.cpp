#include "quasilat/gabor.hpp"

#include "quasilat/hermite.hpp"
#include "quasilat/parallel.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace quasilat {
namespace {

constexpr double kTwoPi = 2.0 * kPi;

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// f(t - x) on the grid of f, without modulation.
Eigen::VectorXcd time_shift(const Eigen::VectorXcd& s, double x, double dt) {
  const Eigen::Index L = s.size();
  const double q = x / dt;
  const double k = std::round(q);
  if (std::abs(q - k) < 1e-9) {
    const auto shift = static_cast<Eigen::Index>(k);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(L);
    const Eigen::Index len = L - std::abs(shift);
    if (len > 0) {
      if (shift >= 0) out.segment(shift, len) = s.head(len);
      else out.head(len) = s.tail(len);
    }
    return out;
  }
  // Band-limited shift. Padding to at least twice the length keeps content
  // pushed past either end out of the kept window.
  const std::size_t P = next_pow2(static_cast<std::size_t>(2 * L));
  std::vector<Complex> buf(P, Complex(0.0)), spec;
  for (Eigen::Index i = 0; i < L; ++i) buf[static_cast<std::size_t>(i)] = s(i);
  Eigen::FFT<double> fft;
  fft.fwd(spec, buf);
  const double dnu = 1.0 / (static_cast<double>(P) * dt);
  for (std::size_t j = 0; j < P; ++j) {
    if (j == P / 2) {
      spec[j] *= std::cos(kPi * x / dt);
      continue;
    }
    const double nu = (j < P / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(P)) * dnu;
    spec[j] *= std::polar(1.0, -kTwoPi * nu * x);
  }
  fft.inv(buf, spec);
  Eigen::VectorXcd out(L);
  for (Eigen::Index i = 0; i < L; ++i) out(i) = buf[static_cast<std::size_t>(i)];
  return out;
}

void modulate(Eigen::Ref<Eigen::VectorXcd> v, const GridSpec& grid, double xi) {
  if (xi == 0.0) return;
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) *= std::polar(1.0, kTwoPi * xi * grid.t(i));
}

void check_shift(const GridSpec& grid, double reach, double x, double xi) {
  const double slack = 1e-12 * std::max(1.0, grid.T());
  if (std::abs(x) > grid.T() - reach + slack || std::abs(xi) > grid.xi_max() + slack) {
    throw Error("shift out of range: (" + std::to_string(x) + ", " + std::to_string(xi) + ") needs |x| <= " +
                std::to_string(grid.T() - reach) + " and |xi| <= " + std::to_string(grid.xi_max()));
  }
}

// Columns pi(lambda) g for the given point columns; time shifts are shared
// between points with the same x.
Eigen::MatrixXcd atoms(const Waveform& g, const Eigen::MatrixXd& pts) {
  const GridSpec& grid = g.grid;
  const double reach = essential_support(g);
  std::map<double, Eigen::Index> first_with_x;
  for (Eigen::Index j = 0; j < pts.cols(); ++j) {
    check_shift(grid, reach, pts(0, j), pts(1, j));
    first_with_x.emplace(pts(0, j), j);
  }
  std::vector<double> xs;
  for (const auto& [x, j] : first_with_x) xs.push_back(x);
  std::vector<Eigen::VectorXcd> shifted(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { shifted[i] = time_shift(g.samples, xs[i], grid.dt()); });

  Eigen::MatrixXcd V(grid.L(), pts.cols());
  parallel_for(static_cast<std::size_t>(pts.cols()), [&](std::size_t jj) {
    const auto j = static_cast<Eigen::Index>(jj);
    const auto it = std::lower_bound(xs.begin(), xs.end(), pts(0, j));
    V.col(j) = shifted[static_cast<std::size_t>(it - xs.begin())];
    modulate(V.col(j), grid, pts(1, j));
  });
  return V;
}

// Least-squares residual of each column of B against span(V), both sampled
// with weight dt. Rows where every column is negligible are dropped first.
Eigen::VectorXd ls_residuals(const Eigen::MatrixXcd& V, const Eigen::MatrixXcd& B, double dt) {
  const double scale = std::max(V.cwiseAbs().maxCoeff(), B.cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < V.rows(); ++i) {
    const double m = std::max(V.cols() ? V.row(i).cwiseAbs().maxCoeff() : 0.0, B.row(i).cwiseAbs().maxCoeff());
    if (m > 1e-18 * scale) rows.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXcd Vr(m, V.cols()), Br(m, B.cols());
  for (Eigen::Index r = 0; r < m; ++r) {
    Vr.row(r) = V.row(rows[static_cast<std::size_t>(r)]);
    Br.row(r) = B.row(rows[static_cast<std::size_t>(r)]);
  }
  const double w = std::sqrt(dt);
  Eigen::VectorXd out(B.cols());
  if (V.cols() == 0) {
    for (Eigen::Index c = 0; c < B.cols(); ++c) out(c) = B.col(c).norm() * w;
    return out;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(Vr);
  const Eigen::MatrixXcd C = qr.householderQ().adjoint() * Br;
  const Eigen::Index rank = qr.rank();
  for (Eigen::Index c = 0; c < B.cols(); ++c) out(c) = C.col(c).tail(m - rank).norm() * w;
  return out;
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& M) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(M, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

GridSpec::GridSpec(double T, double dt) : T_(T), dt_(dt) {
  if (!(T > 0.0) || !(dt > 0.0) || !std::isfinite(T) || !std::isfinite(dt)) {
    throw Error("grid: T and dt must be positive");
  }
  L_ = static_cast<Eigen::Index>(std::floor(2.0 * T / dt + 1e-9)) + 1;
  if (L_ < 8) throw Error("grid: fewer than 8 samples");
}

Eigen::VectorXd GridSpec::times() const {
  Eigen::VectorXd t(L_);
  for (Eigen::Index i = 0; i < L_; ++i) t(i) = this->t(i);
  return t;
}

Waveform::Waveform(GridSpec g, Eigen::VectorXcd s) : grid(g), samples(std::move(s)) {
  if (samples.size() != grid.L()) throw Error("waveform: sample count does not match grid");
}

double Waveform::norm() const { return samples.norm() * std::sqrt(grid.dt()); }

Complex inner(const Waveform& f, const Waveform& g) {
  if (!(f.grid == g.grid)) throw Error("inner: grid mismatch");
  return g.samples.dot(f.samples) * f.grid.dt();
}

Waveform gaussian_window(const GridSpec& grid) { return hermite_function(grid, 0); }

Waveform hermite_function(const GridSpec& grid, int n) {
  if (n < 0) throw Error("hermite: negative index");
  const Eigen::VectorXd h = hermite_functions<double>(grid.times(), n + 1).col(n);
  return {grid, h.cast<Complex>()};
}

Eigen::MatrixXcd hermite_basis(const GridSpec& grid, int n) {
  if (n < 0) throw Error("hermite: negative size");
  return hermite_functions<double>(grid.times(), n).cast<Complex>();
}

double essential_support(const Waveform& f, double tail) {
  const Eigen::VectorXd e = f.samples.cwiseAbs2();
  const double budget = tail * e.sum();
  Eigen::Index lo = 0, hi = e.size() - 1;
  double acc = 0.0;
  while (lo <= hi) {
    const bool take_lo = std::abs(f.grid.t(lo)) >= std::abs(f.grid.t(hi));
    const Eigen::Index i = take_lo ? lo : hi;
    if (acc + e(i) > budget) return std::abs(f.grid.t(i));
    acc += e(i);
    if (take_lo) ++lo;
    else --hi;
  }
  return 0.0;
}

Waveform tf_shift(const Waveform& f, double x, double xi) {
  check_shift(f.grid, essential_support(f), x, xi);
  Waveform out{f.grid, time_shift(f.samples, x, f.grid.dt())};
  modulate(out.samples, f.grid, xi);
  return out;
}

Complex cocycle(double x, double /*xi*/, double /*xp*/, double xip) { return std::polar(1.0, -kTwoPi * xip * x); }

double orthogonality_check(const Waveform& f, const Waveform& g, double tf_grid_step, double tf_radius) {
  if (!(f.grid == g.grid)) throw Error("orthogonality_check: grid mismatch");
  if (!(tf_grid_step > 0.0) || !(tf_radius > 0.0)) throw Error("orthogonality_check: step and radius must be positive");
  const GridSpec& grid = f.grid;
  const auto kmax = static_cast<Eigen::Index>(std::floor(tf_radius / tf_grid_step + 1e-9));
  const Eigen::Index n = 2 * kmax + 1;
  Eigen::MatrixXcd phase(n, grid.L());
  for (Eigen::Index j = 0; j < n; ++j) {
    const double xi = static_cast<double>(j - kmax) * tf_grid_step;
    for (Eigen::Index i = 0; i < grid.L(); ++i) phase(j, i) = std::polar(1.0, -kTwoPi * xi * grid.t(i));
  }
  // Modulations are applied by the phase matrix, so only the time shift is
  // range-checked here.
  const double reach = essential_support(g);
  std::vector<double> per_x(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t k) {
    const double x = static_cast<double>(static_cast<Eigen::Index>(k) - kmax) * tf_grid_step;
    check_shift(grid, reach, x, 0.0);
    const Eigen::VectorXcd u = f.samples.cwiseProduct(time_shift(g.samples, x, grid.dt()).conjugate());
    per_x[k] = (phase * u).squaredNorm();
  });
  double total = 0.0;
  for (double v : per_x) total += v;
  return total * grid.dt() * grid.dt() * tf_grid_step * tf_grid_step;
}

GaborSystem make_gabor_system(const Waveform& window, const PointSet& ps) {
  if (ps.dim != 2) throw Error("gabor system needs a 2-dimensional point set (x, xi)");
  return {window, ps.points, ps.truncation_radius, 1.0};
}

Eigen::MatrixXcd synthesis_matrix(const GaborSystem& sys) { return atoms(sys.window, sys.points); }

Eigen::MatrixXcd gram_matrix(const GaborSystem& sys) {
  const Eigen::MatrixXcd V = synthesis_matrix(sys);
  return (V.adjoint() * V) * sys.window.grid.dt();
}

SpectralBounds frame_bounds(const GaborSystem& sys, const FrameOptions& opts) {
  if (opts.N < 1 || opts.N_step < 1) throw Error("frame_bounds: N and N_step must be positive");
  const double needed = std::sqrt(static_cast<double>(opts.N) / kPi) + opts.guard;
  if (sys.truncation_radius + 1e-12 < needed) {
    throw Error("truncation too small for test basis: need radius >= " + std::to_string(needed));
  }
  const GridSpec& grid = sys.window.grid;
  const Eigen::MatrixXcd V = synthesis_matrix(sys);
  const Eigen::MatrixXcd H = hermite_basis(grid, opts.N);
  const Eigen::MatrixXcd A = (V.adjoint() * H) * grid.dt();  // A(lambda, i) = <h_i, pi(lambda) g>
  const Eigen::MatrixXcd M = (A.adjoint() * A).conjugate();

  SpectralBounds b;
  for (int s = opts.N_step; s < opts.N; s += opts.N_step) b.sizes.push_back(static_cast<std::size_t>(s));
  b.sizes.push_back(static_cast<std::size_t>(opts.N));
  for (std::size_t s : b.sizes) {
    const auto n = static_cast<Eigen::Index>(s);
    const Eigen::VectorXd w = hermitian_eigenvalues(M.topLeftCorner(n, n));
    b.lower.push_back(w(0));
    b.upper.push_back(w(n - 1));
  }
  b.A_est = std::max(0.0, b.lower.back());
  b.B_est = b.upper.back();
  b.subspace_dim = static_cast<std::size_t>(opts.N);
  if (b.lower.size() >= 2) {
    const double prev = b.lower[b.lower.size() - 2];
    b.converged = std::abs(b.lower.back() - prev) <= opts.rel_tol * std::abs(b.lower.back());
  }
  return b;
}

GaborSystem interior_system(const GaborSystem& sys, double edge_margin) {
  if (edge_margin <= 0.0) return sys;
  const double r = sys.truncation_radius - edge_margin;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < sys.points.cols(); ++j) {
    if (sys.points.col(j).cwiseAbs().maxCoeff() <= r + kDedupTol) keep.push_back(j);
  }
  GaborSystem out = sys;
  out.points.resize(2, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) out.points.col(static_cast<Eigen::Index>(k)) = sys.points.col(keep[k]);
  out.truncation_radius = std::max(r, 0.0);
  return out;
}

SpectralBounds riesz_bounds(const GaborSystem& sys, const RieszOptions& opts) {
  const GaborSystem sub = interior_system(sys, opts.edge_margin);
  if (sub.size() == 0) throw Error("riesz_bounds: empty interior family");
  const Eigen::VectorXd w = hermitian_eigenvalues(gram_matrix(sub));
  SpectralBounds b;
  b.A_est = std::max(0.0, w(0));
  b.B_est = w(w.size() - 1);
  b.subspace_dim = sub.size();
  b.converged = true;
  b.sizes = {sub.size()};
  b.lower = {w(0)};
  b.upper = {b.B_est};
  return b;
}

DualResult biorthogonal_dual(const GaborSystem& sys) {
  if (sys.size() == 0) throw Error("biorthogonal_dual: empty family");
  const double dt = sys.window.grid.dt();
  const Eigen::MatrixXcd V = synthesis_matrix(sys);
  const Eigen::MatrixXcd G = (V.adjoint() * V) * dt;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(G);
  DualResult r;
  r.min_gram_eigenvalue = eig.eigenvalues()(0);
  if (r.min_gram_eigenvalue <= kMinimalityTol) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", r.min_gram_eigenvalue);
    throw Error(std::string("not minimal at tolerance: smallest Gram eigenvalue ") + buf);
  }
  const Eigen::MatrixXcd Ginv =
      eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() * eig.eigenvectors().adjoint();
  r.duals = V * Ginv;
  r.dual_norms = r.duals.colwise().norm().transpose() * std::sqrt(dt);
  r.B_sup = r.dual_norms.cwiseAbs2().maxCoeff();
  const Eigen::MatrixXcd C = (r.duals.adjoint() * V) * dt;  // C(i, j) = <pi(lambda_j) g, h_i>
  const auto n = static_cast<Eigen::Index>(sys.size());
  r.biorthogonality_residual = (C - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  return r;
}

double uniform_min_delta(const GaborSystem& sys) {
  const auto n = static_cast<Eigen::Index>(sys.size());
  if (n == 0) throw Error("uniform_min_delta: empty family");
  const Eigen::MatrixXcd W = synthesis_matrix(sys) * std::sqrt(sys.window.grid.dt());
  if (n == 1) return W.col(0).norm();
  // dist(w_l, span{w_j : j != l}) is preserved by the isometry Q of W = QR.
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(W);
  const Eigen::Index k = std::min(W.rows(), n);
  const Eigen::MatrixXcd R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  std::vector<double> dist(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ll) {
    const auto l = static_cast<Eigen::Index>(ll);
    Eigen::MatrixXcd others(k, n - 1);
    others << R.leftCols(l), R.rightCols(n - 1 - l);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> q2(others);
    const Eigen::VectorXcd c = q2.householderQ().adjoint() * R.col(l);
    dist[ll] = c.tail(k - q2.rank()).norm();
  });
  return *std::min_element(dist.begin(), dist.end());
}

double hap_residual(const GaborSystem& sys, const Waveform& f, const Eigen::Vector2d& x, double K_radius) {
  if (!(f.grid == sys.window.grid)) throw Error("hap_residual: grid mismatch");
  if (!(K_radius >= 0.0)) throw Error("hap_residual: K radius must be non-negative");
  if (x.cwiseAbs().maxCoeff() + K_radius > sys.truncation_radius + 1e-12 * std::max(1.0, sys.truncation_radius)) {
    throw Error("insufficient truncation");
  }
  const Waveform target = tf_shift(f, x(0), x(1));
  std::vector<Eigen::Index> local;
  for (Eigen::Index j = 0; j < sys.points.cols(); ++j) {
    if ((sys.points.col(j) - x).cwiseAbs().maxCoeff() <= K_radius + kDedupTol) local.push_back(j);
  }
  if (local.empty()) return f.norm();
  Eigen::MatrixXd pts(2, static_cast<Eigen::Index>(local.size()));
  for (std::size_t k = 0; k < local.size(); ++k) pts.col(static_cast<Eigen::Index>(k)) = sys.points.col(local[k]);
  return ls_residuals(atoms(sys.window, pts), target.samples, f.grid.dt())(0);
}

double completeness_residual(const GaborSystem& sys, const std::vector<Waveform>& probes) {
  if (probes.empty()) return 0.0;
  Eigen::MatrixXcd B(sys.window.grid.L(), static_cast<Eigen::Index>(probes.size()));
  for (std::size_t k = 0; k < probes.size(); ++k) {
    if (!(probes[k].grid == sys.window.grid)) throw Error("completeness_residual: grid mismatch");
    B.col(static_cast<Eigen::Index>(k)) = probes[k].samples;
  }
  return ls_residuals(synthesis_matrix(sys), B, sys.window.grid.dt()).maxCoeff();
}

nlohmann::json to_json(const SpectralBounds& b) {
  return {{"A_est", b.A_est}, {"B_est", b.B_est}, {"subspace_dim", b.subspace_dim}, {"converged", b.converged},
          {"sizes", b.sizes}, {"lower", b.lower},  {"upper", b.upper}};
}

}  // namespace quasilat
