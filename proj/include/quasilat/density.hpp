#pragma once

#include "quasilat/pointset.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace quasilat {

/// Strong Folner (van Hove) sequence of centered boxes K_n = [-r_n, r_n]^d
/// with Lebesgue measure (2 r_n)^d.
class FolnerBoxes {
 public:
  FolnerBoxes(int dim, std::vector<double> radii);

  int dim() const { return dim_; }
  const std::vector<double>& radii() const { return radii_; }
  std::size_t size() const { return radii_.size(); }
  double measure(std::size_t n) const { return std::pow(2.0 * radii_.at(n), dim_); }

 private:
  int dim_;
  std::vector<double> radii_;
};

struct DensityReport {
  std::vector<double> radii;
  std::vector<double> lower_estimates;  // inf_x |Lambda cap (x + K_n)| / mu(K_n)
  std::vector<double> upper_estimates;  // sup_x |Lambda cap (x + K_n)| / mu(K_n)
  std::vector<std::size_t> lower_counts;
  std::vector<std::size_t> upper_counts;
  /// Limits extrapolated from all per-n estimates (see extrapolate_limit);
  /// the raw last-n values are kept alongside.
  double D_minus = 0.0;
  double D_plus = 0.0;
  double D_minus_last = 0.0;
  double D_plus_last = 0.0;
  /// Least-squares slope of the last three per-n estimates against r_n.
  double slope_minus = 0.0;
  double slope_plus = 0.0;
  int extrapolation_order = 0;
  double translate_step = 0.0;
  double scan_region_radius = 0.0;
  std::size_t translates = 0;
};

struct ScanOptions {
  /// Translate grid spacing; default half the minimum separation.
  std::optional<double> translate_step;
  /// Half width of the scanned translate region; default
  /// min(admissible, smallest radius).
  std::optional<double> scan_region_radius;
  /// Center of the scanned translate region; default the origin.
  std::optional<Eigen::VectorXd> scan_center;
};

/// Exact number of points in the closed box x + [-r, r]^d (boundary points
/// within kDedupTol count). Throws Error("insufficient truncation") if the box
/// leaves the truncation region.
std::size_t count_in_translate(const PointSet& ps, const Eigen::VectorXd& x, double r);

/// Lower/upper Beurling density estimates over a Folner box sequence, scanning
/// translates on a grid.
DensityReport density_scan(const PointSet& ps, const FolnerBoxes& boxes, const ScanOptions& opts = {});

/// mu(K_n K cap K_n^c K) / mu(K_n) for K = [-a, a]^d.
template <typename Scalar>
Scalar van_hove_ratio(Scalar r, Scalar a, int dim) {
  using std::pow;
  using std::max;
  const Scalar outer = pow(Scalar(2) * r + Scalar(2) * a, dim);
  const Scalar inner = pow(max(Scalar(2) * r - Scalar(2) * a, Scalar(0)), dim);
  return (outer - inner) / pow(Scalar(2) * r, dim);
}

inline double van_hove_ratio(const FolnerBoxes& boxes, std::size_t n, double a) {
  if (!(a >= 0.0)) throw Error("van_hove_ratio: K half width must be non-negative");
  return van_hove_ratio<double>(boxes.radii().at(n), a, boxes.dim());
}

/// Limit of values(s) as s -> infinity under the model
/// values = D + c_1 / s + ... + c_order / s^order, fitted by least squares
/// over all samples with residuals weighted by s. Boundary terms of box
/// counts oscillate with the position of the box edge relative to the
/// points, so an exact fit through a few tail samples amplifies that
/// oscillation; a low-order fit over many radii averages it out.
template <typename Scalar>
Scalar extrapolate_limit(std::span<const Scalar> scales, std::span<const Scalar> values, int order = 1) {
  if (scales.size() != values.size() || scales.empty()) throw Error("extrapolate_limit: size mismatch");
  const auto m = static_cast<Eigen::Index>(scales.size());
  const auto q = std::min<Eigen::Index>(std::max(order, 0), m - 1);
  MatrixX<Scalar> system(m, q + 1);
  VectorX<Scalar> rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Scalar s = scales[static_cast<std::size_t>(i)];
    const Scalar inv = Scalar(1) / s;
    Scalar power = s;
    for (Eigen::Index j = 0; j <= q; ++j) {
      system(i, j) = power;
      power *= inv;
    }
    rhs(i) = s * values[static_cast<std::size_t>(i)];
  }
  return system.colPivHouseholderQr().solve(rhs)(0);
}

nlohmann::json to_json(const DensityReport& r);

}  // namespace quasilat
