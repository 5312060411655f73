#pragma once

#include "quasilat/core.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace quasilat {

/// Uniform bucket grid over a 1-D or 2-D point cloud (columns of a matrix).
///
/// Supports exact closed-box counting (interior cells through a 2-D prefix
/// sum, boundary cells point by point) and sup-norm nearest-point queries.
class PointIndex {
 public:
  explicit PointIndex(const Eigen::MatrixXd& points);

  /// Number of points p with |p - center|_inf <= half_width + tol.
  std::size_t count_in_box(const Eigen::Ref<const Eigen::VectorXd>& center, double half_width,
                           double tol = kDedupTol) const;

  /// Sup-norm distance from q to the nearest point (skipping column
  /// `exclude` if given), or nullopt if there is no candidate.
  std::optional<double> nearest_distance(const Eigen::Ref<const Eigen::VectorXd>& q,
                                         std::optional<std::size_t> exclude = std::nullopt) const;

  /// Index (column of the original matrix) of a point within tol of q.
  std::optional<std::size_t> find_within(const Eigen::Ref<const Eigen::VectorXd>& q, double tol) const;

  std::size_t size() const { return static_cast<std::size_t>(points_.cols()); }
  int dim() const { return static_cast<int>(points_.rows()); }

 private:
  long cell_x(double x) const;
  long cell_y(double y) const;
  std::size_t cell_id(long ix, long iy) const { return static_cast<std::size_t>(iy * nx_ + ix); }
  double coord_y(Eigen::Index col) const { return dim() > 1 ? points_(1, col) : 0.0; }
  // Counts points inside the closed box [lo, hi] over the inclusive cell range.
  std::size_t count_cells(long ix0, long ix1, long iy0, long iy1, double xlo, double xhi, double ylo,
                          double yhi) const;

  Eigen::MatrixXd points_;
  double x0_ = 0.0, y0_ = 0.0, cell_ = 1.0;
  long nx_ = 1, ny_ = 1;
  std::vector<std::size_t> cell_start_;  // CSR offsets, size nx*ny + 1
  std::vector<std::size_t> members_;     // point indices grouped by cell
  std::vector<std::size_t> prefix_;      // (nx+1) x (ny+1) cumulative cell counts
};

}  // namespace quasilat
