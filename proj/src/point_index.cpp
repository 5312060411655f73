#include "quasilat/point_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace quasilat {

PointIndex::PointIndex(const Eigen::MatrixXd& points) : points_(points) {
  if (points_.rows() != 1 && points_.rows() != 2) throw Error("point index supports dimension 1 or 2");
  const auto n = points_.cols();
  if (n == 0) {
    cell_start_.assign(2, 0);
    prefix_.assign(4, 0);
    return;
  }
  const double xmin = points_.row(0).minCoeff();
  const double xmax = points_.row(0).maxCoeff();
  const double ymin = dim() > 1 ? points_.row(1).minCoeff() : 0.0;
  const double ymax = dim() > 1 ? points_.row(1).maxCoeff() : 0.0;
  const double wx = std::max(xmax - xmin, 1e-12);
  const double wy = std::max(ymax - ymin, 1e-12);
  // Roughly two points per cell.
  const double per_cell = 2.0;
  cell_ = dim() > 1 ? std::sqrt(wx * wy * per_cell / static_cast<double>(n)) : wx * per_cell / static_cast<double>(n);
  cell_ = std::max({cell_, wx / 4096.0, wy / 4096.0, 1e-9});
  x0_ = xmin;
  y0_ = ymin;
  nx_ = static_cast<long>(std::floor(wx / cell_)) + 1;
  ny_ = dim() > 1 ? static_cast<long>(std::floor(wy / cell_)) + 1 : 1;

  std::vector<std::size_t> counts(static_cast<std::size_t>(nx_ * ny_), 0);
  std::vector<std::size_t> owner(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t id = cell_id(cell_x(points_(0, i)), cell_y(coord_y(i)));
    owner[static_cast<std::size_t>(i)] = id;
    ++counts[id];
  }
  cell_start_.assign(counts.size() + 1, 0);
  for (std::size_t c = 0; c < counts.size(); ++c) cell_start_[c + 1] = cell_start_[c] + counts[c];
  members_.resize(static_cast<std::size_t>(n));
  std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
  for (Eigen::Index i = 0; i < n; ++i) members_[fill[owner[static_cast<std::size_t>(i)]]++] = static_cast<std::size_t>(i);

  const auto stride = static_cast<std::size_t>(nx_ + 1);
  prefix_.assign(stride * static_cast<std::size_t>(ny_ + 1), 0);
  for (long iy = 0; iy < ny_; ++iy) {
    for (long ix = 0; ix < nx_; ++ix) {
      const auto c = counts[cell_id(ix, iy)];
      prefix_[static_cast<std::size_t>(iy + 1) * stride + static_cast<std::size_t>(ix + 1)] =
          c + prefix_[static_cast<std::size_t>(iy) * stride + static_cast<std::size_t>(ix + 1)] +
          prefix_[static_cast<std::size_t>(iy + 1) * stride + static_cast<std::size_t>(ix)] -
          prefix_[static_cast<std::size_t>(iy) * stride + static_cast<std::size_t>(ix)];
    }
  }
}

long PointIndex::cell_x(double x) const {
  return std::clamp(static_cast<long>(std::floor((x - x0_) / cell_)), 0L, nx_ - 1);
}

long PointIndex::cell_y(double y) const {
  if (dim() == 1) return 0;
  return std::clamp(static_cast<long>(std::floor((y - y0_) / cell_)), 0L, ny_ - 1);
}

std::size_t PointIndex::count_cells(long ix0, long ix1, long iy0, long iy1, double xlo, double xhi, double ylo,
                                    double yhi) const {
  std::size_t total = 0;
  const auto stride = static_cast<std::size_t>(nx_ + 1);
  auto block_sum = [&](long ax, long bx, long ay, long by) -> std::size_t {
    // Inclusive cell ranges [ax, bx] x [ay, by].
    if (ax > bx || ay > by) return 0;
    const auto P = [&](long x, long y) { return prefix_[static_cast<std::size_t>(y) * stride + static_cast<std::size_t>(x)]; };
    return P(bx + 1, by + 1) - P(ax, by + 1) - P(bx + 1, ay) + P(ax, ay);
  };
  auto scan_cell = [&](long ix, long iy) {
    const std::size_t id = cell_id(ix, iy);
    for (std::size_t k = cell_start_[id]; k < cell_start_[id + 1]; ++k) {
      const auto col = static_cast<Eigen::Index>(members_[k]);
      const double x = points_(0, col);
      const double y = coord_y(col);
      if (x >= xlo && x <= xhi && y >= ylo && y <= yhi) ++total;
    }
  };
  // Cells strictly inside both ranges are fully covered by the box.
  if (dim() == 1) {
    total += block_sum(ix0 + 1, ix1 - 1, 0, 0);
    scan_cell(ix0, 0);
    if (ix1 != ix0) scan_cell(ix1, 0);
    return total;
  }
  total += block_sum(ix0 + 1, ix1 - 1, iy0 + 1, iy1 - 1);
  for (long ix = ix0; ix <= ix1; ++ix) {
    scan_cell(ix, iy0);
    if (iy1 != iy0) scan_cell(ix, iy1);
  }
  for (long iy = iy0 + 1; iy < iy1; ++iy) {
    scan_cell(ix0, iy);
    if (ix1 != ix0) scan_cell(ix1, iy);
  }
  return total;
}

std::size_t PointIndex::count_in_box(const Eigen::Ref<const Eigen::VectorXd>& center, double half_width,
                                     double tol) const {
  if (points_.cols() == 0) return 0;
  const double reach = half_width + tol;
  const double xlo = center(0) - reach, xhi = center(0) + reach;
  const double ylo = dim() > 1 ? center(1) - reach : 0.0;
  const double yhi = dim() > 1 ? center(1) + reach : 0.0;
  const double xmax = x0_ + cell_ * static_cast<double>(nx_);
  const double ymax = y0_ + cell_ * static_cast<double>(ny_);
  if (xhi < x0_ || xlo > xmax) return 0;
  if (dim() > 1 && (yhi < y0_ || ylo > ymax)) return 0;
  return count_cells(cell_x(xlo), cell_x(xhi), cell_y(ylo), cell_y(yhi), xlo, xhi, ylo, yhi);
}

std::optional<double> PointIndex::nearest_distance(const Eigen::Ref<const Eigen::VectorXd>& q,
                                                   std::optional<std::size_t> exclude) const {
  if (points_.cols() == 0 || (exclude && points_.cols() == 1)) return std::nullopt;
  const long cx = cell_x(q(0));
  const long cy = cell_y(dim() > 1 ? q(1) : 0.0);
  double best = std::numeric_limits<double>::infinity();
  const long max_ring = std::max(nx_, ny_);
  for (long ring = 0; ring <= max_ring; ++ring) {
    // Points in cells at Chebyshev cell distance `ring` are at least
    // (ring - 1) * cell_ away from q, also when q was clamped into the grid.
    if (static_cast<double>(ring - 1) * cell_ > best) break;
    const long ylo = dim() > 1 ? cy - ring : 0;
    const long yhi = dim() > 1 ? cy + ring : 0;
    for (long iy = ylo; iy <= yhi; ++iy) {
      if (iy < 0 || iy >= ny_) continue;
      for (long ix = cx - ring; ix <= cx + ring; ++ix) {
        if (ix < 0 || ix >= nx_) continue;
        if (std::max(std::abs(ix - cx), std::abs(iy - cy)) != ring) continue;
        const std::size_t id = cell_id(ix, iy);
        for (std::size_t k = cell_start_[id]; k < cell_start_[id + 1]; ++k) {
          if (exclude && members_[k] == *exclude) continue;
          const auto col = static_cast<Eigen::Index>(members_[k]);
          best = std::min(best, (points_.col(col) - q).cwiseAbs().maxCoeff());
        }
      }
    }
  }
  return best;
}

std::optional<std::size_t> PointIndex::find_within(const Eigen::Ref<const Eigen::VectorXd>& q, double tol) const {
  if (points_.cols() == 0) return std::nullopt;
  const long ix0 = cell_x(q(0) - tol), ix1 = cell_x(q(0) + tol);
  const long iy0 = cell_y(dim() > 1 ? q(1) - tol : 0.0), iy1 = cell_y(dim() > 1 ? q(1) + tol : 0.0);
  for (long iy = iy0; iy <= iy1; ++iy) {
    for (long ix = ix0; ix <= ix1; ++ix) {
      const std::size_t id = cell_id(ix, iy);
      for (std::size_t k = cell_start_[id]; k < cell_start_[id + 1]; ++k) {
        const auto col = static_cast<Eigen::Index>(members_[k]);
        if ((points_.col(col) - q).cwiseAbs().maxCoeff() <= tol) return members_[k];
      }
    }
  }
  return std::nullopt;
}

}  // namespace quasilat
