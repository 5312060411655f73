#pragma once

#include "quasilat/core.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace quasilat {

/// Finite truncation of a discrete subset of R^d, d in {1, 2}.
///
/// Points are the columns of a dim x n matrix, sorted lexicographically and
/// pairwise distinct up to kDedupTol. Every point lies in the closed sup-norm
/// ball of radius truncation_radius. `source` is the recipe that produced the
/// set; regenerate(source) reproduces the same columns.
struct PointSet {
  int dim = 1;
  Eigen::MatrixXd points{1, 0};
  double truncation_radius = 0.0;
  nlohmann::json source = nlohmann::json::object();

  std::size_t size() const { return static_cast<std::size_t>(points.cols()); }
  bool empty() const { return points.cols() == 0; }
  auto point(std::size_t i) const { return points.col(static_cast<Eigen::Index>(i)); }
};

/// A full-rank lattice B * Z^d.
class Lattice {
 public:
  /// Throws Error("degenerate lattice") for a singular or non-square basis.
  explicit Lattice(Eigen::MatrixXd basis);

  const Eigen::MatrixXd& basis() const { return basis_; }
  int dim() const { return static_cast<int>(basis_.rows()); }
  double covolume() const { return covolume_; }

 private:
  Eigen::MatrixXd basis_;
  double covolume_;
};

/// Centered symmetric box [-w_1, w_1] x ... x [-w_m, w_m] in internal space.
class Window {
 public:
  /// Throws Error unless every half width is finite and positive.
  explicit Window(std::vector<double> half_widths);

  const std::vector<double>& half_widths() const { return half_widths_; }
  int dim() const { return static_cast<int>(half_widths_.size()); }
  double measure() const;

 private:
  std::vector<double> half_widths_;
};

/// Lattice Gamma in R^d x R^m given by the columns of total_basis. Rows
/// [0, d) are the physical coordinates, rows [d, d + m) the internal ones.
class CutAndProjectScheme {
 public:
  CutAndProjectScheme(Eigen::MatrixXd total_basis, int physical_dim, Window window);

  const Eigen::MatrixXd& total_basis() const { return total_basis_; }
  int physical_dim() const { return d_; }
  int internal_dim() const { return window_.dim(); }
  const Window& window() const { return window_; }
  double covolume() const { return std::abs(total_basis_.determinant()); }
  /// Model-set density mu_H(W) / vol((G x H) / Gamma).
  double density() const { return window_.measure() / covolume(); }

 private:
  Eigen::MatrixXd total_basis_;
  int d_;
  Window window_;
};

struct GenerateOptions {
  /// Upper bound on integer coordinate vectors visited by the enumerator.
  double max_candidates = 2e8;
};

/// { B z : z in Z^d } intersected with [-radius, radius]^d.
PointSet lattice_points_in_box(const Lattice& lat, double radius);

/// { p_G(gamma) : gamma in Gamma, p_H(gamma) in W, |p_G(gamma)|_inf <= radius }.
PointSet model_set_generate(const CutAndProjectScheme& scheme, double radius,
                            const GenerateOptions& opts = {});

/// ps u (-ps) u (sublattice truncated at radius), deduplicated.
PointSet symmetrize(const PointSet& ps, const Lattice& sublattice, double radius);

/// { x + y : x in a, y in b, |x + y|_inf <= radius }. The recipe records
/// `complete`, true when the truncations of a and b are large enough that no
/// sum inside the radius can be missing for the underlying infinite sets
/// (a.truncation_radius >= radius + b.truncation_radius or symmetrically).
PointSet sumset_truncated(const PointSet& a, const PointSet& b, double radius);

/// Pseudo-random thinning of a lattice truncation: each lattice point is kept
/// with probability keep_fraction, decided by a counter-based hash of seed and
/// the integer coordinates (deterministic across platforms).
PointSet thinned_lattice(const Lattice& lat, double radius, double keep_fraction,
                         std::uint64_t seed);

/// Points of ps inside [-radius, radius]^d.
PointSet restrict_to_box(const PointSet& ps, double radius);

/// Canonical point set from raw coordinates (sorted, deduplicated). Throws if
/// a point lies outside the truncation ball.
PointSet make_point_set(int dim, const Eigen::MatrixXd& points, double truncation_radius,
                        nlohmann::json source = {{"kind", "explicit"}});

PointSet negate(const PointSet& ps);
PointSet translate(const PointSet& ps, const Eigen::VectorXd& v);
PointSet scale(const PointSet& ps, double s);

/// Rebuilds a point set from its recipe. Throws for recipes that cannot be
/// regenerated (explicit lists).
PointSet regenerate(const nlohmann::json& source);

/// Fibonacci chain: Gamma = {(n + m tau, n + m tau')}, window [-w, w],
/// physical coordinates multiplied by `physical_scale`.
CutAndProjectScheme fibonacci_scheme(double window_half_width = 1.0, double physical_scale = 1.0);

/// Cartesian product of two schemes (physical and internal spaces multiply).
CutAndProjectScheme product_scheme(const CutAndProjectScheme& a, const CutAndProjectScheme& b);

nlohmann::json scheme_to_json(const CutAndProjectScheme& scheme);
CutAndProjectScheme scheme_from_json(const nlohmann::json& j);

/// Sorts columns lexicographically and drops columns within tol (sup norm) of
/// an earlier one.
Eigen::MatrixXd canonicalize_points(const Eigen::MatrixXd& points, double tol = kDedupTol);

/// True if two columns lie within tol of each other.
bool has_near_duplicates(const Eigen::MatrixXd& points, double tol = kDedupTol);

}  // namespace quasilat
