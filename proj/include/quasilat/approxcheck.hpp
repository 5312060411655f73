#pragma once

#include "quasilat/pointset.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <optional>
#include <vector>

namespace quasilat {

struct DeloneReport {
  double min_separation = 0.0;   // min pairwise sup-norm distance
  double covering_radius = 0.0;  // max probe-to-nearest-point distance over the interior
  bool is_symmetric = false;
  bool contains_identity = false;
  double probe_step = 0.0;
  double interior_radius = 0.0;
};

struct DeloneOptions {
  /// Probe grid spacing; defaults to min_separation / 4 (or interior / 64 when
  /// the set has a single point).
  std::optional<double> probe_step;
};

/// Uniform discreteness and relative density diagnostics. Probes cover
/// [-(R - margin), R - margin]^d where R is the truncation radius.
DeloneReport delone_report(const PointSet& ps, double interior_margin, const DeloneOptions& opts = {});

/// Witness for Lambda^2 within F + Lambda on a truncated region.
struct CoverResult {
  std::vector<Eigen::VectorXd> defect_set;
  std::size_t k = 0;
  double coverage_tol = 1e-6;
  double verified_region_radius = 0.0;
  std::size_t greedy_k = 0;
  /// True when an exhaustive search showed no smaller F exists in the pool.
  bool minimal = false;
};

struct CoverOptions {
  double coverage_tol = 1e-6;
  /// Targets are the sumset points inside this radius. Default:
  /// min(sumset radius, base radius / 2). Candidates f are restricted to
  /// |f| <= base radius - verified radius so that f + base is not clipped.
  std::optional<double> verified_region_radius;
  std::size_t max_iterations = 256;
  /// After the greedy pass, search all smaller subsets of the candidate pool
  /// for a cover and return the first one found (candidate order).
  bool minimize = false;
  std::size_t max_combinations = 20'000'000;
};

/// Greedy set cover of the sumset by translates f + base, f drawn from the
/// sumset itself. Among candidates of equal gain the one with the smallest
/// sup norm wins, then the lexicographically smallest. Throws
/// Error("not approximately closed at this truncation") when max_iterations
/// picks do not cover the verified region.
CoverResult find_cover_set(const PointSet& sumset, const PointSet& base, const CoverOptions& opts = {});

/// Re-checks a defect set: every sumset point within region_radius has some
/// f in defect_set with (s - f) within tol of a base point.
bool verify_cover(const PointSet& sumset, const PointSet& base, const std::vector<Eigen::VectorXd>& defect_set,
                  double tol, double region_radius);

/// Greedy set cover over abstract cover sets. Candidates are listed in
/// tie-break order; the earliest candidate with maximal gain is taken each
/// round. Returns chosen candidate indices, or nullopt if the universe is not
/// covered within max_picks.
std::optional<std::vector<std::size_t>> greedy_set_cover(const std::vector<std::vector<std::size_t>>& cover_sets,
                                                         std::size_t universe, std::size_t max_picks);

struct ExhaustiveCover {
  std::optional<std::vector<std::size_t>> picks;
  /// False when max_combinations ran out before the search finished.
  bool complete = true;
};

/// Smallest cover of size <= max_size, trying sizes in increasing order and
/// subsets in lexicographic candidate order.
ExhaustiveCover exhaustive_set_cover(const std::vector<std::vector<std::size_t>>& cover_sets, std::size_t universe,
                                     std::size_t max_size, std::size_t max_combinations);

nlohmann::json to_json(const CoverResult& r);
nlohmann::json to_json(const DeloneReport& r);

}  // namespace quasilat
