#include "quasilat/approxcheck.hpp"

#include "quasilat/point_index.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>

namespace quasilat {
namespace {

double sup_norm(const Eigen::Ref<const Eigen::VectorXd>& v) { return v.cwiseAbs().maxCoeff(); }

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) < b(i);
  }
  return false;
}

}  // namespace

DeloneReport delone_report(const PointSet& ps, double interior_margin, const DeloneOptions& opts) {
  if (ps.empty()) throw Error("delone_report: empty point set");
  if (!(interior_margin > 0.0) || interior_margin >= ps.truncation_radius) {
    throw Error("delone_report: interior margin must lie in (0, truncation radius)");
  }
  const PointIndex index(ps.points);
  DeloneReport report;
  report.interior_radius = ps.truncation_radius - interior_margin;

  if (ps.size() >= 2) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ps.size(); ++i) {
      best = std::min(best, *index.nearest_distance(ps.point(i), i));
    }
    report.min_separation = best;
  }

  double step = 0.0;
  if (opts.probe_step) {
    step = *opts.probe_step;
  } else if (report.min_separation > 0.0) {
    step = report.min_separation / 4.0;
  } else {
    step = report.interior_radius / 64.0;
  }
  if (!(step > 0.0)) throw Error("delone_report: probe step must be positive");
  // Keep the probe grid below ~4M points.
  const double per_axis_limit = ps.dim == 1 ? 4e6 : 2e3;
  step = std::max(step, 2.0 * report.interior_radius / per_axis_limit);
  report.probe_step = step;

  const auto kmax = static_cast<long>(std::floor(report.interior_radius / step + 1e-9));
  double cover = 0.0;
  Eigen::VectorXd probe(ps.dim);
  for (long i = -kmax; i <= kmax; ++i) {
    probe(0) = static_cast<double>(i) * step;
    if (ps.dim == 1) {
      cover = std::max(cover, *index.nearest_distance(probe));
      continue;
    }
    for (long j = -kmax; j <= kmax; ++j) {
      probe(1) = static_cast<double>(j) * step;
      cover = std::max(cover, *index.nearest_distance(probe));
    }
  }
  report.covering_radius = cover;

  report.contains_identity = index.find_within(Eigen::VectorXd::Zero(ps.dim), kDedupTol).has_value();
  report.is_symmetric = true;
  for (std::size_t i = 0; i < ps.size() && report.is_symmetric; ++i) {
    report.is_symmetric = index.find_within(-ps.point(i), kDedupTol).has_value();
  }
  return report;
}

std::optional<std::vector<std::size_t>> greedy_set_cover(const std::vector<std::vector<std::size_t>>& cover_sets,
                                                         std::size_t universe, std::size_t max_picks) {
  std::vector<char> covered(universe, 0);
  std::size_t remaining = universe;
  std::vector<std::size_t> chosen;
  while (remaining > 0) {
    if (chosen.size() >= max_picks) return std::nullopt;
    std::size_t best = cover_sets.size();
    std::size_t best_gain = 0;
    for (std::size_t c = 0; c < cover_sets.size(); ++c) {
      std::size_t gain = 0;
      for (std::size_t t : cover_sets[c]) gain += covered[t] ? 0 : 1;
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    if (best_gain == 0) return std::nullopt;
    for (std::size_t t : cover_sets[best]) {
      if (!covered[t]) {
        covered[t] = 1;
        --remaining;
      }
    }
    chosen.push_back(best);
  }
  return chosen;
}

CoverResult find_cover_set(const PointSet& sumset, const PointSet& base, const CoverOptions& opts) {
  if (sumset.dim != base.dim) throw Error("find_cover_set: dimension mismatch");
  if (!(opts.coverage_tol > 0.0)) throw Error("find_cover_set: coverage_tol must be positive");
  double region = opts.verified_region_radius.value_or(std::min(sumset.truncation_radius, base.truncation_radius / 2.0));
  region = std::min(region, sumset.truncation_radius);
  const double candidate_reach = base.truncation_radius - region;
  if (!(region > 0.0) || candidate_reach < 0.0) {
    throw Error("find_cover_set: base truncation too small for the verified region");
  }

  std::vector<std::size_t> targets;
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < sumset.size(); ++i) {
    const double r = sup_norm(sumset.point(i));
    if (r <= region + 1e-12 * std::max(1.0, region)) targets.push_back(i);
    if (r <= candidate_reach + 1e-12 * std::max(1.0, candidate_reach)) candidates.push_back(i);
  }
  // Tie-break order: smallest sup norm, then lexicographic.
  std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    const double na = sup_norm(sumset.point(a));
    const double nb = sup_norm(sumset.point(b));
    if (na != nb) return na < nb;
    return lex_less(sumset.point(a), sumset.point(b));
  });

  const PointIndex base_index(base.points);
  std::vector<std::vector<std::size_t>> cover_sets(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const Eigen::VectorXd f = sumset.point(candidates[c]);
    for (std::size_t t = 0; t < targets.size(); ++t) {
      if (base_index.find_within(sumset.point(targets[t]) - f, opts.coverage_tol)) cover_sets[c].push_back(t);
    }
  }

  const auto picks = greedy_set_cover(cover_sets, targets.size(), opts.max_iterations);
  if (!picks) throw Error("not approximately closed at this truncation");

  CoverResult result;
  result.coverage_tol = opts.coverage_tol;
  result.verified_region_radius = region;
  result.greedy_k = picks->size();
  std::vector<std::size_t> chosen = *picks;
  if (opts.minimize) {
    const auto search = exhaustive_set_cover(cover_sets, targets.size(), picks->size() - 1, opts.max_combinations);
    if (search.picks) chosen = *search.picks;
    result.minimal = search.complete;
  }
  for (std::size_t c : chosen) result.defect_set.push_back(sumset.point(candidates[c]));
  std::sort(result.defect_set.begin(), result.defect_set.end(), lex_less);
  result.k = result.defect_set.size();
  return result;
}

ExhaustiveCover exhaustive_set_cover(const std::vector<std::vector<std::size_t>>& cover_sets, std::size_t universe,
                                     std::size_t max_size, std::size_t max_combinations) {
  using Bits = std::vector<std::uint64_t>;
  const std::size_t words = (universe + 63) / 64;
  std::vector<Bits> masks(cover_sets.size(), Bits(words, 0));
  for (std::size_t c = 0; c < cover_sets.size(); ++c) {
    for (std::size_t t : cover_sets[c]) masks[c][t / 64] |= std::uint64_t{1} << (t % 64);
  }
  Bits full(words, ~std::uint64_t{0});
  if (universe % 64 != 0 && words > 0) full.back() = (std::uint64_t{1} << (universe % 64)) - 1;

  ExhaustiveCover out;
  if (universe == 0) {
    out.picks = std::vector<std::size_t>{};
    return out;
  }
  std::size_t visited = 0;
  std::vector<std::size_t> stack;
  // Depth-first over increasing index tuples of a fixed size.
  std::function<bool(std::size_t, std::size_t, const Bits&)> search = [&](std::size_t start, std::size_t left,
                                                                          const Bits& acc) -> bool {
    if (left == 0) {
      if (++visited > max_combinations) {
        out.complete = false;
        return true;
      }
      return acc == full;
    }
    for (std::size_t c = start; c + left <= masks.size(); ++c) {
      Bits next = acc;
      for (std::size_t w = 0; w < words; ++w) next[w] |= masks[c][w];
      stack.push_back(c);
      if (search(c + 1, left - 1, next)) return true;
      stack.pop_back();
    }
    return false;
  };
  for (std::size_t size = 1; size <= std::min(max_size, masks.size()); ++size) {
    stack.clear();
    if (search(0, size, Bits(words, 0))) {
      if (out.complete) out.picks = stack;
      return out;
    }
  }
  return out;
}

bool verify_cover(const PointSet& sumset, const PointSet& base, const std::vector<Eigen::VectorXd>& defect_set,
                  double tol, double region_radius) {
  const PointIndex base_index(base.points);
  for (std::size_t i = 0; i < sumset.size(); ++i) {
    const auto s = sumset.point(i);
    if (sup_norm(s) > region_radius + 1e-12 * std::max(1.0, region_radius)) continue;
    const bool hit = std::any_of(defect_set.begin(), defect_set.end(), [&](const Eigen::VectorXd& f) {
      return base_index.find_within(s - f, tol).has_value();
    });
    if (!hit) return false;
  }
  return true;
}

nlohmann::json to_json(const CoverResult& r) {
  nlohmann::json defects = nlohmann::json::array();
  for (const auto& f : r.defect_set) defects.push_back(std::vector<double>(f.data(), f.data() + f.size()));
  return {{"k", r.k},
          {"greedy_k", r.greedy_k},
          {"minimal", r.minimal},
          {"defect_set", defects},
          {"verified_region_radius", r.verified_region_radius},
          {"coverage_tol", r.coverage_tol}};
}

nlohmann::json to_json(const DeloneReport& r) {
  return {{"min_separation", r.min_separation},   {"covering_radius", r.covering_radius},
          {"is_symmetric", r.is_symmetric},       {"contains_identity", r.contains_identity},
          {"probe_step", r.probe_step},           {"interior_radius", r.interior_radius}};
}

}  // namespace quasilat
