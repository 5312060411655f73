#include "quasilat/density.hpp"

#include "quasilat/parallel.hpp"
#include "quasilat/point_index.hpp"

#include <limits>

namespace quasilat {
namespace {

double slack(double r) { return 1e-12 * std::max(1.0, r); }

double tail_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = std::min<std::size_t>(3, x.size());
  if (n < 2) return 0.0;
  const std::size_t first = x.size() - n;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = first; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = first; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

double default_step(const PointSet& ps, const PointIndex& index, double smallest_radius) {
  if (ps.size() < 2) return smallest_radius / 8.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ps.size(); ++i) best = std::min(best, *index.nearest_distance(ps.point(i), i));
  return best / 2.0;
}

}  // namespace

FolnerBoxes::FolnerBoxes(int dim, std::vector<double> radii) : dim_(dim), radii_(std::move(radii)) {
  if (dim_ != 1 && dim_ != 2) throw Error("Folner boxes: dimension must be 1 or 2");
  if (radii_.empty()) throw Error("Folner boxes: need at least one radius");
  for (std::size_t i = 0; i < radii_.size(); ++i) {
    if (!(radii_[i] > 0.0) || !std::isfinite(radii_[i])) throw Error("Folner boxes: radii must be positive");
    if (i > 0 && !(radii_[i] > radii_[i - 1])) throw Error("Folner boxes: radii must be strictly increasing");
  }
}

std::size_t count_in_translate(const PointSet& ps, const Eigen::VectorXd& x, double r) {
  if (x.size() != ps.dim) throw Error("count_in_translate: dimension mismatch");
  if (!(r > 0.0)) throw Error("count_in_translate: radius must be positive");
  if (x.cwiseAbs().maxCoeff() + r > ps.truncation_radius + slack(ps.truncation_radius)) {
    throw Error("insufficient truncation");
  }
  return PointIndex(ps.points).count_in_box(x, r);
}

DensityReport density_scan(const PointSet& ps, const FolnerBoxes& boxes, const ScanOptions& opts) {
  if (boxes.dim() != ps.dim) throw Error("density_scan: dimension mismatch");
  const PointIndex index(ps.points);
  const auto& radii = boxes.radii();
  const Eigen::VectorXd center = opts.scan_center.value_or(Eigen::VectorXd::Zero(ps.dim));
  if (center.size() != ps.dim) throw Error("density_scan: scan center dimension mismatch");

  const double admissible = ps.truncation_radius - radii.back() - center.cwiseAbs().maxCoeff();
  if (admissible < -slack(ps.truncation_radius)) throw Error("insufficient truncation");
  const double region = opts.scan_region_radius.value_or(std::max(0.0, std::min(admissible, radii.front())));
  if (region < 0.0 || region > admissible + slack(ps.truncation_radius)) throw Error("insufficient truncation");
  const double step = opts.translate_step.value_or(default_step(ps, index, radii.front()));
  if (!(step > 0.0)) throw Error("density_scan: translate step must be positive");

  const auto kmax = static_cast<long>(std::floor(region / step + 1e-9));
  const auto side = static_cast<std::size_t>(2 * kmax + 1);
  const std::size_t total = ps.dim == 1 ? side : side * side;
  auto translate_at = [&](std::size_t t) {
    Eigen::VectorXd x = center;
    x(0) += static_cast<double>(static_cast<long>(t % side) - kmax) * step;
    if (ps.dim == 2) x(1) += static_cast<double>(static_cast<long>(t / side) - kmax) * step;
    return x;
  };

  DensityReport report;
  report.radii = radii;
  report.translate_step = step;
  report.scan_region_radius = region;
  report.translates = total;
  for (std::size_t n = 0; n < radii.size(); ++n) {
    std::vector<std::size_t> counts(total);
    parallel_for(total, [&](std::size_t t) { counts[t] = index.count_in_box(translate_at(t), radii[n]); });
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    const double mu = boxes.measure(n);
    report.lower_counts.push_back(*lo);
    report.upper_counts.push_back(*hi);
    report.lower_estimates.push_back(static_cast<double>(*lo) / mu);
    report.upper_estimates.push_back(static_cast<double>(*hi) / mu);
  }

  report.extrapolation_order = 1;
  report.D_minus = extrapolate_limit<double>(radii, report.lower_estimates, 1);
  report.D_plus = extrapolate_limit<double>(radii, report.upper_estimates, 1);
  report.D_minus_last = report.lower_estimates.back();
  report.D_plus_last = report.upper_estimates.back();
  report.slope_minus = tail_slope(radii, report.lower_estimates);
  report.slope_plus = tail_slope(radii, report.upper_estimates);
  return report;
}

nlohmann::json to_json(const DensityReport& r) {
  return {{"radii", r.radii},
          {"lower_estimates", r.lower_estimates},
          {"upper_estimates", r.upper_estimates},
          {"lower_counts", r.lower_counts},
          {"upper_counts", r.upper_counts},
          {"D_minus", r.D_minus},
          {"D_plus", r.D_plus},
          {"D_minus_last", r.D_minus_last},
          {"D_plus_last", r.D_plus_last},
          {"slope_minus", r.slope_minus},
          {"slope_plus", r.slope_plus},
          {"extrapolation_order", r.extrapolation_order},
          {"translate_step", r.translate_step},
          {"scan_region_radius", r.scan_region_radius},
          {"translates", r.translates}};
}

}  // namespace quasilat
