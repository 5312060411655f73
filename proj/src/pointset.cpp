#include "quasilat/pointset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace quasilat {
namespace {

using json = nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw ParseError("expected a non-empty matrix");
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (rows[i].size() != static_cast<std::size_t>(c)) throw ParseError("ragged matrix");
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

double inclusion_slack(double bound) { return 1e-12 * std::max(1.0, bound); }

// Visits every integer vector z with |(B z)_i| <= bounds_i for all rows i.
// The last D-1 coordinates are bounded through B^{-1} and iterated; the first
// one is solved for as an interval per row.
template <typename Visit>
void enumerate_bounded(const Eigen::MatrixXd& basis, const Eigen::VectorXd& bounds,
                       double max_candidates, Visit&& visit) {
  const Eigen::Index dims = basis.cols();
  const Eigen::MatrixXd inverse = basis.inverse();
  std::vector<long> zmax(static_cast<std::size_t>(dims));
  double candidates = 1.0;
  for (Eigen::Index j = 0; j < dims; ++j) {
    const double reach = inverse.row(j).cwiseAbs().dot(bounds) + 1e-9;
    if (!std::isfinite(reach) || reach > 1e15) {
      throw Error("enumeration bound exceeded: coordinate " + std::to_string(j) +
                  " is unbounded by the row constraints");
    }
    zmax[static_cast<std::size_t>(j)] = static_cast<long>(std::floor(reach));
    if (j > 0) candidates *= 2.0 * static_cast<double>(zmax[static_cast<std::size_t>(j)]) + 1.0;
  }
  if (candidates > max_candidates) {
    std::ostringstream msg;
    msg << "enumeration bound exceeded: " << candidates << " integer candidates (limit "
        << max_candidates << ")";
    throw Error(msg.str());
  }

  Eigen::VectorXd slack = bounds.unaryExpr([](double b) { return inclusion_slack(b); });
  Eigen::VectorXi z = Eigen::VectorXi::Zero(dims);
  Eigen::VectorXd partial = Eigen::VectorXd::Zero(basis.rows());
  const Eigen::VectorXd first = basis.col(0);

  auto leaf = [&] {
    double lo = -static_cast<double>(zmax[0]);
    double hi = static_cast<double>(zmax[0]);
    for (Eigen::Index i = 0; i < basis.rows(); ++i) {
      const double a = first(i);
      const double c = partial(i);
      const double b = bounds(i) + slack(i);
      if (a == 0.0) {
        if (std::abs(c) > b) return;
        continue;
      }
      double l = (-b - c) / a;
      double h = (b - c) / a;
      if (l > h) std::swap(l, h);
      lo = std::max(lo, l);
      hi = std::min(hi, h);
    }
    const long zlo = static_cast<long>(std::ceil(lo - 1e-9));
    const long zhi = static_cast<long>(std::floor(hi + 1e-9));
    for (long z0 = zlo; z0 <= zhi; ++z0) {
      const Eigen::VectorXd y = partial + static_cast<double>(z0) * first;
      if (((y.cwiseAbs() - bounds).array() > slack.array()).any()) continue;
      z(0) = static_cast<int>(z0);
      visit(z, y);
    }
  };

  // Iterative odometer over coordinates 1..dims-1.
  if (dims == 1) {
    leaf();
    return;
  }
  for (Eigen::Index j = 1; j < dims; ++j) {
    z(j) = static_cast<int>(-zmax[static_cast<std::size_t>(j)]);
    partial += static_cast<double>(z(j)) * basis.col(j);
  }
  while (true) {
    leaf();
    Eigen::Index j = 1;
    for (; j < dims; ++j) {
      if (z(j) < zmax[static_cast<std::size_t>(j)]) {
        ++z(j);
        partial += basis.col(j);
        break;
      }
      partial -= static_cast<double>(z(j) + zmax[static_cast<std::size_t>(j)]) * basis.col(j);
      z(j) = static_cast<int>(-zmax[static_cast<std::size_t>(j)]);
    }
    if (j == dims) break;
  }
}

// Snap-grid hash for tolerance-based duplicate detection.
struct CellKey {
  long long x, y;
  bool operator==(const CellKey&) const = default;
};
struct CellHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    return std::hash<long long>{}(k.x * 0x9E3779B97F4A7C15LL ^ k.y);
  }
};

class NearDuplicateFinder {
 public:
  explicit NearDuplicateFinder(double tol) : tol_(tol), cell_(std::max(4.0 * tol, 1e-300)) {}

  // Returns true if p is within tol of a stored point; otherwise stores it.
  template <typename Col>
  bool check_and_insert(const Col& p, std::size_t index, const Eigen::MatrixXd& all) {
    const CellKey base = key(p);
    const long long span_y = p.size() > 1 ? 1 : 0;
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -span_y; dy <= span_y; ++dy) {
        auto it = cells_.find({base.x + dx, base.y + dy});
        if (it == cells_.end()) continue;
        for (std::size_t other : it->second) {
          if ((all.col(static_cast<Eigen::Index>(other)) - p).cwiseAbs().maxCoeff() <= tol_) {
            return true;
          }
        }
      }
    }
    cells_[base].push_back(index);
    return false;
  }

 private:
  template <typename Col>
  CellKey key(const Col& p) const {
    const auto snap = [this](double v) { return static_cast<long long>(std::floor(v / cell_)); };
    return {snap(p(0)), p.size() > 1 ? snap(p(1)) : 0};
  }

  double tol_;
  double cell_;
  std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> cells_;
};

std::vector<std::size_t> lexicographic_order(const Eigen::MatrixXd& points) {
  std::vector<std::size_t> order(static_cast<std::size_t>(points.cols()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    for (Eigen::Index r = 0; r < points.rows(); ++r) {
      const double pa = points(r, static_cast<Eigen::Index>(a));
      const double pb = points(r, static_cast<Eigen::Index>(b));
      if (pa != pb) return pa < pb;
    }
    return false;
  });
  return order;
}

Eigen::MatrixXd hstack(const std::vector<const Eigen::MatrixXd*>& blocks, Eigen::Index rows) {
  Eigen::Index cols = 0;
  for (const auto* b : blocks) cols += b->cols();
  Eigen::MatrixXd out(rows, cols);
  Eigen::Index at = 0;
  for (const auto* b : blocks) {
    out.middleCols(at, b->cols()) = *b;
    at += b->cols();
  }
  return out;
}

Eigen::MatrixXd within_box(const Eigen::MatrixXd& points, double radius) {
  std::vector<Eigen::Index> keep;
  const double limit = radius + inclusion_slack(radius);
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    if (points.col(i).cwiseAbs().maxCoeff() <= limit) keep.push_back(i);
  }
  Eigen::MatrixXd out(points.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = points.col(keep[k]);
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void require_radius(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw Error("radius must be positive and finite");
}

}  // namespace

// ---------------------------------------------------------------------------

Lattice::Lattice(Eigen::MatrixXd basis) : basis_(std::move(basis)), covolume_(0.0) {
  if (basis_.rows() != basis_.cols() || basis_.rows() < 1 || basis_.rows() > 2) {
    throw Error("degenerate lattice: basis must be 1x1 or 2x2");
  }
  covolume_ = std::abs(basis_.determinant());
  const double scale = std::pow(basis_.cwiseAbs().maxCoeff(), static_cast<double>(basis_.rows()));
  if (!std::isfinite(covolume_) || covolume_ <= 1e-12 * scale || covolume_ == 0.0) {
    throw Error("degenerate lattice");
  }
}

Window::Window(std::vector<double> half_widths) : half_widths_(std::move(half_widths)) {
  if (half_widths_.empty()) throw Error("window needs at least one internal dimension");
  for (double w : half_widths_) {
    if (!(w > 0.0) || !std::isfinite(w)) throw Error("window half widths must be positive");
  }
}

double Window::measure() const {
  double m = 1.0;
  for (double w : half_widths_) m *= 2.0 * w;
  return m;
}

CutAndProjectScheme::CutAndProjectScheme(Eigen::MatrixXd total_basis, int physical_dim, Window window)
    : total_basis_(std::move(total_basis)), d_(physical_dim), window_(std::move(window)) {
  if (d_ < 1 || d_ > 2) throw Error("physical dimension must be 1 or 2");
  const Eigen::Index dims = d_ + window_.dim();
  if (total_basis_.rows() != dims || total_basis_.cols() != dims) {
    throw Error("total basis must be (d+m) x (d+m)");
  }
  const double scale = std::pow(total_basis_.cwiseAbs().maxCoeff(), static_cast<double>(dims));
  if (!(covolume() > 1e-12 * scale)) throw Error("degenerate lattice: total basis is singular");
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd canonicalize_points(const Eigen::MatrixXd& points, double tol) {
  const auto order = lexicographic_order(points);
  NearDuplicateFinder finder(tol);
  std::vector<std::size_t> keep;
  keep.reserve(order.size());
  for (std::size_t idx : order) {
    if (!finder.check_and_insert(points.col(static_cast<Eigen::Index>(idx)), idx, points)) {
      keep.push_back(idx);
    }
  }
  Eigen::MatrixXd out(points.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = points.col(static_cast<Eigen::Index>(keep[k]));
  }
  return out;
}

bool has_near_duplicates(const Eigen::MatrixXd& points, double tol) {
  NearDuplicateFinder finder(tol);
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    if (finder.check_and_insert(points.col(i), static_cast<std::size_t>(i), points)) return true;
  }
  return false;
}

PointSet make_point_set(int dim, const Eigen::MatrixXd& points, double truncation_radius,
                        nlohmann::json source) {
  if (dim != 1 && dim != 2) throw Error("point sets must have dimension 1 or 2");
  if (points.rows() != dim) throw Error("point matrix must have dim rows");
  if (!(truncation_radius > 0.0)) throw Error("truncation radius must be positive");
  const double limit = truncation_radius + inclusion_slack(truncation_radius);
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    if (!points.col(i).allFinite()) throw Error("point coordinates must be finite");
    if (points.col(i).cwiseAbs().maxCoeff() > limit) {
      throw Error("point outside the truncation radius");
    }
  }
  PointSet ps;
  ps.dim = dim;
  ps.points = canonicalize_points(points);
  ps.truncation_radius = truncation_radius;
  ps.source = std::move(source);
  return ps;
}

PointSet lattice_points_in_box(const Lattice& lat, double radius) {
  require_radius(radius);
  const Eigen::VectorXd bounds = Eigen::VectorXd::Constant(lat.dim(), radius);
  std::vector<Eigen::VectorXd> found;
  enumerate_bounded(lat.basis(), bounds, 2e8,
                    [&](const Eigen::VectorXi&, const Eigen::VectorXd& y) { found.push_back(y); });
  Eigen::MatrixXd pts(lat.dim(), static_cast<Eigen::Index>(found.size()));
  for (std::size_t i = 0; i < found.size(); ++i) pts.col(static_cast<Eigen::Index>(i)) = found[i];
  return make_point_set(lat.dim(), pts, radius,
                        {{"kind", "lattice"}, {"basis", matrix_to_json(lat.basis())}, {"radius", radius}});
}

PointSet model_set_generate(const CutAndProjectScheme& scheme, double radius, const GenerateOptions& opts) {
  require_radius(radius);
  const int d = scheme.physical_dim();
  const int m = scheme.internal_dim();
  Eigen::VectorXd bounds(d + m);
  bounds.head(d).setConstant(radius);
  for (int i = 0; i < m; ++i) bounds(d + i) = scheme.window().half_widths()[static_cast<std::size_t>(i)];

  std::vector<Eigen::VectorXd> found;
  enumerate_bounded(scheme.total_basis(), bounds, opts.max_candidates,
                    [&](const Eigen::VectorXi&, const Eigen::VectorXd& y) { found.push_back(y.head(d)); });
  Eigen::MatrixXd pts(d, static_cast<Eigen::Index>(found.size()));
  for (std::size_t i = 0; i < found.size(); ++i) pts.col(static_cast<Eigen::Index>(i)) = found[i];
  if (has_near_duplicates(pts)) {
    throw Error("physical projection is not injective on the generated truncation");
  }
  return make_point_set(d, pts, radius,
                        {{"kind", "cut_and_project"}, {"scheme", scheme_to_json(scheme)}, {"radius", radius}});
}

PointSet symmetrize(const PointSet& ps, const Lattice& sublattice, double radius) {
  if (ps.dim != sublattice.dim()) throw Error("symmetrize: dimension mismatch");
  require_radius(radius);
  const PointSet sub = lattice_points_in_box(sublattice, radius);
  const Eigen::MatrixXd neg = -ps.points;
  const double trunc = ps.empty() ? radius : std::min(ps.truncation_radius, radius);
  const Eigen::MatrixXd all = within_box(hstack({&ps.points, &neg, &sub.points}, ps.dim), trunc);
  return make_point_set(ps.dim, all, trunc,
                        {{"kind", "symmetrize"},
                         {"base", ps.source},
                         {"sublattice", matrix_to_json(sublattice.basis())},
                         {"radius", radius}});
}

PointSet sumset_truncated(const PointSet& a, const PointSet& b, double radius) {
  if (a.dim != b.dim) throw Error("sumset: dimension mismatch");
  require_radius(radius);
  const double limit = radius + inclusion_slack(radius);

  // b sorted by first coordinate lets each x restrict the y range.
  const auto order = lexicographic_order(b.points);
  std::vector<double> first(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) first[i] = b.points(0, static_cast<Eigen::Index>(order[i]));

  std::vector<Eigen::VectorXd> sums;
  for (Eigen::Index i = 0; i < a.points.cols(); ++i) {
    const auto x = a.points.col(i);
    const auto lo = std::lower_bound(first.begin(), first.end(), -limit - x(0));
    const auto hi = std::upper_bound(first.begin(), first.end(), limit - x(0));
    for (auto it = lo; it != hi; ++it) {
      const auto j = static_cast<Eigen::Index>(order[static_cast<std::size_t>(it - first.begin())]);
      Eigen::VectorXd s = x + b.points.col(j);
      if (s.cwiseAbs().maxCoeff() <= limit) sums.push_back(std::move(s));
    }
  }
  Eigen::MatrixXd pts(a.dim, static_cast<Eigen::Index>(sums.size()));
  for (std::size_t i = 0; i < sums.size(); ++i) pts.col(static_cast<Eigen::Index>(i)) = sums[i];

  const bool complete = a.truncation_radius >= radius + b.truncation_radius ||
                        b.truncation_radius >= radius + a.truncation_radius;
  return make_point_set(a.dim, pts, radius,
                        {{"kind", "sumset"},
                         {"a", a.source},
                         {"b", b.source},
                         {"radius", radius},
                         {"complete", complete}});
}

PointSet thinned_lattice(const Lattice& lat, double radius, double keep_fraction, std::uint64_t seed) {
  require_radius(radius);
  if (!(keep_fraction >= 0.0 && keep_fraction <= 1.0)) throw Error("keep_fraction must lie in [0, 1]");
  const Eigen::VectorXd bounds = Eigen::VectorXd::Constant(lat.dim(), radius);
  std::vector<Eigen::VectorXd> kept;
  enumerate_bounded(lat.basis(), bounds, 2e8, [&](const Eigen::VectorXi& z, const Eigen::VectorXd& y) {
    std::uint64_t h = splitmix64(seed);
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(z(i))));
    }
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    if (u < keep_fraction) kept.push_back(y);
  });
  Eigen::MatrixXd pts(lat.dim(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) pts.col(static_cast<Eigen::Index>(i)) = kept[i];
  return make_point_set(lat.dim(), pts, radius,
                        {{"kind", "thinned_lattice"},
                         {"basis", matrix_to_json(lat.basis())},
                         {"radius", radius},
                         {"keep_fraction", keep_fraction},
                         {"seed", seed}});
}

PointSet restrict_to_box(const PointSet& ps, double radius) {
  require_radius(radius);
  const double trunc = std::min(radius, ps.truncation_radius);
  PointSet out;
  out.dim = ps.dim;
  out.points = within_box(ps.points, trunc);
  out.truncation_radius = trunc;
  out.source = {{"kind", "restrict"}, {"base", ps.source}, {"radius", radius}};
  return out;
}

PointSet negate(const PointSet& ps) {
  return make_point_set(ps.dim, -ps.points, ps.truncation_radius, {{"kind", "negate"}, {"base", ps.source}});
}

PointSet translate(const PointSet& ps, const Eigen::VectorXd& v) {
  if (v.size() != ps.dim) throw Error("translate: dimension mismatch");
  json offset = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) offset.push_back(v(i));
  const Eigen::MatrixXd moved = ps.points.colwise() + v;
  return make_point_set(ps.dim, moved, ps.truncation_radius + v.cwiseAbs().maxCoeff(),
                        {{"kind", "translate"}, {"base", ps.source}, {"offset", offset}});
}

PointSet scale(const PointSet& ps, double s) {
  if (!(s > 0.0)) throw Error("scale factor must be positive");
  return make_point_set(ps.dim, s * ps.points, s * ps.truncation_radius,
                        {{"kind", "scale"}, {"base", ps.source}, {"factor", s}});
}

CutAndProjectScheme fibonacci_scheme(double window_half_width, double physical_scale) {
  const double tau = (1.0 + std::sqrt(5.0)) / 2.0;
  const double tau_conj = (1.0 - std::sqrt(5.0)) / 2.0;
  Eigen::Matrix2d basis;
  basis << physical_scale, physical_scale * tau, 1.0, tau_conj;
  return CutAndProjectScheme(basis, 1, Window({window_half_width}));
}

CutAndProjectScheme product_scheme(const CutAndProjectScheme& a, const CutAndProjectScheme& b) {
  const int da = a.physical_dim(), db = b.physical_dim();
  const int ma = a.internal_dim(), mb = b.internal_dim();
  if (da + db > 2) throw Error("product scheme: physical dimension would exceed 2");
  const int na = da + ma, nb = db + mb;
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(na + nb, na + nb);
  const Eigen::MatrixXd& ba = a.total_basis();
  const Eigen::MatrixXd& bb = b.total_basis();
  // Row layout: phys_a, phys_b, int_a, int_b. Column layout: gens_a, gens_b.
  basis.block(0, 0, da, na) = ba.topRows(da);
  basis.block(da, na, db, nb) = bb.topRows(db);
  basis.block(da + db, 0, ma, na) = ba.bottomRows(ma);
  basis.block(da + db + ma, na, mb, nb) = bb.bottomRows(mb);
  std::vector<double> widths = a.window().half_widths();
  widths.insert(widths.end(), b.window().half_widths().begin(), b.window().half_widths().end());
  return CutAndProjectScheme(basis, da + db, Window(std::move(widths)));
}

nlohmann::json scheme_to_json(const CutAndProjectScheme& scheme) {
  return {{"total_basis", matrix_to_json(scheme.total_basis())},
          {"physical_dim", scheme.physical_dim()},
          {"window", scheme.window().half_widths()}};
}

CutAndProjectScheme scheme_from_json(const nlohmann::json& j) {
  return CutAndProjectScheme(matrix_from_json(j.at("total_basis")), j.at("physical_dim").get<int>(),
                             Window(j.at("window").get<std::vector<double>>()));
}

PointSet regenerate(const nlohmann::json& source) {
  const std::string kind = source.value("kind", "");
  if (kind == "lattice") {
    return lattice_points_in_box(Lattice(matrix_from_json(source.at("basis"))), source.at("radius").get<double>());
  }
  if (kind == "cut_and_project") {
    return model_set_generate(scheme_from_json(source.at("scheme")), source.at("radius").get<double>());
  }
  if (kind == "symmetrize") {
    return symmetrize(regenerate(source.at("base")), Lattice(matrix_from_json(source.at("sublattice"))),
                      source.at("radius").get<double>());
  }
  if (kind == "sumset") {
    return sumset_truncated(regenerate(source.at("a")), regenerate(source.at("b")),
                            source.at("radius").get<double>());
  }
  if (kind == "thinned_lattice") {
    return thinned_lattice(Lattice(matrix_from_json(source.at("basis"))), source.at("radius").get<double>(),
                           source.at("keep_fraction").get<double>(), source.at("seed").get<std::uint64_t>());
  }
  if (kind == "restrict") {
    return restrict_to_box(regenerate(source.at("base")), source.at("radius").get<double>());
  }
  if (kind == "negate") return negate(regenerate(source.at("base")));
  if (kind == "translate") {
    const auto off = source.at("offset").get<std::vector<double>>();
    return translate(regenerate(source.at("base")), Eigen::Map<const Eigen::VectorXd>(
                                                        off.data(), static_cast<Eigen::Index>(off.size())));
  }
  if (kind == "scale") return scale(regenerate(source.at("base")), source.at("factor").get<double>());
  throw Error("recipe of kind '" + kind + "' cannot be regenerated");
}

}  // namespace quasilat
