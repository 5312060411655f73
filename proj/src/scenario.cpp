#include "quasilat/scenario.hpp"

#include "quasilat/approxcheck.hpp"
#include "quasilat/density.hpp"
#include "quasilat/gabor.hpp"
#include "quasilat/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <boost/version.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#ifndef QUASILAT_VERSION
#define QUASILAT_VERSION "unknown"
#endif

namespace quasilat {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>> kKeys = {
    {"scenario", {"name", "description"}},
    {"points", {"kind", "dim", "basis", "window", "scale", "base_basis", "keep_fraction", "seed", "sublattice", "path"}},
    {"density", {"enabled", "radii", "truncation", "translate_step"}},
    {"approx", {"enabled", "base_radius", "sumset_radius"}},
    {"gabor", {"T", "dt", "radius", "frame", "N", "N_step", "riesz", "riesz_edge_margin", "dual", "hap", "hap_K",
               "hap_x_grid", "hap_x_radius", "hap_tol", "complete", "complete_probes", "complete_tol"}},
    {"expect", {"frame", "riesz", "hap", "complete", "D", "D_tol", "k"}},
};

class Section {
 public:
  Section(const pt::ptree& tree, std::string name, std::string file) : name_(std::move(name)), file_(std::move(file)) {
    if (auto child = tree.get_child_optional(name_)) node_ = &*child;
  }

  std::optional<std::string> raw(const std::string& key) const {
    if (!node_) return std::nullopt;
    auto v = node_->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return *v;
  }

  std::string str(const std::string& key, const std::string& def) const { return raw(key).value_or(def); }

  std::optional<double> opt_num(const std::string& key) const {
    auto v = raw(key);
    if (!v) return std::nullopt;
    return to_num(key, *v);
  }
  double num(const std::string& key, double def) const { return opt_num(key).value_or(def); }

  std::optional<bool> opt_flag(const std::string& key) const {
    auto v = raw(key);
    if (!v) return std::nullopt;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    fail(key, "expected true/false, got '" + *v + "'");
  }
  bool flag(const std::string& key, bool def) const { return opt_flag(key).value_or(def); }

  std::vector<double> list(const std::string& key, std::vector<double> def) const {
    auto v = raw(key);
    if (!v) return def;
    std::vector<double> out;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_num(key, item));
    return out;
  }

 private:
  double to_num(const std::string& key, const std::string& text) const {
    std::size_t used = 0;
    double v = 0.0;
    const auto b = text.find_first_not_of(" \t");
    const auto e = text.find_last_not_of(" \t");
    const std::string t = b == std::string::npos ? "" : text.substr(b, e - b + 1);
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (t.empty() || used != t.size() || !std::isfinite(v)) fail(key, "not a number: '" + text + "'");
    return v;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ParseError(file_ + ": [" + name_ + "] " + key + ": " + msg);
  }

  const pt::ptree* node_ = nullptr;
  std::string name_, file_;
};

Lattice lattice_from(const std::vector<double>& entries, int dim, const std::string& what) {
  if (entries.size() != static_cast<std::size_t>(dim * dim)) {
    throw Error(what + ": expected " + std::to_string(dim * dim) + " basis entries");
  }
  Eigen::MatrixXd B(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) B(i, j) = entries[static_cast<std::size_t>(i * dim + j)];
  return Lattice(B);
}

std::vector<double> linspace(double a, double b, int n) {
  if (n == 1) return {0.5 * (a + b)};
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
  return out;
}

Verdict implication(std::string id, std::string inequality, bool applies, double lhs, double rhs, bool ge,
                    std::string detail) {
  Verdict v{std::move(id), std::move(inequality), applies, true, lhs, rhs, std::move(detail)};
  if (applies) v.pass = ge ? lhs >= rhs : lhs <= rhs;
  return v;
}

Verdict expectation(const std::string& what, bool observed, bool expected) {
  Verdict v;
  v.id = "expect_" + what;
  v.inequality = what + " detected == " + (expected ? "true" : "false");
  v.applies = true;
  v.pass = observed == expected;
  v.lhs = observed ? 1.0 : 0.0;
  v.rhs = expected ? 1.0 : 0.0;
  return v;
}

nlohmann::json verdict_json(const Verdict& v) {
  return {{"id", v.id},   {"inequality", v.inequality}, {"applies", v.applies}, {"pass", v.pass},
          {"lhs", v.lhs}, {"rhs", v.rhs},               {"detail", v.detail}};
}

}  // namespace

PointSet build_points(const PointRecipe& r, double radius) {
  if (r.kind == "lattice") return lattice_points_in_box(lattice_from(r.basis, r.dim, "points.basis"), radius);
  if (r.kind == "fibonacci") {
    if (r.dim == 1) return model_set_generate(fibonacci_scheme(r.window, r.scale), radius);
    if (r.dim == 2) {
      const auto s = fibonacci_scheme(r.window, r.scale);
      return model_set_generate(product_scheme(s, s), radius);
    }
    throw Error("points.dim must be 1 or 2");
  }
  if (r.kind == "symmetrized_thinned") {
    const PointSet thin =
        thinned_lattice(lattice_from(r.base_basis, r.dim, "points.base_basis"), radius, r.keep_fraction, r.seed);
    return symmetrize(thin, lattice_from(r.sublattice, r.dim, "points.sublattice"), radius);
  }
  if (r.kind == "csv") {
    const PointSet ps = read_point_set_csv(r.path);
    if (radius > ps.truncation_radius + 1e-12) {
      throw Error("insufficient truncation: " + r.path + " is truncated at " + std::to_string(ps.truncation_radius));
    }
    return restrict_to_box(ps, radius);
  }
  throw Error("points.kind must be lattice, fibonacci, symmetrized_thinned or csv (got '" + r.kind + "')");
}

Scenario load_scenario(const std::string& path) {
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(e.what());
  }
  nlohmann::json settings = nlohmann::json::object();
  for (const auto& [section, node] : tree) {
    const auto known = kKeys.find(section);
    if (known == kKeys.end()) throw ParseError(path + ": unknown section [" + section + "]");
    for (const auto& [key, value] : node) {
      if (!known->second.count(key)) throw ParseError(path + ": unknown key [" + section + "] " + key);
      settings[section][key] = value.data();
    }
  }

  Scenario sc;
  sc.settings = settings;
  const Section meta(tree, "scenario", path), pts(tree, "points", path), den(tree, "density", path),
      apx(tree, "approx", path), gab(tree, "gabor", path), exp(tree, "expect", path);

  sc.name = meta.str("name", std::filesystem::path(path).stem().string());
  sc.description = meta.str("description", "");

  auto& r = sc.points;
  r.kind = pts.str("kind", "");
  r.dim = static_cast<int>(pts.num("dim", 2));
  r.basis = pts.list("basis", {});
  r.window = pts.num("window", 1.0);
  r.scale = pts.num("scale", 1.0);
  r.base_basis = pts.list("base_basis", {});
  r.keep_fraction = pts.num("keep_fraction", 0.1);
  r.seed = static_cast<std::uint64_t>(pts.num("seed", 1));
  r.sublattice = pts.list("sublattice", {});
  if (auto p = pts.raw("path")) {
    std::filesystem::path csv(*p);
    if (csv.is_relative()) csv = std::filesystem::path(path).parent_path() / csv;
    r.path = csv.string();
  }

  sc.density = den.flag("enabled", true);
  sc.radii = den.list("radii", sc.radii);
  sc.density_truncation = den.num("truncation", sc.density_truncation);
  sc.translate_step = den.opt_num("translate_step");

  sc.approx = apx.flag("enabled", false);
  sc.approx_base_radius = apx.num("base_radius", sc.approx_base_radius);
  sc.approx_sumset_radius = apx.opt_num("sumset_radius");

  sc.T = gab.num("T", sc.T);
  sc.dt = gab.num("dt", sc.dt);
  sc.gabor_radius = gab.num("radius", sc.gabor_radius);
  sc.frame = gab.flag("frame", false);
  sc.N = static_cast<int>(gab.num("N", sc.N));
  sc.N_step = static_cast<int>(gab.num("N_step", sc.N_step));
  sc.riesz = gab.flag("riesz", false);
  sc.riesz_edge_margin = gab.num("riesz_edge_margin", 0.0);
  sc.dual = gab.flag("dual", false);
  sc.hap = gab.flag("hap", false);
  sc.hap_K = gab.list("hap_K", sc.hap_K);
  sc.hap_x_grid = static_cast<int>(gab.num("hap_x_grid", sc.hap_x_grid));
  sc.hap_x_radius = gab.num("hap_x_radius", sc.hap_x_radius);
  sc.hap_tol = gab.num("hap_tol", sc.hap_tol);
  sc.complete = gab.flag("complete", false);
  sc.complete_probes = static_cast<int>(gab.num("complete_probes", sc.complete_probes));
  sc.complete_tol = gab.num("complete_tol", sc.complete_tol);

  sc.expect_frame = exp.opt_flag("frame");
  sc.expect_riesz = exp.opt_flag("riesz");
  sc.expect_hap = exp.opt_flag("hap");
  sc.expect_complete = exp.opt_flag("complete");
  sc.expect_D = exp.opt_num("D");
  sc.expect_D_tol = exp.num("D_tol", sc.expect_D_tol);
  if (auto k = exp.opt_num("k")) sc.expect_k = static_cast<std::size_t>(*k);
  return sc;
}

void validate_scenario(const Scenario& sc) {
  const auto& r = sc.points;
  if (r.kind.empty()) throw Error("[points] kind is required");
  if (r.kind == "csv" && !std::filesystem::exists(r.path)) throw Error("[points] path does not exist: " + r.path);
  const bool gabor = sc.frame || sc.riesz || sc.dual || sc.hap || sc.complete;
  if (gabor && r.dim != 2) throw Error("[gabor] needs a 2-dimensional point set");
  if (gabor && !sc.density) throw Error("[gabor] checks need [density] enabled to evaluate the verdicts");
  if (sc.density) {
    FolnerBoxes(r.dim, sc.radii);  // validates the schedule
    if (sc.density_truncation < sc.radii.back()) {
      throw Error("insufficient truncation: [density] truncation must be at least the largest radius");
    }
  }
  if (sc.frame) {
    const double need = std::sqrt(sc.N / kPi) + FrameOptions{}.guard;
    if (sc.gabor_radius + 1e-12 < need) {
      throw Error("truncation too small for test basis: [gabor] radius must be >= " + std::to_string(need));
    }
  }
  if (sc.hap) {
    double kmax = 0.0;
    for (double K : sc.hap_K) kmax = std::max(kmax, K);
    if (sc.hap_x_radius + kmax > sc.gabor_radius + 1e-12) {
      throw Error("insufficient truncation: [gabor] hap_x_radius + max hap_K exceeds radius");
    }
    if (sc.hap_x_grid < 1) throw Error("[gabor] hap_x_grid must be positive");
  }
  if (gabor) GridSpec(sc.T, sc.dt);
  if (sc.approx && sc.approx_base_radius <= 0.0) throw Error("[approx] base_radius must be positive");
}

Report run_scenario(const Scenario& sc) {
  validate_scenario(sc);
  Report rep;
  rep.scenario = sc.name;
  auto& body = rep.body;
  const double d_pi = 1.0;

  std::size_t k = 1;
  if (sc.approx) {
    const PointSet base = build_points(sc.points, sc.approx_base_radius);
    const double rs = sc.approx_sumset_radius.value_or(sc.approx_base_radius / 2.0);
    const PointSet sum = sumset_truncated(base, base, rs);
    const CoverResult cover = find_cover_set(sum, base);
    k = cover.k;
    body["approx"] = to_json(cover);
    body["approx"]["verified"] = verify_cover(sum, base, cover.defect_set, cover.coverage_tol,
                                              cover.verified_region_radius);
  }

  double D_minus = 0.0, D_plus = 0.0;
  if (sc.density) {
    const PointSet ps = build_points(sc.points, sc.density_truncation);
    body["points"] = {{"count", ps.size()}, {"truncation_radius", ps.truncation_radius}, {"source", ps.source}};
    ScanOptions so;
    so.translate_step = sc.translate_step;
    const DensityReport d = density_scan(ps, FolnerBoxes(ps.dim, sc.radii), so);
    D_minus = d.D_minus;
    D_plus = d.D_plus;
    body["density"] = to_json(d);
  }

  bool frame = false, riesz = false, hap = false, complete = false;
  const bool gabor = sc.frame || sc.riesz || sc.dual || sc.hap || sc.complete;
  if (gabor) {
    const GridSpec grid(sc.T, sc.dt);
    const PointSet gp = build_points(sc.points, sc.gabor_radius);
    const GaborSystem sys = make_gabor_system(gaussian_window(grid), gp);
    auto& g = body["gabor"];
    g["grid"] = {{"T", sc.T}, {"dt", sc.dt}, {"L", grid.L()}};
    g["family_size"] = sys.size();
    if (sc.frame) {
      FrameOptions fo;
      fo.N = sc.N;
      fo.N_step = sc.N_step;
      const SpectralBounds b = frame_bounds(sys, fo);
      frame = b.converged && b.A_est > kFrameFloor;
      g["frame"] = to_json(b);
    }
    if (sc.riesz) {
      const SpectralBounds b = riesz_bounds(sys, {sc.riesz_edge_margin});
      riesz = b.A_est > kFrameFloor;
      g["riesz"] = to_json(b);
    }
    if (sc.dual) {
      const GaborSystem sub = interior_system(sys, sc.riesz_edge_margin);
      try {
        const DualResult dr = biorthogonal_dual(sub);
        const double delta = uniform_min_delta(sub);
        g["dual"] = {{"B_sup", dr.B_sup},
                     {"biorthogonality_residual", dr.biorthogonality_residual},
                     {"uniform_min_delta", delta},
                     {"delta_times_max_dual_norm", delta * dr.dual_norms.maxCoeff()}};
      } catch (const Error& e) {
        g["dual"] = {{"error", e.what()}};
      }
    }
    if (sc.hap) {
      const Waveform f = gaussian_window(grid);
      std::vector<double> Ks = sc.hap_K;
      std::sort(Ks.begin(), Ks.end());
      const auto xs = linspace(-sc.hap_x_radius, sc.hap_x_radius, sc.hap_x_grid);
      nlohmann::json rows = nlohmann::json::array();
      std::vector<double> worst(Ks.size(), 0.0);
      bool monotone = true;
      for (double x0 : xs) {
        for (double x1 : xs) {
          std::vector<double> res;
          for (std::size_t i = 0; i < Ks.size(); ++i) {
            res.push_back(hap_residual(sys, f, Eigen::Vector2d(x0, x1), Ks[i]));
            worst[i] = std::max(worst[i], res.back());
            if (i > 0 && res[i] > res[i - 1] + 1e-12) monotone = false;
          }
          rows.push_back({{"x", {x0, x1}}, {"residuals", res}});
        }
      }
      hap = worst.back() < sc.hap_tol;
      g["hap"] = {{"K", Ks}, {"max_residual", worst}, {"table", rows}, {"monotone_in_K", monotone}};
      Verdict v;
      v.id = "hap_monotone";
      v.inequality = "residual(K) non-increasing in K at every x";
      v.applies = Ks.size() > 1;
      v.pass = monotone;
      rep.verdicts.push_back(v);
    }
    if (sc.complete) {
      std::vector<Waveform> probes;
      for (int n = 0; n < sc.complete_probes; ++n) probes.push_back(hermite_function(grid, n));
      const double res = completeness_residual(sys, probes);
      complete = res < sc.complete_tol;
      g["complete_proxy"] = {{"residual", res},
                             {"probes", sc.complete_probes},
                             {"label", "subspace proxy: Hermite probes h_0..h_{n-1}, not a completeness proof"}};
    }
  }

  const double lo = d_pi * (1.0 - kVerdictSlack), hi = d_pi * (1.0 + kVerdictSlack);
  rep.verdicts.push_back(implication("frame_density", "frame => D- >= d_pi (5% slack)", frame, D_minus, lo, true,
                                     "frame detected: converged A_est > " + std::to_string(kFrameFloor)));
  rep.verdicts.push_back(implication("riesz_density", "Riesz sequence => D+ <= d_pi (5% slack)", riesz, D_plus, hi,
                                     false, "Riesz detected: Gram A_est > " + std::to_string(kFrameFloor)));
  rep.verdicts.push_back(implication("hap_density", "HAP => D- >= d_pi (5% slack)", hap, D_minus, lo, true,
                                     "HAP detected: max residual < " + std::to_string(sc.hap_tol)));
  rep.verdicts.push_back(implication("approx_complete_density", "complete, k-approximate => D- >= d_pi / k (5% slack)", complete,
                                     D_minus, lo / static_cast<double>(k), true,
                                     "complete-proxy residual < " + std::to_string(sc.complete_tol) +
                                         ", k = " + std::to_string(k) + (sc.approx ? "" : " (assumed)")));

  if (sc.expect_frame) rep.verdicts.push_back(expectation("frame", frame, *sc.expect_frame));
  if (sc.expect_riesz) rep.verdicts.push_back(expectation("riesz", riesz, *sc.expect_riesz));
  if (sc.expect_hap) rep.verdicts.push_back(expectation("hap", hap, *sc.expect_hap));
  if (sc.expect_complete) rep.verdicts.push_back(expectation("complete", complete, *sc.expect_complete));
  if (sc.expect_D) {
    Verdict v;
    v.id = "expect_D";
    v.inequality = "|D+- - D| <= D_tol * D";
    v.applies = true;
    v.lhs = std::max(std::abs(D_minus - *sc.expect_D), std::abs(D_plus - *sc.expect_D));
    v.rhs = sc.expect_D_tol * *sc.expect_D;
    v.pass = v.lhs <= v.rhs;
    rep.verdicts.push_back(v);
  }
  if (sc.expect_k) {
    Verdict v;
    v.id = "expect_k";
    v.inequality = "greedy k == expected k";
    v.applies = sc.approx;
    v.lhs = static_cast<double>(k);
    v.rhs = static_cast<double>(*sc.expect_k);
    v.pass = !sc.approx || k == *sc.expect_k;
    rep.verdicts.push_back(v);
  }

  body["detected"] = {{"frame", frame}, {"riesz", riesz}, {"hap", hap}, {"complete_proxy", complete}};
  body["k"] = k;
  body["formal_degree"] = d_pi;
  body["provenance"] = {{"version", QUASILAT_VERSION},
                        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                      std::to_string(EIGEN_MINOR_VERSION)},
                        {"boost", BOOST_LIB_VERSION},
                        {"settings_hash", fnv1a64_hex(sc.settings.dump())},
                        {"settings", sc.settings}};
  for (const auto& v : rep.verdicts) rep.pass = rep.pass && v.pass;
  return rep;
}

std::string fnv1a64_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json to_json(const Report& r, bool with_timestamp) {
  nlohmann::json j = r.body;
  j["scenario"] = r.scenario;
  j["verdicts"] = nlohmann::json::array();
  for (const auto& v : r.verdicts) j["verdicts"].push_back(verdict_json(v));
  j["pass"] = r.pass;
  if (with_timestamp) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["provenance"]["timestamp"] = buf;
  }
  return j;
}

}  // namespace quasilat
