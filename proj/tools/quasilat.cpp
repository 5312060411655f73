// Command-line front end. Reports go to stdout (or --out) as JSON;
// diagnostics go to stderr. Exit codes: 0 ok, 1 verdict failure, 2 usage or
// validation error.
#include "quasilat/approxcheck.hpp"
#include "quasilat/density.hpp"
#include "quasilat/gabor.hpp"
#include "quasilat/io.hpp"
#include "quasilat/padic.hpp"
#include "quasilat/parallel.hpp"
#include "quasilat/scenario.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

using namespace quasilat;

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError("not a number list: '" + text + "'");
    }
  }
  return out;
}

void emit(const nlohmann::json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_text_file(out, j.dump(2) + "\n");
  }
}

struct GaborArgs {
  std::string points;
  double T = 12.0;
  double dt = 0.01;
  std::string out;
};

GaborSystem load_system(const GaborArgs& a) {
  return make_gabor_system(gaussian_window(GridSpec(a.T, a.dt)), read_point_set_csv(a.points));
}

void add_gabor_common(CLI::App* cmd, GaborArgs& a) {
  cmd->add_option("--points", a.points, "point set CSV (dim=2, columns x,xi)")->required();
  cmd->add_option("--grid-T", a.T, "sample domain [-T, T]");
  cmd->add_option("--grid-dt", a.dt, "sample step");
  cmd->add_option("--out", a.out, "write the report here instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasilat: approximate lattices, Beurling densities and Gabor systems"};
  app.require_subcommand(1);

  // gen
  PointRecipe recipe;
  std::string basis, base_basis, sublattice, gen_out;
  double gen_radius = 10.0;
  auto* gen = app.add_subcommand("gen", "generate a point set and write CSV + sidecar recipe");
  gen->add_option("--kind", recipe.kind, "lattice | fibonacci | symmetrized_thinned")->required();
  gen->add_option("--dim", recipe.dim, "dimension (1 or 2)");
  gen->add_option("--basis", basis, "lattice basis, row-major, comma separated");
  gen->add_option("--window", recipe.window, "fibonacci window half width");
  gen->add_option("--scale", recipe.scale, "fibonacci physical scale");
  gen->add_option("--base-basis", base_basis, "thinned lattice basis");
  gen->add_option("--keep-fraction", recipe.keep_fraction, "thinning keep probability");
  gen->add_option("--seed", recipe.seed, "thinning seed");
  gen->add_option("--sublattice", sublattice, "lattice added by the symmetrization");
  gen->add_option("--radius", gen_radius, "truncation radius (sup norm)");
  gen->add_option("--out", gen_out, "CSV output path")->required();

  // approx
  std::string approx_points;
  double margin = 0.0, coverage_tol = 1e-6;
  bool minimize = false;
  std::optional<double> sumset_radius, region_radius;
  auto* approx = app.add_subcommand("approx", "Delone diagnostics and greedy defect set F");
  approx->add_option("--points", approx_points, "point set CSV")->required();
  approx->add_option("--margin", margin, "interior margin for the covering radius (default R/10)");
  approx->add_option("--sumset-radius", sumset_radius, "truncation of Lambda + Lambda (default R/2)");
  approx->add_option("--region", region_radius, "verified region radius");
  approx->add_option("--coverage-tol", coverage_tol, "coverage tolerance");
  approx->add_flag("--minimize", minimize, "search all smaller subsets of the candidate pool after the greedy pass");

  // density
  std::string dens_points, radii, dens_out;
  std::optional<double> translate_step, scan_radius;
  auto* dens = app.add_subcommand("density", "lower/upper Beurling density over centered boxes");
  dens->add_option("--points", dens_points, "point set CSV")->required();
  dens->add_option("--radii", radii, "box radii r1,r2,...")->required();
  dens->add_option("--translate-step", translate_step, "translate grid step");
  dens->add_option("--scan-radius", scan_radius, "half width of the scanned translate region");
  dens->add_option("--out", dens_out, "report path");

  // gabor
  auto* gabor = app.add_subcommand("gabor", "coherent Gabor system diagnostics");
  gabor->require_subcommand(1);
  GaborArgs ga;
  FrameOptions fo;
  RieszOptions ro;
  double K = 6.0, x_radius = 1.0;
  int x_grid = 5, probes = 10;
  auto* fb = gabor->add_subcommand("frame-bounds", "finite-section frame bounds");
  add_gabor_common(fb, ga);
  fb->add_option("--hermite-N", fo.N, "test basis size");
  fb->add_option("--N-step", fo.N_step, "sweep step");
  fb->add_option("--rel-tol", fo.rel_tol, "convergence tolerance on A");
  auto* rz = gabor->add_subcommand("riesz", "Riesz bounds from the Gram matrix");
  add_gabor_common(rz, ga);
  rz->add_option("--edge-margin", ro.edge_margin, "exclude points within this distance of the truncation edge");
  auto* hp = gabor->add_subcommand("hap", "homogeneous approximation residuals");
  add_gabor_common(hp, ga);
  hp->add_option("--K", K, "local box half width");
  hp->add_option("--x-grid", x_grid, "x grid points per axis");
  hp->add_option("--x-radius", x_radius, "x grid half width");
  auto* du = gabor->add_subcommand("dual", "biorthogonal dual and uniform minimality");
  add_gabor_common(du, ga);
  du->add_option("--edge-margin", ro.edge_margin, "exclude points within this distance of the truncation edge");
  auto* cp = gabor->add_subcommand("complete", "completeness proxy residual over Hermite probes");
  add_gabor_common(cp, ga);
  cp->add_option("--probes", probes, "number of Hermite probes");

  // padic
  auto* padic = app.add_subcommand("padic", "model set Z[1/p] in Q_p");
  padic->require_subcommand(1);
  unsigned p = 2, n = 8;
  std::string w = "1", padic_out;
  std::size_t max_iterations = 256;
  auto add_padic = [&](CLI::App* c) {
    c->add_option("-p", p, "prime")->required();
    c->add_option("-w", w, "window half width (decimal or fraction)")->required();
    c->add_option("-n", n, "deepest ball p^-n Z_p")->required();
    c->add_option("--out", padic_out, "report path");
  };
  auto* pd = padic->add_subcommand("density", "per-n counts, ratios and the extrapolated density");
  add_padic(pd);
  auto* pc = padic->add_subcommand("cover", "greedy defect set for Lambda + Lambda");
  add_padic(pc);
  pc->add_option("--max-iterations", max_iterations, "greedy pick limit");

  // run
  std::vector<std::string> configs;
  bool parallel = false, no_timestamp = false;
  std::string run_out;
  auto* run = app.add_subcommand("run", "run scenario files and check the density inequalities");
  run->add_option("configs", configs, "scenario .cfg files")->required();
  run->add_flag("--parallel", parallel, "run scenarios concurrently");
  run->add_flag("--no-timestamp", no_timestamp, "omit the provenance timestamp");
  run->add_option("--out-dir", run_out, "write <name>.json reports here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      recipe.basis = parse_list(basis);
      recipe.base_basis = parse_list(base_basis);
      recipe.sublattice = parse_list(sublattice);
      const PointSet ps = build_points(recipe, gen_radius);
      write_point_set_csv(ps, gen_out);
      emit({{"path", gen_out}, {"count", ps.size()}, {"dim", ps.dim}, {"truncation_radius", ps.truncation_radius}},
           "");
    } else if (*approx) {
      const PointSet ps = read_point_set_csv(approx_points);
      const double m = margin > 0.0 ? margin : ps.truncation_radius / 10.0;
      const PointSet sum = sumset_truncated(ps, ps, sumset_radius.value_or(ps.truncation_radius / 2.0));
      CoverOptions co;
      co.coverage_tol = coverage_tol;
      co.verified_region_radius = region_radius;
      co.minimize = minimize;
      const CoverResult c = find_cover_set(sum, ps, co);
      emit({{"delone", to_json(delone_report(ps, m))},
            {"cover", to_json(c)},
            {"verified", verify_cover(sum, ps, c.defect_set, c.coverage_tol, c.verified_region_radius)}},
           "");
    } else if (*dens) {
      const PointSet ps = read_point_set_csv(dens_points);
      ScanOptions so;
      so.translate_step = translate_step;
      so.scan_region_radius = scan_radius;
      emit(to_json(density_scan(ps, FolnerBoxes(ps.dim, parse_list(radii)), so)), dens_out);
    } else if (*gabor) {
      const GaborSystem sys = load_system(ga);
      nlohmann::json j = {{"family_size", sys.size()}, {"formal_degree", sys.formal_degree}};
      if (*fb) {
        const SpectralBounds b = frame_bounds(sys, fo);
        j["frame"] = to_json(b);
        j["frame_detected"] = b.converged && b.A_est > kFrameFloor;
      } else if (*rz) {
        const SpectralBounds b = riesz_bounds(sys, ro);
        j["riesz"] = to_json(b);
        j["riesz_detected"] = b.A_est > kFrameFloor;
      } else if (*hp) {
        const Waveform f = gaussian_window(sys.window.grid);
        nlohmann::json rows = nlohmann::json::array();
        double worst = 0.0;
        for (int i = 0; i < x_grid; ++i) {
          for (int k = 0; k < x_grid; ++k) {
            const double x0 = x_grid == 1 ? 0.0 : -x_radius + 2.0 * x_radius * i / (x_grid - 1);
            const double x1 = x_grid == 1 ? 0.0 : -x_radius + 2.0 * x_radius * k / (x_grid - 1);
            const double r = hap_residual(sys, f, Eigen::Vector2d(x0, x1), K);
            worst = std::max(worst, r);
            rows.push_back({{"x", {x0, x1}}, {"residual", r}});
          }
        }
        j["hap"] = {{"K", K}, {"table", rows}, {"max_residual", worst}};
      } else if (*du) {
        const GaborSystem sub = interior_system(sys, ro.edge_margin);
        const DualResult d = biorthogonal_dual(sub);
        const double delta = uniform_min_delta(sub);
        j["dual"] = {{"B_sup", d.B_sup},
                     {"biorthogonality_residual", d.biorthogonality_residual},
                     {"min_gram_eigenvalue", d.min_gram_eigenvalue},
                     {"uniform_min_delta", delta},
                     {"delta_times_max_dual_norm", delta * d.dual_norms.maxCoeff()}};
      } else if (*cp) {
        std::vector<Waveform> ws;
        for (int i = 0; i < probes; ++i) ws.push_back(hermite_function(sys.window.grid, i));
        j["complete_proxy"] = {{"residual", completeness_residual(sys, ws)},
                               {"probes", probes},
                               {"label", "subspace proxy, not a completeness proof"}};
      }
      emit(j, ga.out);
    } else if (*padic) {
      const PAdicModelSet ms(p, parse_window(w), n);
      if (*pd) {
        emit(to_json(padic_density(ms)), padic_out);
      } else {
        PAdicCoverOptions co;
        co.max_iterations = max_iterations;
        emit(to_json(padic_cover_set(ms, co)), padic_out);
      }
    } else if (*run) {
      std::vector<Scenario> scenarios;
      for (const auto& c : configs) {
        scenarios.push_back(load_scenario(c));
        validate_scenario(scenarios.back());
      }
      std::vector<nlohmann::json> reports(scenarios.size());
      std::vector<std::string> errors(scenarios.size());
      auto one = [&](std::size_t i) {
        try {
          reports[i] = to_json(run_scenario(scenarios[i]), !no_timestamp);
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      };
      if (parallel) {
        parallel_for(scenarios.size(), one);
      } else {
        for (std::size_t i = 0; i < scenarios.size(); ++i) one(i);
      }
      int code = 0;
      for (std::size_t i = 0; i < scenarios.size(); ++i) {
        if (!errors[i].empty()) {
          std::cerr << scenarios[i].name << ": error: " << errors[i] << "\n";
          code = 2;
          continue;
        }
        const bool ok = reports[i]["pass"].get<bool>();
        std::cerr << (ok ? "PASS " : "FAIL ") << scenarios[i].name << "\n";
        if (!ok && code == 0) code = 1;
        if (!run_out.empty()) {
          std::filesystem::create_directories(run_out);
          write_text_file((std::filesystem::path(run_out) / (scenarios[i].name + ".json")).string(),
                          reports[i].dump(2) + "\n");
        }
      }
      if (run_out.empty()) {
        nlohmann::json all = nlohmann::json::array();
        for (const auto& r : reports) {
          if (!r.is_null()) all.push_back(r);
        }
        std::cout << (all.size() == 1 ? all[0] : all).dump(2) << "\n";
      }
      return code;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
