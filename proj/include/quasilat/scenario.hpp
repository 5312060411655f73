#pragma once

#include "quasilat/pointset.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace quasilat {

/// Relative slack applied to every density inequality checked by the harness.
inline constexpr double kVerdictSlack = 0.05;

struct PointRecipe {
  std::string kind;  // lattice | fibonacci | symmetrized_thinned | csv
  int dim = 2;
  std::vector<double> basis;       // lattice: row-major d x d
  double window = 1.0;             // fibonacci
  double scale = 1.0;              // fibonacci: physical coordinates times scale
  std::vector<double> base_basis;  // symmetrized_thinned: lattice that is thinned
  double keep_fraction = 0.1;
  std::uint64_t seed = 1;
  std::vector<double> sublattice;  // symmetrized_thinned: added lattice
  std::string path;                // csv, resolved against the config directory
};

/// Point set of the recipe truncated at radius.
PointSet build_points(const PointRecipe& recipe, double radius);

struct Scenario {
  std::string name;
  std::string description;
  PointRecipe points;

  bool density = true;
  std::vector<double> radii{10, 12, 14, 16, 18, 20, 22, 24, 26, 28, 30, 32, 34, 36, 38, 40, 42, 44, 46, 48, 50};
  double density_truncation = 200.0;
  std::optional<double> translate_step;

  bool approx = false;
  double approx_base_radius = 20.0;
  std::optional<double> approx_sumset_radius;

  double T = 12.0;
  double dt = 0.01;
  double gabor_radius = 10.0;
  bool frame = false;
  int N = 40;
  int N_step = 10;
  bool riesz = false;
  double riesz_edge_margin = 0.0;
  bool dual = false;
  bool hap = false;
  std::vector<double> hap_K{6.0};
  int hap_x_grid = 5;
  double hap_x_radius = 1.0;
  double hap_tol = 0.05;
  bool complete = false;
  int complete_probes = 10;
  double complete_tol = 1e-3;

  // Expectations; unset entries are not checked.
  std::optional<bool> expect_frame, expect_riesz, expect_hap, expect_complete;
  std::optional<double> expect_D;
  double expect_D_tol = 0.02;
  std::optional<std::size_t> expect_k;

  /// Parsed settings as JSON; hashed into the report provenance.
  nlohmann::json settings;
};

/// Parses an INI scenario file. Throws ParseError for malformed files and
/// Error for settings that violate module preconditions.
Scenario load_scenario(const std::string& path);

/// Checks preconditions (guard margins, truncations, files) before running.
void validate_scenario(const Scenario& sc);

struct Verdict {
  std::string id;
  std::string inequality;
  bool applies = false;
  bool pass = true;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string detail;
};

struct Report {
  std::string scenario;
  nlohmann::json body;
  std::vector<Verdict> verdicts;
  bool pass = true;
};

/// generation -> approxcheck -> density -> gabor, then the density
/// inequalities implied by whatever the spectral estimates detected.
Report run_scenario(const Scenario& sc);

/// Report JSON. The provenance block carries a settings hash and a
/// timestamp; nothing else depends on the clock.
nlohmann::json to_json(const Report& r, bool with_timestamp = true);

std::string fnv1a64_hex(const std::string& text);

}  // namespace quasilat
