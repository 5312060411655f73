#include "quasilat/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace quasilat {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double parse_double(const std::string& field, const std::string& path, std::size_t line) {
  const std::string t = trim(field);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size() || !std::isfinite(v)) {
    throw ParseError(path + ":" + std::to_string(line) + ": not a number: '" + t + "'");
  }
  return v;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

void write_point_set_csv(const PointSet& ps, const std::string& path) {
  std::string text = "dim=" + std::to_string(ps.dim) + "\n";
  char buf[64];
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (int d = 0; d < ps.dim; ++d) {
      std::snprintf(buf, sizeof buf, "%.17g", ps.points(d, static_cast<Eigen::Index>(i)));
      if (d > 0) text += ',';
      text += buf;
    }
    text += '\n';
  }
  write_text_file(path, text);
  const nlohmann::json sidecar = {{"source", ps.source}, {"truncation_radius", ps.truncation_radius}};
  write_text_file(path + ".json", sidecar.dump(2) + "\n");
}

PointSet read_point_set_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  const std::string header = trim(line);
  int dim = 0;
  if (header == "dim=1") dim = 1;
  else if (header == "dim=2") dim = 2;
  else throw ParseError(path + ":1: expected header dim=1 or dim=2, got '" + header + "'");

  std::vector<double> coords;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    if (static_cast<int>(fields.size()) != dim) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(dim) + " fields");
    }
    for (const auto& field : fields) coords.push_back(parse_double(field, path, lineno));
  }
  const auto n = static_cast<Eigen::Index>(coords.size() / static_cast<std::size_t>(dim));
  const Eigen::MatrixXd pts = Eigen::Map<const Eigen::MatrixXd>(coords.data(), dim, n);

  double radius = n > 0 ? pts.cwiseAbs().maxCoeff() : 0.0;
  nlohmann::json source = {{"kind", "explicit"}};
  if (std::filesystem::exists(path + ".json")) {
    nlohmann::json side;
    try {
      side = nlohmann::json::parse(read_text_file(path + ".json"));
      radius = side.at("truncation_radius").get<double>();
      source = side.at("source");
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ".json: " + e.what());
    }
  }
  if (!(radius > 0.0)) radius = 1.0;
  try {
    return make_point_set(dim, pts, radius, source);
  } catch (const Error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace quasilat
