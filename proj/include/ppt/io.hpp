// File formats and deterministic CSV/JSON emission.
//
//   body spec (JSON):  {"dim": d, "vertices": [[...], ...]}
//   mesh (CSV):        x1,...,xd,q,nu per row ("inf" allowed in q)
//   measure (CSV):     x1,...,xd,mass per row, points matched against a mesh
//   values (CSV):      one value per row (last column when several)
//
// Emitted files start with a header block carrying the library version, the
// config hash and the seed; reruns with identical inputs are byte-identical
// (doubles printed with %.17g, no timestamps).
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppt/common.hpp"
#include "ppt/mesh.hpp"
#include "ppt/polytope.hpp"

namespace ppt {

inline std::string format_double(double v) {
  if (v == kPosInf) return "inf";
  if (v == kNegInf) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline ConvexBody load_body_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open body spec: " + path.string());
  nlohmann::json j;
  in >> j;
  if (!j.contains("dim") || !j.contains("vertices"))
    throw std::runtime_error("body spec must contain 'dim' and 'vertices'");
  int dim = j.at("dim").get<int>();
  std::vector<std::vector<double>> verts;
  for (const auto& v : j.at("vertices")) verts.push_back(v.get<std::vector<double>>());
  return ConvexBody::from_vertices(dim, std::move(verts));
}

namespace detail {

inline std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    std::size_t a = cell.find_first_not_of(" \t\r");
    std::size_t b = cell.find_last_not_of(" \t\r");
    cells.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
  }
  return cells;
}

inline bool parse_double(const std::string& s, double& out) {
  if (s == "inf" || s == "+inf" || s == "Inf") {
    out = kPosInf;
    return true;
  }
  if (s == "-inf" || s == "-Inf") {
    out = kNegInf;
    return true;
  }
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end && *end == '\0' && end != s.c_str();
}

}  // namespace detail

inline WeightedMesh load_mesh_csv(const std::filesystem::path& path, int dim,
                                  std::string label = "") {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file: " + path.string());
  WeightedMesh mesh;
  mesh.dim = dim;
  mesh.label = label.empty() ? path.filename().string() : std::move(label);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto cells = detail::split_csv_row(line);
    if (cells.empty()) continue;
    double probe;
    if (!detail::parse_double(cells[0], probe)) continue;  // header row
    if (cells.size() != static_cast<std::size_t>(dim) + 2)
      throw std::runtime_error("mesh row " + std::to_string(lineno) + " needs " +
                               std::to_string(dim) + "+2 columns");
    Point p;
    for (int c = 0; c < dim; ++c) {
      double x;
      if (!detail::parse_double(cells[static_cast<std::size_t>(c)], x))
        throw std::runtime_error("bad coordinate on mesh row " + std::to_string(lineno));
      p.emplace_back(x, 0.0);
    }
    double q, nu;
    if (!detail::parse_double(cells[static_cast<std::size_t>(dim)], q) ||
        !detail::parse_double(cells[static_cast<std::size_t>(dim) + 1], nu))
      throw std::runtime_error("bad q/nu on mesh row " + std::to_string(lineno));
    mesh.points.push_back(std::move(p));
    mesh.q.push_back(q);
    mesh.nu.push_back(nu);
  }
  mesh.validate();
  return mesh;
}

inline void save_mesh_csv(const std::filesystem::path& path, const WeightedMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write mesh file: " + path.string());
  for (int c = 0; c < mesh.dim; ++c) out << "x" << c + 1 << ",";
  out << "q,nu\n";
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    for (int c = 0; c < mesh.dim; ++c)
      out << format_double(mesh.points[i][static_cast<std::size_t>(c)].real()) << ",";
    out << format_double(mesh.q[i]) << "," << format_double(mesh.nu[i]) << "\n";
  }
}

// Measure rows are matched to mesh points; unmatched support is an error (the
// functionals require mesh-supported measures).
inline GridMeasure load_measure_csv(const std::filesystem::path& path,
                                    const WeightedMesh& mesh) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open measure file: " + path.string());
  GridMeasure mu;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto cells = detail::split_csv_row(line);
    if (cells.empty()) continue;
    double probe;
    if (!detail::parse_double(cells[0], probe)) continue;
    if (cells.size() != static_cast<std::size_t>(mesh.dim) + 1)
      throw std::runtime_error("measure row " + std::to_string(lineno) + " needs " +
                               std::to_string(mesh.dim) + "+1 columns");
    std::vector<double> x(static_cast<std::size_t>(mesh.dim));
    for (int c = 0; c < mesh.dim; ++c)
      if (!detail::parse_double(cells[static_cast<std::size_t>(c)], x[static_cast<std::size_t>(c)]))
        throw std::runtime_error("bad coordinate on measure row " + std::to_string(lineno));
    double mass;
    if (!detail::parse_double(cells.back(), mass))
      throw std::runtime_error("bad mass on measure row " + std::to_string(lineno));
    int match = -1;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
      bool ok = true;
      for (int c = 0; c < mesh.dim; ++c) {
        double mx = mesh.points[i][static_cast<std::size_t>(c)].real();
        if (std::fabs(mx - x[static_cast<std::size_t>(c)]) >
            1e-9 * (1.0 + std::fabs(mx))) {
          ok = false;
          break;
        }
      }
      if (ok) {
        match = static_cast<int>(i);
        break;
      }
    }
    if (match < 0)
      throw std::runtime_error("measure row " + std::to_string(lineno) +
                               " is not supported on the mesh");
    mu.support.push_back(mesh.points[static_cast<std::size_t>(match)]);
    mu.masses.push_back(mass);
    mu.mesh_indices.push_back(match);
  }
  return mu;
}

inline std::vector<double> load_values_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open values file: " + path.string());
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto cells = detail::split_csv_row(line);
    if (cells.empty()) continue;
    double v;
    if (!detail::parse_double(cells.back(), v)) continue;  // header row
    values.push_back(v);
  }
  return values;
}

inline void save_measure_csv(const std::filesystem::path& path, const GridMeasure& mu,
                             int dim) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write measure file: " + path.string());
  for (int c = 0; c < dim; ++c) out << "x" << c + 1 << ",";
  out << "mass\n";
  for (std::size_t i = 0; i < mu.support.size(); ++i) {
    for (int c = 0; c < dim; ++c)
      out << format_double(mu.support[i][static_cast<std::size_t>(c)].real()) << ",";
    out << format_double(mu.masses[i]) << "\n";
  }
}

inline void atomic_write_file(const std::filesystem::path& path,
                              const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write: " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

// CSV emitter with the reproducibility header block.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::uint64_t config_hash,
            std::uint64_t seed) {
    if (path.empty() || path == "-") {
      out_ = stdout;
    } else {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open output: " + path.string());
    }
    comment("ppt-version: " + std::string(kVersion));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash));
    comment("config-hash: " + std::string(buf));
    comment("seed: " + std::to_string(seed));
  }

  void comment(const std::string& text) { line("# " + text); }

  void row(const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += ",";
      s += cells[i];
    }
    line(s);
  }

 private:
  void line(const std::string& s) {
    if (out_)
      std::fprintf(out_, "%s\n", s.c_str());
    else
      file_ << s << "\n";
  }

  std::FILE* out_ = nullptr;
  std::ofstream file_;
};

}  // namespace ppt
