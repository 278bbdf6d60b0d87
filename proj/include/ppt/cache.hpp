// On-disk cache of Fekete configurations. fekete_points dominates the runtime
// of every experiment, and the same (body, mesh, Q, n) recurs across the
// delta, extremal and functional computations; cached configurations are
// validated on load by recomputing their log|VDM| and reused. Files are
// written atomically (temp file + rename).
#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <string>

#include "ppt/fekete.hpp"
#include "ppt/io.hpp"
#include "ppt/mesh.hpp"
#include "ppt/polytope.hpp"
#include "ppt/vdm.hpp"

namespace ppt {

inline std::uint64_t fekete_cache_key(const ConvexBody& body, const WeightedMesh& mesh,
                                      int n) {
  Fnv1a h;
  h.u64(body.content_hash());
  h.str(mesh.label);
  h.u64(mesh.q_hash());
  h.i64(n);
  return h.value();
}

class ConfigCache {
 public:
  ConfigCache() = default;  // disabled
  explicit ConfigCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }

  // PPT_CACHE overrides the default ./.ppt-cache; an explicit dir wins.
  static ConfigCache from_env(const std::filesystem::path& override_dir = {}) {
    if (!override_dir.empty()) return ConfigCache(override_dir);
    if (const char* env = std::getenv("PPT_CACHE")) return ConfigCache(env);
    return ConfigCache(".ppt-cache");
  }

  static ConfigCache disabled() { return ConfigCache(); }

  bool enabled() const { return !dir_.empty(); }

  std::optional<Configuration> load(std::uint64_t key, const MonomialBasis& basis) const {
    if (!enabled()) return std::nullopt;
    auto path = file_for(key);
    std::ifstream in(path);
    if (!in) return std::nullopt;
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception&) {
      return std::nullopt;
    }
    if (!j.contains("key") || j["key"].get<std::string>() != key_string(key))
      return std::nullopt;
    if (j.value("n", -1) != basis.n ||
        j.value("d_n", -1ll) != basis.d_n())
      return std::nullopt;
    Configuration cfg;
    cfg.basis = basis;
    cfg.n = basis.n;
    try {
      for (const auto& pt : j.at("points")) {
        Point p;
        for (const auto& coord : pt)
          p.emplace_back(coord.at(0).get<double>(), coord.at(1).get<double>());
        cfg.points.push_back(std::move(p));
      }
      cfg.mesh_indices = j.at("mesh_indices").get<std::vector<int>>();
      cfg.q_values = j.at("q_values").get<std::vector<double>>();
      cfg.log_wvdm = j.at("log_wvdm").get<double>();
      cfg.exchange_converged = j.value("converged", true);
      cfg.exchange_passes = j.value("passes", 0);
    } catch (const nlohmann::json::exception&) {
      return std::nullopt;
    }
    if (static_cast<long long>(cfg.points.size()) != basis.d_n()) return std::nullopt;
    double stored = cfg.log_wvdm;
    cfg.recompute_logs();
    // invariant: the cached value must be reproducible from the points
    if (stored != kNegInf &&
        std::fabs(cfg.log_wvdm - stored) > 1e-9 * std::max(1.0, std::fabs(stored)))
      return std::nullopt;
    return cfg;
  }

  void store(std::uint64_t key, const Configuration& cfg) const {
    if (!enabled()) return;
    nlohmann::json j;
    j["key"] = key_string(key);
    j["n"] = cfg.n;
    j["d_n"] = cfg.basis.d_n();
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : cfg.points) {
      nlohmann::json pt = nlohmann::json::array();
      for (const auto& c : p) pt.push_back({c.real(), c.imag()});
      pts.push_back(pt);
    }
    j["points"] = pts;
    j["mesh_indices"] = cfg.mesh_indices;
    j["q_values"] = cfg.q_values;
    j["log_wvdm"] = cfg.log_wvdm;
    j["converged"] = cfg.exchange_converged;
    j["passes"] = cfg.exchange_passes;
    atomic_write_file(file_for(key), j.dump());
  }

 private:
  std::string key_string(std::uint64_t key) const {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(key));
    return buf;
  }

  std::filesystem::path file_for(std::uint64_t key) const {
    return dir_ / ("fekete-" + key_string(key) + ".json");
  }

  std::filesystem::path dir_;
};

inline Configuration fekete_points_cached(const ConfigCache& cache, const ConvexBody& body,
                                          const WeightedMesh& mesh,
                                          const MonomialBasis& basis, int n,
                                          const FeketeOptions& opts = {}) {
  std::uint64_t key = fekete_cache_key(body, mesh, n);
  if (auto hit = cache.load(key, basis)) return std::move(*hit);
  Configuration cfg = fekete_points(mesh, basis, n, opts);
  cache.store(key, cfg);
  return cfg;
}

}  // namespace ppt
