// ppt: experiment runner for convex-body pluripotential computations.
//
// Subcommands: body, delta, fekete, extremal, energy, znorm, sample, rate,
// lambda, converge, ldp. Global flags --cache-dir, --seed, --budget,
// --threads; PPT_CACHE and PPT_BUDGET env vars supply defaults. Every output
// carries a header with the library version, a hash of the resolved inputs and
// the seed; reruns with the same hash produce byte-identical data sections.
#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "ppt/cache.hpp"
#include "ppt/extremal.hpp"
#include "ppt/fekete.hpp"
#include "ppt/functionals.hpp"
#include "ppt/io.hpp"
#include "ppt/polytope.hpp"
#include "ppt/rng.hpp"
#include "ppt/sampler.hpp"
#include "ppt/vdm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOpts {
  std::string cache_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  unsigned long long budget = 0;  // 0 = resolve from env/default
  int threads = 1;

  unsigned long long resolve_budget() const {
    if (budget) return budget;
    if (const char* env = std::getenv("PPT_BUDGET"))
      return std::strtoull(env, nullptr, 10);
    return ppt::kDefaultTupleBudget;
  }

  ppt::ConfigCache cache() const { return ppt::ConfigCache::from_env(cache_dir); }
};

std::vector<int> parse_range(const std::string& text) {
  auto dots = text.find("..");
  std::vector<int> out;
  if (dots == std::string::npos) {
    out.push_back(std::stoi(text));
    return out;
  }
  int a = std::stoi(text.substr(0, dots));
  int b = std::stoi(text.substr(dots + 2));
  if (b < a) throw CLI::ValidationError("--n", "range end before start");
  for (int n = a; n <= b; ++n) out.push_back(n);
  return out;
}

std::uint64_t hash_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  ppt::Fnv1a h;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0)
    h.bytes(buf, static_cast<std::size_t>(in.gcount()));
  return h.value();
}

struct Inputs {
  ppt::ConvexBody body;
  ppt::WeightedMesh mesh;
  ppt::Fnv1a hash;

  static Inputs load(const std::string& body_file, const std::string& mesh_file,
                     const std::string& weights_file = {}) {
    Inputs in;
    in.body = ppt::load_body_json(body_file);
    in.hash.u64(hash_file(body_file));
    in.mesh = ppt::load_mesh_csv(mesh_file, in.body.dim);
    in.hash.u64(hash_file(mesh_file));
    if (!weights_file.empty()) {  // per-point Q override
      auto q = ppt::load_values_csv(weights_file);
      if (q.size() != in.mesh.size())
        throw std::runtime_error("--weights values must match the mesh rows");
      in.mesh.q = std::move(q);
      in.mesh.label += "+weights:" + fs::path(weights_file).filename().string();
      in.mesh.validate();
      in.hash.u64(hash_file(weights_file));
    }
    return in;
  }
};

void write_json_report(const std::string& out, json j, std::uint64_t config_hash,
                       std::uint64_t seed) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash));
  j["ppt_version"] = ppt::kVersion;
  j["config_hash"] = buf;
  j["seed"] = seed;
  std::string text = j.dump(2) + "\n";
  if (out.empty() || out == "-")
    std::fputs(text.c_str(), stdout);
  else
    ppt::atomic_write_file(out, text);
}

ppt::MeasurePredicate moment_predicate(const json& spec) {
  struct Constraint {
    std::vector<int> alpha;
    double lo, hi;
  };
  auto constraints = std::make_shared<std::vector<Constraint>>();
  for (const auto& c : spec.at("moments")) {
    Constraint cc;
    cc.alpha = c.at("alpha").get<std::vector<int>>();
    cc.lo = c.value("min", -std::numeric_limits<double>::infinity());
    cc.hi = c.value("max", std::numeric_limits<double>::infinity());
    constraints->push_back(std::move(cc));
  }
  return [constraints](const ppt::GridMeasure& mu) {
    for (const auto& c : *constraints) {
      double m = ppt::measure_moment(mu, c.alpha).real();
      if (m < c.lo || m > c.hi) return false;
    }
    return true;
  };
}

ppt::WeightFamily family_from_spec(const std::string& file, const ppt::WeightedMesh& mesh) {
  if (file.empty()) return ppt::default_family(mesh);
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open family spec: " + file);
  json j;
  in >> j;
  int degree = j.value("cheb_degree", 4);
  ppt::WeightFamily fam = ppt::default_family(mesh, degree);
  if (j.contains("box")) {
    fam.box_lo = j["box"].at(0).get<double>();
    fam.box_hi = j["box"].at(1).get<double>();
  }
  if (!j.value("include_q", true))
    throw std::runtime_error("family spec: include_q=false is unsupported (the rate "
                             "function needs Q in the family)");
  return fam;
}

int cmd_body(const std::string& spec, int n_max, const std::string& out) {
  auto body = ppt::load_body_json(spec);
  auto consts = ppt::compute_constants(body, n_max);
  ppt::Fnv1a h;
  h.u64(hash_file(spec));
  h.i64(n_max);
  ppt::CsvWriter w(out, h.value(), 0);
  w.comment("gamma_d: " + ppt::format_double(consts.gamma_d));
  w.comment("a_raw: " + ppt::format_double(consts.a_raw));
  w.comment("a_extrapolated: " + ppt::format_double(consts.a_extrapolated) +
            " (one-step Richardson; no convergence rate is asserted)");
  w.comment("b_d: " + ppt::format_double(consts.b_d));
  w.comment(std::string("f_converged: ") + (consts.f_converged ? "yes" : "no"));
  if (!consts.f_converged)
    w.comment("warning: |f_{n_max} - f_{n_max-1}| above tolerance; raise --n-max");
  w.row({"n", "d_n", "l_n", "f_n"});
  for (const auto& [n, f] : consts.f_n_sequence) {
    auto basis = ppt::lattice_points(body, n);
    w.row({std::to_string(n), std::to_string(basis.d_n()), std::to_string(basis.l_n),
           ppt::format_double(f)});
  }
  return 0;
}

int cmd_delta(const GlobalOpts& g, const std::string& body_file,
              const std::string& mesh_file, const std::string& weights_file,
              const std::string& range, const std::string& out) {
  auto in = Inputs::load(body_file, mesh_file, weights_file);
  auto ns = parse_range(range);
  auto cache = g.cache();
  in.hash.str("delta");
  for (int n : ns) in.hash.i64(n);

  std::vector<ppt::DeltaEstimate> des;
  for (int n : ns) {
    auto basis = ppt::lattice_points(in.body, n);
    auto cfg = ppt::fekete_points_cached(cache, in.body, in.mesh, basis, n);
    ppt::DeltaEstimate de;
    de.n = n;
    de.d_n = basis.d_n();
    de.l_n = basis.l_n;
    de.log_W = cfg.log_wvdm;
    de.delta_hat = std::exp(cfg.log_wvdm / static_cast<double>(basis.l_n));
    de.converged = cfg.exchange_converged;
    de.config = std::move(cfg);
    des.push_back(std::move(de));
  }
  auto ex = ppt::extrapolate_delta(des);

  ppt::CsvWriter w(out, in.hash.value(), g.seed);
  w.comment("delta_extrapolated: " + ppt::format_double(ex.value) + " [" + ex.model +
            "; reporting choice, not asserted]");
  w.row({"n", "d_n", "l_n", "log_W", "delta_hat", "converged"});
  for (const auto& de : des)
    w.row({std::to_string(de.n), std::to_string(de.d_n), std::to_string(de.l_n),
           ppt::format_double(de.log_W), ppt::format_double(de.delta_hat),
           de.converged ? "1" : "0"});
  return 0;
}

int cmd_fekete(const GlobalOpts& g, const std::string& body_file,
               const std::string& mesh_file, const std::string& weights_file, int n,
               const std::string& out) {
  auto in = Inputs::load(body_file, mesh_file, weights_file);
  auto cache = g.cache();
  auto basis = ppt::lattice_points(in.body, n);
  auto cfg = ppt::fekete_points_cached(cache, in.body, in.mesh, basis, n);
  in.hash.str("fekete");
  in.hash.i64(n);
  ppt::CsvWriter w(out, in.hash.value(), g.seed);
  w.comment("n: " + std::to_string(n));
  w.comment("log_wvdm: " + ppt::format_double(cfg.log_wvdm));
  w.comment("delta_hat: " +
            ppt::format_double(std::exp(cfg.log_wvdm / static_cast<double>(basis.l_n))));
  w.comment(std::string("exchange_converged: ") + (cfg.exchange_converged ? "1" : "0"));
  std::vector<std::string> header{"slot", "mesh_index"};
  for (int c = 0; c < in.body.dim; ++c) header.push_back("x" + std::to_string(c + 1));
  header.push_back("q");
  w.row(header);
  for (std::size_t j = 0; j < cfg.points.size(); ++j) {
    std::vector<std::string> row{std::to_string(j), std::to_string(cfg.mesh_indices[j])};
    for (int c = 0; c < in.body.dim; ++c)
      row.push_back(ppt::format_double(cfg.points[j][static_cast<std::size_t>(c)].real()));
    row.push_back(ppt::format_double(cfg.q_values[j]));
    w.row(row);
  }
  return 0;
}

int cmd_extremal(const GlobalOpts& g, const std::string& body_file,
                 const std::string& mesh_file, const std::string& weights_file, int n,
                 const std::string& z_list, const std::string& out, bool audit) {
  auto in = Inputs::load(body_file, mesh_file, weights_file);
  auto cache = g.cache();
  auto basis = ppt::lattice_points(in.body, n);
  auto cfg = ppt::fekete_points_cached(cache, in.body, in.mesh, basis, n);

  std::vector<ppt::Point> zs;
  std::stringstream ss(z_list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    ppt::Point p;
    std::stringstream cs(tok);
    std::string coord;
    while (std::getline(cs, coord, ':')) p.emplace_back(std::stod(coord), 0.0);
    if (static_cast<int>(p.size()) != in.body.dim)
      throw std::runtime_error("--z entry '" + tok + "' has wrong dimension");
    zs.push_back(std::move(p));
  }
  auto evs = ppt::extremal_lower_batch(zs, cfg, in.mesh);

  in.hash.str("extremal");
  in.hash.i64(n);
  in.hash.str(z_list);
  ppt::CsvWriter w(out, in.hash.value(), g.seed);
  w.comment("values are one-sided lower bounds (mesh-relative admissibility)");
  if (audit) {
    auto rep = ppt::admissibility_audit(cfg, in.mesh, evs);
    w.comment("admissibility max(u - Q) on mesh: " +
              ppt::format_double(rep.max_violation_mesh));
    if (rep.refined_available)
      w.comment("admissibility max(u - Q) on 4x audit mesh: " +
                ppt::format_double(rep.max_violation_refined));
  }
  std::vector<std::string> header;
  for (int c = 0; c < in.body.dim; ++c) header.push_back("z" + std::to_string(c + 1));
  for (auto s : {"n", "u_n", "lagrange_bound", "extremal_poly_bound", "attaining_index"})
    header.push_back(s);
  w.row(header);
  for (const auto& ev : evs) {
    std::vector<std::string> row;
    for (int c = 0; c < in.body.dim; ++c)
      row.push_back(ppt::format_double(ev.z[static_cast<std::size_t>(c)].real()));
    row.push_back(std::to_string(n));
    row.push_back(ppt::format_double(ev.value));
    row.push_back(ppt::format_double(ev.lagrange_value));
    row.push_back(ppt::format_double(ev.chebyshev_value));
    row.push_back(std::to_string(ev.attaining_index));
    w.row(row);
  }
  return 0;
}

int cmd_energy(const GlobalOpts& g, const std::string& body_file,
               const std::string& mesh_file, const std::string& weights_file,
               const std::string& range, const std::string& out, int consts_nmax,
               const std::string& gateaux_u,
               const std::string& t_grid_text, int gateaux_n,
               const std::string& gateaux_out) {
  auto in = Inputs::load(body_file, mesh_file, weights_file);
  auto consts = ppt::compute_constants(in.body, consts_nmax);
  auto ns = parse_range(range);
  auto cache = g.cache();
  in.hash.str("energy");
  for (int n : ns) in.hash.i64(n);

  std::vector<ppt::DeltaEstimate> des;
  for (int n : ns) {
    auto basis = ppt::lattice_points(in.body, n);
    auto cfg = ppt::fekete_points_cached(cache, in.body, in.mesh, basis, n);
    ppt::DeltaEstimate de;
    de.n = n;
    de.d_n = basis.d_n();
    de.l_n = basis.l_n;
    de.log_W = cfg.log_wvdm;
    de.delta_hat = std::exp(cfg.log_wvdm / static_cast<double>(basis.l_n));
    de.converged = cfg.exchange_converged;
    des.push_back(std::move(de));
  }
  auto ex = ppt::extrapolate_delta(des);

  ppt::CsvWriter w(out, in.hash.value(), g.seed);
  w.comment("E(V*) = -log(delta^Q)/b_d with b_d = " + ppt::format_double(consts.b_d));
  w.comment("E_extrapolated: " +
            ppt::format_double(ppt::energy_via_rumely(std::log(ex.value), consts)) + " [" +
            ex.model + "]");
  w.row({"n", "log_delta_hat", "E_hat"});
  for (const auto& de : des)
    w.row({std::to_string(de.n), ppt::format_double(std::log(de.delta_hat)),
           ppt::format_double(ppt::energy_via_rumely(de, consts))});

  if (!gateaux_u.empty()) {
    auto u = ppt::load_values_csv(gateaux_u);
    if (u.size() != in.mesh.size())
      throw std::runtime_error("--gateaux-u values must match the mesh rows");
    std::vector<double> ts;
    std::stringstream ss(t_grid_text);
    std::string tok;
    while (std::getline(ss, tok, ',')) ts.push_back(std::stod(tok));
    auto rep = ppt::gateaux_check(in.mesh, in.body, u, ts, gateaux_n, consts);
    ppt::Fnv1a gh = in.hash;
    gh.str("gateaux");
    gh.i64(gateaux_n);
    ppt::CsvWriter gw(gateaux_out, gh.value(), g.seed);
    gw.comment("max_discrepancy: " + ppt::format_double(rep.max_discrepancy));
    gw.row({"t", "F", "fd_derivative", "mu_integral", "discrepancy"});
    for (const auto& r : rep.rows)
      gw.row({ppt::format_double(r.t), ppt::format_double(r.f_value),
              r.has_fd ? ppt::format_double(r.fd_derivative) : "",
              ppt::format_double(r.mu_integral),
              r.has_fd ? ppt::format_double(r.discrepancy) : ""});
  }
  return 0;
}

int cmd_znorm(const GlobalOpts& g, const std::string& body_file,
              const std::string& mesh_file, const std::string& weights_file, int n,
              const std::string& out) {
  auto in = Inputs::load(body_file, mesh_file, weights_file);
  auto basis = ppt::lattice_points(in.body, n);
  double log_z = ppt::brute_force_log_z(in.mesh, basis, n, g.resolve_budget());
  in.hash.str("znorm");
  in.hash.i64(n);
  json j;
  j["n"] = n;
  j["d_n"] = basis.d_n();
  j["l_n"] = basis.l_n;
  j["log_Z"] = log_z;
  j["Z_root_2ln"] = std::exp(log_z / (2.0 * static_cast<double>(basis.l_n)));
  write_json_report(out, std::move(j), in.hash.value(), g.seed);
  return 0;
}

int cmd_sample(const GlobalOpts& g, const std::string& body_file,
               const std::string& mesh_file, const std::string& weights_file, int n,
               std::size_t chains,
               std::size_t steps, const std::string& out, long long burn_in,
               long long thinning) {
  if (!g.seed_set)
    throw CLI::ValidationError("--seed", "sample requires an explicit seed");
  auto in = Inputs::load(body_file, mesh_file, weights_file);
  auto basis = ppt::lattice_points(in.body, n);
  ppt::McmcOptions opts;
  opts.threads = g.threads;
  if (burn_in >= 0) opts.burn_in = static_cast<std::size_t>(burn_in);
  if (thinning >= 0) opts.thinning = static_cast<std::size_t>(thinning);
  auto sample = ppt::mcmc_sample(in.mesh, basis, n, chains, steps, g.seed, opts);

  in.hash.str("sample");
  in.hash.i64(n);
  in.hash.u64(chains);
  in.hash.u64(steps);
  in.hash.u64(g.seed);
  ppt::CsvWriter w(out, in.hash.value(), g.seed);
  for (const auto& meta : sample.chains) {
    w.comment("chain seed=" + std::to_string(meta.seed) +
              " acceptance=" + ppt::format_double(meta.acceptance_rate) +
              " burn_in=" + std::to_string(meta.burn_in) +
              " thinning=" + std::to_string(meta.thinning) +
              (meta.low_acceptance ? " LOW-ACCEPTANCE" : ""));
  }
  std::vector<std::string> header{"chain", "step"};
  for (long long j = 0; j < sample.d_n; ++j)
    for (int c = 0; c < in.body.dim; ++c)
      header.push_back("p" + std::to_string(j + 1) +
                       (in.body.dim > 1 ? "_x" + std::to_string(c + 1) : ""));
  header.push_back("logwvdm");
  w.row(header);
  for (const auto& row : sample.rows) {
    std::vector<std::string> cells{std::to_string(row.chain), std::to_string(row.step)};
    for (int i : row.idx)
      for (int c = 0; c < in.body.dim; ++c)
        cells.push_back(ppt::format_double(
            in.mesh.points[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].real()));
    cells.push_back(ppt::format_double(row.log_wvdm));
    w.row(cells);
  }
  return 0;
}

int cmd_rate(const GlobalOpts& g, const std::string& body_file,
             const std::string& mesh_file, const std::string& weights_file,
             const std::string& measure_file, const std::string& family_file, int n_max,
             int consts_nmax, const std::string& out) {
  auto in = Inputs::load(body_file, mesh_file, weights_file);
  auto consts = ppt::compute_constants(in.body, consts_nmax);
  auto mu = ppt::load_measure_csv(measure_file, in.mesh);
  auto family = family_from_spec(family_file, in.mesh);
  auto rep = ppt::rate_function(mu, in.mesh, in.body, family, n_max, consts);

  in.hash.str("rate");
  in.hash.u64(hash_file(measure_file));
  in.hash.i64(n_max);
  json j;
  j["n_max"] = n_max;
  j["i_lower"] = rep.i_lower;
  j["log_jq_upper"] = rep.log_jq_upper;
  j["log_delta_q"] = rep.log_delta_q;
  j["bound_directions"] = {{"i_lower", "lower"}, {"log_jq_upper", "upper"}};
  json best;
  for (std::size_t i = 0; i < rep.best_v.size(); ++i)
    best[family.names[i]] = rep.best_v[i];
  j["best_v"] = best;
  j["boundary_hit"] = rep.boundary_hit;
  j["evaluations"] = rep.evaluations;
  write_json_report(out, std::move(j), in.hash.value(), g.seed);
  return 0;
}

int cmd_lambda(const GlobalOpts& g, const std::string& body_file,
               const std::string& mesh_file, const std::string& weights_file,
               const std::string& v_file, int n_max, int consts_nmax,
               const std::string& out) {
  auto in = Inputs::load(body_file, mesh_file, weights_file);
  auto consts = ppt::compute_constants(in.body, consts_nmax);
  auto v = ppt::load_values_csv(v_file);
  if (v.size() != in.mesh.size())
    throw std::runtime_error("--v values must match the mesh rows");
  auto res = ppt::lambda_functional(v, in.mesh, in.body, n_max, consts);
  in.hash.str("lambda");
  in.hash.u64(hash_file(v_file));
  in.hash.i64(n_max);
  json j;
  j["n_max"] = n_max;
  j["lambda"] = res.lambda;
  j["log_delta_shifted"] = res.log_delta_shifted;
  j["log_delta_q"] = res.log_delta_q;
  write_json_report(out, std::move(j), in.hash.value(), g.seed);
  return 0;
}

int cmd_converge(const GlobalOpts& g, const std::string& body_file,
                 const std::string& mesh_file, const std::string& weights_file,
                 const std::string& range, std::size_t chains, std::size_t steps,
                 int k_max, const std::string& out) {
  if (!g.seed_set)
    throw CLI::ValidationError("--seed", "converge requires an explicit seed");
  auto in = Inputs::load(body_file, mesh_file, weights_file);
  auto ns = parse_range(range);
  auto cache = g.cache();
  in.hash.str("converge");
  for (int n : ns) in.hash.i64(n);
  in.hash.u64(g.seed);

  ppt::CsvWriter w(out, in.hash.value(), g.seed);
  w.comment("normalized-moment distance between chain-averaged empirical measures");
  w.comment("and the Fekete measure, per degree");
  w.row({"n", "moment_k", "fekete_mk", "empirical_mk", "abs_diff"});
  std::vector<double> first(static_cast<std::size_t>(k_max) + 1, 0.0);
  std::vector<double> last(static_cast<std::size_t>(k_max) + 1, 0.0);
  for (std::size_t ni = 0; ni < ns.size(); ++ni) {
    int n = ns[ni];
    auto basis = ppt::lattice_points(in.body, n);
    auto cfg = ppt::fekete_points_cached(cache, in.body, in.mesh, basis, n);
    ppt::McmcOptions opts;
    opts.threads = g.threads;
    auto sample =
        ppt::mcmc_sample(in.mesh, basis, n, chains, steps, ppt::derive_seed(g.seed, n), opts);
    auto muf = ppt::fekete_measure(cfg, 1.0);
    for (int k = 1; k <= k_max; ++k) {
      std::vector<int> alpha(static_cast<std::size_t>(in.body.dim), 0);
      alpha[0] = k;
      double fk = ppt::measure_moment(muf, alpha).real();
      double ek = ppt::chain_average_moment(sample, in.mesh, alpha);
      double diff = std::fabs(ek - fk);
      w.row({std::to_string(n), std::to_string(k), ppt::format_double(fk),
             ppt::format_double(ek), ppt::format_double(diff)});
      if (ni == 0) first[static_cast<std::size_t>(k)] = diff;
      if (ni + 1 == ns.size()) last[static_cast<std::size_t>(k)] = diff;
    }
  }
  if (ns.size() > 1) {
    for (int k = 1; k <= k_max; ++k)
      w.comment("trend k=" + std::to_string(k) + ": " +
                (last[static_cast<std::size_t>(k)] <= first[static_cast<std::size_t>(k)]
                     ? "improving"
                     : "not improving"));
  }
  return 0;
}

int cmd_ldp(const GlobalOpts& g, const std::string& body_file,
            const std::string& mesh_file, const std::string& weights_file,
            const std::string& range, const std::string& event_file,
            const std::string& measure_file, std::size_t chains, std::size_t steps,
            int rate_nmax, const std::string& out) {
  if (!g.seed_set) throw CLI::ValidationError("--seed", "ldp requires an explicit seed");
  auto in = Inputs::load(body_file, mesh_file, weights_file);
  auto consts = ppt::compute_constants(in.body, std::max(4, rate_nmax));
  auto ns = parse_range(range);
  std::ifstream ein(event_file);
  if (!ein) throw std::runtime_error("cannot open event spec: " + event_file);
  json espec;
  ein >> espec;
  auto pred = moment_predicate(espec);

  in.hash.str("ldp");
  in.hash.u64(hash_file(event_file));
  for (int n : ns) in.hash.i64(n);
  in.hash.u64(g.seed);

  ppt::CsvWriter w(out, in.hash.value(), g.seed);
  std::vector<double> xs, ys;
  std::vector<std::array<std::string, 4>> rows;
  for (int n : ns) {
    auto basis = ppt::lattice_points(in.body, n);
    ppt::EventLogProb ev;
    try {
      ev = ppt::event_log_probability(in.mesh, basis, n, consts.gamma_d, pred,
                                      g.resolve_budget());
    } catch (const ppt::TupleBudgetError&) {
      ppt::McmcOptions opts;
      opts.threads = g.threads;
      auto sample =
          ppt::mcmc_sample(in.mesh, basis, n, chains, steps, ppt::derive_seed(g.seed, n), opts);
      ev = ppt::event_log_probability_sampled(sample, in.mesh, consts.gamma_d, pred);
    }
    rows.push_back({std::to_string(n), std::to_string(2 * basis.l_n),
                    ppt::format_double(ev.log_sigma),
                    std::string(ev.exact ? "1" : "0") +
                        (ev.zero_frequency ? " (zero-frequency upper bound)" : "")});
    if (ev.log_sigma != ppt::kNegInf) {
      xs.push_back(2.0 * static_cast<double>(basis.l_n));
      ys.push_back(ev.log_sigma);
    }
  }
  // least-squares slope of log sigma_n against -2 l_n; the LDP upper bound
  // makes this at least the infimum of I over the event's closure
  double slope = 0.0;
  if (xs.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      num += (xs[i] - mx) * (ys[i] - my);
      den += (xs[i] - mx) * (xs[i] - mx);
    }
    slope = den > 0 ? -num / den : 0.0;
    if (slope == 0.0) slope = 0.0;  // canonicalize -0
  }
  w.comment("fitted decay slope of log sigma_n against -2 l_n: " +
            ppt::format_double(slope));
  if (!measure_file.empty()) {
    auto mu = ppt::load_measure_csv(measure_file, in.mesh);
    auto family = ppt::default_family(in.mesh);
    auto rep = ppt::rate_function(mu, in.mesh, in.body, family, rate_nmax, consts);
    w.comment("I_lower(representative measure): " + ppt::format_double(rep.i_lower));
  }
  w.row({"n", "two_l_n", "log_sigma", "exact"});
  for (const auto& r : rows) w.row({r[0], r[1], r[2], r[3]});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"convex-body pluripotential experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--cache-dir", g.cache_dir, "configuration cache directory (env PPT_CACHE)");
  auto* seed_opt = app.add_option("--seed", g.seed, "RNG seed (required for sampling runs)");
  app.add_option("--budget", g.budget, "tuple budget for brute-force paths (env PPT_BUDGET)");
  app.add_option("--threads", g.threads, "worker threads for chain sampling");

  std::string body_file, mesh_file, out, range = "1..4", z_list = "2.0";
  std::string measure_file, family_file, v_file, event_file, weights_file;
  std::string gateaux_u, gateaux_out, t_grid = "-0.05,0,0.05";
  int n = 1, n_max = 20, consts_nmax = 8, k_max = 4, gateaux_n = 10;
  long long burn_in = -1, thinning = -1;
  std::size_t chains = 2, steps = 100;
  bool audit = false;

  auto* body = app.add_subcommand("body", "polytope dimensions and constants");
  body->add_option("--spec", body_file, "body spec JSON")->required();
  auto* info = body->add_subcommand("info", "print the d_n, l_n, f_n table");
  info->add_option("--n-max", n_max, "largest degree for the f_n sequence");
  info->add_option("--out", out, "output CSV (default stdout)");

  auto* delta = app.add_subcommand("delta", "transfinite diameter estimates");
  delta->add_option("--body", body_file)->required();
  delta->add_option("--mesh", mesh_file)->required();
  delta->add_option("--weights", weights_file, "override mesh Q values (CSV, one per row)");
  delta->add_option("--n", range, "degree or range a..b")->required();
  delta->add_option("--out", out);

  auto* fekete = app.add_subcommand("fekete", "weighted Fekete configuration");
  fekete->add_option("--body", body_file)->required();
  fekete->add_option("--mesh", mesh_file)->required();
  fekete->add_option("--weights", weights_file, "override mesh Q values (CSV, one per row)");
  fekete->add_option("--n", n)->required();
  fekete->add_option("--dump-points", out, "output CSV (default stdout)");

  auto* extremal = app.add_subcommand("extremal", "extremal function lower bounds");
  extremal->add_option("--body", body_file)->required();
  extremal->add_option("--mesh", mesh_file)->required();
  extremal->add_option("--weights", weights_file, "override mesh Q values (CSV, one per row)");
  extremal->add_option("--n", n)->required();
  extremal->add_option("--z", z_list, "comma-separated points (':' between coords)")
      ->required();
  extremal->add_flag("--audit", audit, "include the admissibility audit");
  extremal->add_option("--out", out);

  auto* energy = app.add_subcommand("energy", "Rumely energies from delta estimates");
  energy->add_option("--body", body_file)->required();
  energy->add_option("--mesh", mesh_file)->required();
  energy->add_option("--weights", weights_file, "override mesh Q values (CSV, one per row)");
  energy->add_option("--n", range, "degree or range a..b")->required();
  energy->add_option("--consts-n-max", consts_nmax);
  energy->add_option("--gateaux-u", gateaux_u, "direction values CSV (one per mesh row)");
  energy->add_option("--t-grid", t_grid, "symmetric t grid for the derivative check");
  energy->add_option("--gateaux-n", gateaux_n);
  energy->add_option("--gateaux-out", gateaux_out);
  energy->add_option("--out", out);

  auto* znorm = app.add_subcommand("znorm", "exact Z_n by enumeration");
  znorm->add_option("--body", body_file)->required();
  znorm->add_option("--mesh", mesh_file)->required();
  znorm->add_option("--weights", weights_file, "override mesh Q values (CSV, one per row)");
  znorm->add_option("--n", n)->required();
  znorm->add_option("--out", out);

  auto* sample = app.add_subcommand("sample", "Metropolis sampling of Prob_n");
  sample->add_option("--body", body_file)->required();
  sample->add_option("--mesh", mesh_file)->required();
  sample->add_option("--weights", weights_file, "override mesh Q values (CSV, one per row)");
  sample->add_option("--n", n)->required();
  sample->add_option("--chains", chains);
  sample->add_option("--steps", steps, "retained samples per chain");
  sample->add_option("--burn-in", burn_in, "proposals (default 10 d_n m)");
  sample->add_option("--thin", thinning, "proposals between samples (default d_n m)");
  sample->add_option("--out", out);

  auto* rate = app.add_subcommand("rate", "rate function lower bound for a measure");
  rate->add_option("--body", body_file)->required();
  rate->add_option("--mesh", mesh_file)->required();
  rate->add_option("--weights", weights_file, "override mesh Q values (CSV, one per row)");
  rate->add_option("--measure", measure_file)->required();
  rate->add_option("--family", family_file, "family spec JSON (default: Q + Chebyshev<=4)");
  rate->add_option("--n-max", n_max)->required();
  rate->add_option("--consts-n-max", consts_nmax);
  rate->add_option("--out", out);

  auto* lambda = app.add_subcommand("lambda", "free-energy functional");
  lambda->add_option("--body", body_file)->required();
  lambda->add_option("--mesh", mesh_file)->required();
  lambda->add_option("--weights", weights_file, "override mesh Q values (CSV, one per row)");
  lambda->add_option("--v", v_file, "direction values CSV")->required();
  lambda->add_option("--n-max", n_max)->required();
  lambda->add_option("--consts-n-max", consts_nmax);
  lambda->add_option("--out", out);

  auto* converge = app.add_subcommand("converge", "empirical-measure convergence report");
  converge->add_option("--body", body_file)->required();
  converge->add_option("--mesh", mesh_file)->required();
  converge->add_option("--weights", weights_file, "override mesh Q values (CSV, one per row)");
  converge->add_option("--n", range, "degree or range a..b")->required();
  converge->add_option("--chains", chains);
  converge->add_option("--steps", steps);
  converge->add_option("--k-max", k_max, "highest moment");
  converge->add_option("--out", out);

  auto* ldp = app.add_subcommand("ldp", "event decay versus the rate function");
  ldp->add_option("--body", body_file)->required();
  ldp->add_option("--mesh", mesh_file)->required();
  ldp->add_option("--weights", weights_file, "override mesh Q values (CSV, one per row)");
  ldp->add_option("--n", range, "degree or range a..b")->required();
  ldp->add_option("--event", event_file, "event spec JSON (moment constraints)")->required();
  ldp->add_option("--measure", measure_file, "representative measure CSV");
  ldp->add_option("--chains", chains);
  ldp->add_option("--steps", steps);
  ldp->add_option("--rate-n-max", n_max);
  ldp->add_option("--out", out);

  CLI11_PARSE(app, argc, argv);
  g.seed_set = seed_opt->count() > 0;

  try {
    if (body->parsed()) {
      if (!info->parsed()) throw std::runtime_error("body: expected the 'info' subcommand");
      return cmd_body(body_file, n_max, out);
    }
    if (delta->parsed())
      return cmd_delta(g, body_file, mesh_file, weights_file, range, out);
    if (fekete->parsed())
      return cmd_fekete(g, body_file, mesh_file, weights_file, n, out);
    if (extremal->parsed())
      return cmd_extremal(g, body_file, mesh_file, weights_file, n, z_list, out, audit);
    if (energy->parsed())
      return cmd_energy(g, body_file, mesh_file, weights_file, range, out, consts_nmax,
                        gateaux_u, t_grid, gateaux_n, gateaux_out);
    if (znorm->parsed())
      return cmd_znorm(g, body_file, mesh_file, weights_file, n, out);
    if (sample->parsed())
      return cmd_sample(g, body_file, mesh_file, weights_file, n, chains, steps, out,
                        burn_in, thinning);
    if (rate->parsed())
      return cmd_rate(g, body_file, mesh_file, weights_file, measure_file, family_file,
                      n_max, consts_nmax, out);
    if (lambda->parsed())
      return cmd_lambda(g, body_file, mesh_file, weights_file, v_file, n_max,
                        consts_nmax, out);
    if (converge->parsed())
      return cmd_converge(g, body_file, mesh_file, weights_file, range, chains, steps,
                          k_max, out);
    if (ldp->parsed())
      return cmd_ldp(g, body_file, mesh_file, weights_file, range, event_file,
                     measure_file, chains, steps, n_max, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
