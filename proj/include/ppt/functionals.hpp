// The J / J^Q functionals, the large-deviation rate function, E*, and the
// Lambda functional, computed through weighted transfinite-diameter estimates:
//
//   log J(mu)   = inf_v [ log delta^v(K) + b_d int v dmu ]
//   log J^Q(mu) = log J(mu) - b_d int Q dmu
//   I(mu)       = log delta^Q(K) - log J^Q(mu)
//   E*(mu)      = -log J(mu) / b_d
//   Lambda(v)   = log delta^{Q - v/b_d}(K) - log delta^Q(K)   (gamma_d = 1)
//
// The inf runs over a finite-dimensional weight family, so every J estimate is
// an upper bound and every I estimate a lower bound; outputs carry the bound
// direction in their names. The per-n log W_n(w) is a max of affine functions
// of the weight, hence convex, and the objective below is convex in the family
// coefficients; coordinate descent with golden-section line searches is run
// from several deterministic starts.
#pragma once

#include <cstring>
#include <map>
#include <string>
#include <vector>

#include "ppt/common.hpp"
#include "ppt/fekete.hpp"
#include "ppt/mesh.hpp"
#include "ppt/polytope.hpp"
#include "ppt/sampler.hpp"

namespace ppt {

struct WeightFamily {
  std::vector<std::vector<double>> generators;  // values per mesh point
  std::vector<std::string> names;
  double box_lo = -2.0;
  double box_hi = 2.0;
  bool includes_q = false;  // generators[0] holds the base weight Q

  void validate(std::size_t mesh_size) const {
    if (generators.empty()) throw std::invalid_argument("WeightFamily: empty family");
    for (const auto& g : generators)
      if (g.size() != mesh_size)
        throw std::invalid_argument("WeightFamily: generator length mismatch");
    if (!(box_lo < box_hi)) throw std::invalid_argument("WeightFamily: bad box");
    if (includes_q && (box_lo > 1.0 || box_hi < 1.0))
      throw std::invalid_argument("WeightFamily: box must admit the pure-Q coefficient");
  }
};

// {Q} followed by Chebyshev-shape polynomials per coordinate up to the given
// degree, mapped affinely onto the mesh's coordinate hull; box [-2, 2].
inline WeightFamily default_family(const WeightedMesh& mesh, int cheb_degree = 4) {
  if (!mesh.all_real())
    throw std::invalid_argument("default_family: real meshes only");
  WeightFamily fam;
  fam.includes_q = true;
  for (double q : mesh.q)
    if (q == kPosInf)
      throw std::invalid_argument("default_family: Q must be finite on the mesh");
  fam.generators.push_back(mesh.q);
  fam.names.push_back("Q");
  for (int c = 0; c < mesh.dim; ++c) {
    double lo = kPosInf, hi = kNegInf;
    for (const auto& p : mesh.points) {
      lo = std::min(lo, p[static_cast<std::size_t>(c)].real());
      hi = std::max(hi, p[static_cast<std::size_t>(c)].real());
    }
    if (!(lo < hi)) continue;
    for (int k = 1; k <= cheb_degree; ++k) {
      std::vector<double> vals(mesh.size());
      for (std::size_t i = 0; i < mesh.size(); ++i) {
        double t = (2.0 * mesh.points[i][static_cast<std::size_t>(c)].real() - lo - hi) /
                   (hi - lo);
        vals[i] = std::cos(k * std::acos(std::min(1.0, std::max(-1.0, t))));
      }
      fam.generators.push_back(std::move(vals));
      fam.names.push_back("T" + std::to_string(k) +
                          (mesh.dim > 1 ? "(x" + std::to_string(c + 1) + ")" : ""));
    }
  }
  return fam;
}

namespace detail {

// One objective evaluation = one weighted Fekete run at n_max; coordinate
// descent revisits coefficient vectors constantly, so results are memoized on
// the exact bit pattern.
class FamilyObjective {
 public:
  FamilyObjective(const WeightedMesh& mesh, const MonomialBasis& basis,
                  const WeightFamily& family, const BodyConstants& consts,
                  const FeketeOptions& fopts)
      : mesh_(&mesh), basis_(&basis), family_(&family), consts_(&consts), fopts_(fopts) {}

  double log_delta(const std::vector<double>& c) {
    std::vector<std::uint64_t> key(c.size());
    std::memcpy(key.data(), c.data(), c.size() * sizeof(double));
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    WeightedMesh weighted = *mesh_;
    for (std::size_t i = 0; i < weighted.size(); ++i) {
      double v = 0.0;
      for (std::size_t g = 0; g < family_->generators.size(); ++g)
        v += c[g] * family_->generators[g][i];
      weighted.q[i] = v;
    }
    // Consecutive evaluations differ by one coefficient nudge, so the previous
    // optimum is an excellent exchange warm start.
    FeketeOptions fopts = fopts_;
    if (!last_indices_.empty()) fopts.warm_start = &last_indices_;
    Configuration cfg = fekete_points(weighted, *basis_, basis_->n, fopts);
    last_indices_ = cfg.mesh_indices;
    double ld = cfg.log_wvdm / static_cast<double>(basis_->l_n);
    cache_.emplace(std::move(key), ld);
    ++evaluations_;
    return ld;
  }

  // objective(c) = log delta^{v_c} + b_d * int v_c dmu, with the integral
  // assembled from precomputed generator integrals (linear in c).
  double operator()(const std::vector<double>& c, const std::vector<double>& gen_integrals) {
    double iv = 0.0;
    for (std::size_t g = 0; g < c.size(); ++g) iv += c[g] * gen_integrals[g];
    return log_delta(c) + consts_->b_d * iv;
  }

  int evaluations() const { return evaluations_; }

 private:
  const WeightedMesh* mesh_;
  const MonomialBasis* basis_;
  const WeightFamily* family_;
  const BodyConstants* consts_;
  FeketeOptions fopts_;
  std::map<std::vector<std::uint64_t>, double> cache_;
  std::vector<int> last_indices_;
  int evaluations_ = 0;
};

}  // namespace detail

struct FamilyOptResult {
  double inf_value = kPosInf;
  std::vector<double> best_c;
  bool boundary_hit = false;
  int evaluations = 0;
};

struct FamilyOptOptions {
  int max_sweeps = 4;
  int golden_iters = 14;
  double sweep_tol = 1e-4;
  FeketeOptions fekete;
  // Additional deterministic start vectors (e.g. a smaller family's optimum
  // zero-padded, which makes estimates monotone under family enlargement).
  std::vector<std::vector<double>> extra_starts;
};

namespace detail {

inline double golden_line_search(FamilyObjective& obj, std::vector<double>& c,
                                 std::size_t coord, double lo, double hi,
                                 const std::vector<double>& gi, double current,
                                 int iters) {
  const double gr = 0.61803398874989484;
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  auto eval = [&](double t) {
    c[coord] = t;
    return obj(c, gi);
  };
  double f1 = eval(x1), f2 = eval(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = eval(x2);
    }
  }
  double best_t = f1 <= f2 ? x1 : x2;
  double best_f = std::min(f1, f2);
  if (best_f < current) {
    c[coord] = best_t;
    return best_f;
  }
  return current;  // keep the previous coordinate value
}

}  // namespace detail

// Minimizes objective(c) over the coefficient box by coordinate descent from
// several deterministic starts; the pure-Q vector is always evaluated when the
// family contains Q, which pins the one-sided bound guarantees.
inline FamilyOptResult minimize_family(detail::FamilyObjective& obj,
                                       const WeightFamily& family,
                                       const std::vector<double>& gen_integrals,
                                       const FamilyOptOptions& opts = {}) {
  const std::size_t k = family.generators.size();
  FamilyOptResult out;
  auto consider = [&](const std::vector<double>& c, double value) {
    if (value < out.inf_value) {
      out.inf_value = value;
      out.best_c = c;
    }
  };

  std::vector<std::vector<double>> starts;
  starts.emplace_back(k, 0.0);
  if (family.includes_q) {
    std::vector<double> eq(k, 0.0);
    eq[0] = 1.0;
    starts.push_back(eq);
  }
  starts.emplace_back(k, 0.4);
  starts.emplace_back(k, -0.4);
  for (const auto& s : opts.extra_starts) {
    if (s.size() != k)
      throw std::invalid_argument("minimize_family: extra start of wrong size");
    starts.push_back(s);
  }

  for (auto c : starts) {
    for (auto& t : c) t = std::min(family.box_hi, std::max(family.box_lo, t));
    double current = obj(c, gen_integrals);
    consider(c, current);
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
      double before = current;
      for (std::size_t coord = 0; coord < k; ++coord) {
        double keep = c[coord];
        double next =
            detail::golden_line_search(obj, c, coord, family.box_lo, family.box_hi,
                                       gen_integrals, current, opts.golden_iters);
        if (next < current)
          current = next;
        else
          c[coord] = keep;
      }
      consider(c, current);
      if (before - current < opts.sweep_tol) break;
    }
  }
  const double edge = 1e-3 * (family.box_hi - family.box_lo);
  for (double t : out.best_c)
    if (t - family.box_lo < edge || family.box_hi - t < edge) out.boundary_hit = true;
  out.evaluations = obj.evaluations();
  return out;
}

struct JEstimates {
  double inf_value = 0.0;   // inf_v [log delta^v + b_d int v dmu]
  double log_j = 0.0;       // upper bound for log J(mu)
  double log_jq = 0.0;      // upper bound for log J^Q(mu)
  double b_int_q_mu = 0.0;  // b_d int Q dmu
  FamilyOptResult opt;
};

// Precomputed b_d-free generator integrals int g dmu for a mesh-aligned mu.
inline std::vector<double> generator_integrals(const WeightFamily& family,
                                               const GridMeasure& mu) {
  std::vector<double> gi;
  gi.reserve(family.generators.size());
  for (const auto& g : family.generators) gi.push_back(integrate_mesh_function(mu, g));
  return gi;
}

inline JEstimates j_estimates(const GridMeasure& mu, const WeightedMesh& mesh,
                              const ConvexBody& body, const WeightFamily& family,
                              int n_max, const BodyConstants& consts,
                              const FamilyOptOptions& opts = {}) {
  family.validate(mesh.size());
  mu.validate(consts.gamma_d);
  MonomialBasis basis = lattice_points(body, n_max);
  detail::FamilyObjective obj(mesh, basis, family, consts, opts.fekete);
  std::vector<double> gi = generator_integrals(family, mu);
  JEstimates est;
  est.opt = minimize_family(obj, family, gi, opts);
  est.inf_value = est.opt.inf_value;
  est.log_j = est.inf_value;
  est.b_int_q_mu = consts.b_d * integrate_mesh_function(mu, mesh.q);
  est.log_jq = est.inf_value - est.b_int_q_mu;
  return est;
}

inline double j_q_estimate(const GridMeasure& mu, const WeightedMesh& mesh,
                           const ConvexBody& body, const WeightFamily& family,
                           int n_max, const BodyConstants& consts,
                           const FamilyOptOptions& opts = {}) {
  return j_estimates(mu, mesh, body, family, n_max, consts, opts).log_jq;
}

struct RateReport {
  double i_lower = 0.0;       // lower bound for I(mu), >= 0 when Q is in the family
  double log_jq_upper = 0.0;  // upper bound for log J^Q(mu)
  double log_delta_q = 0.0;   // log delta^Q(K) at n_max
  std::vector<double> best_v;
  bool boundary_hit = false;
  int evaluations = 0;
};

// I(mu) = log J^Q(mu_{K,Q}) - log J^Q(mu) = log delta^Q(K) - log J^Q(mu),
// estimated from below. The reference value at v = Q goes through the same
// memoized evaluation as the optimizer, so i_lower >= 0 holds exactly.
inline RateReport rate_function(const GridMeasure& mu, const WeightedMesh& mesh,
                                const ConvexBody& body, const WeightFamily& family,
                                int n_max, const BodyConstants& consts,
                                const FamilyOptOptions& opts = {}) {
  if (!family.includes_q)
    throw std::invalid_argument("rate_function: family must contain the base weight Q");
  family.validate(mesh.size());
  mu.validate(consts.gamma_d);
  MonomialBasis basis = lattice_points(body, n_max);
  detail::FamilyObjective obj(mesh, basis, family, consts, opts.fekete);
  std::vector<double> gi = generator_integrals(family, mu);

  std::vector<double> eq(family.generators.size(), 0.0);
  eq[0] = 1.0;
  double reference = obj(eq, gi);  // log delta^Q + b_d int Q dmu

  FamilyOptResult opt = minimize_family(obj, family, gi, opts);
  RateReport rep;
  rep.i_lower = reference - opt.inf_value;
  rep.log_delta_q = obj.log_delta(eq);
  rep.log_jq_upper = opt.inf_value - (reference - rep.log_delta_q);
  rep.best_v = opt.best_c;
  rep.boundary_hit = opt.boundary_hit;
  rep.evaluations = opt.evaluations;
  return rep;
}

// E*(mu) bounded from below through log J(mu) = -b_d E*(mu).
inline double e_star(const GridMeasure& mu, const WeightedMesh& mesh,
                     const ConvexBody& body, const WeightFamily& family, int n_max,
                     const BodyConstants& consts, const FamilyOptOptions& opts = {}) {
  return -j_estimates(mu, mesh, body, family, n_max, consts, opts).log_j / consts.b_d;
}

struct LambdaResult {
  double lambda = 0.0;
  double log_delta_shifted = 0.0;
  double log_delta_q = 0.0;
};

// Lambda(v) = log delta^{Q - v/b_d} - log delta^Q under the gamma_d = 1
// normalization (enforced: the formula's scaling depends on it).
inline LambdaResult lambda_functional(const std::vector<double>& v,
                                      const WeightedMesh& mesh, const ConvexBody& body,
                                      int n_max, const BodyConstants& consts,
                                      const FeketeOptions& fopts = {}) {
  if (v.size() != mesh.size())
    throw std::invalid_argument("lambda_functional: v values must match mesh");
  if (std::fabs(consts.gamma_d - 1.0) > 1e-9)
    throw std::invalid_argument("lambda_functional: requires gamma_d = 1");
  MonomialBasis basis = lattice_points(body, n_max);
  auto log_delta_for = [&](const WeightedMesh& m) {
    Configuration cfg = fekete_points(m, basis, n_max, fopts);
    return cfg.log_wvdm / static_cast<double>(basis.l_n);
  };
  LambdaResult out;
  out.log_delta_q = log_delta_for(mesh);
  WeightedMesh shifted = mesh;
  for (std::size_t i = 0; i < mesh.size(); ++i) shifted.q[i] -= v[i] / consts.b_d;
  out.log_delta_shifted = log_delta_for(shifted);
  out.lambda = out.log_delta_shifted - out.log_delta_q;
  return out;
}

struct JnDirectResult {
  double log_j = kNegInf;
  bool exact = false;
  bool zero_frequency = false;
};

// J_n^Q(G) = [ integral over G-tilde of |VDM^Q|^2 dnu ]^{1/2 l_n}, exact by
// enumeration within the tuple budget.
inline JnDirectResult j_n_direct(const WeightedMesh& mesh, const MonomialBasis& basis,
                                 int n, double gamma_d, const MeasurePredicate& pred,
                                 unsigned long long budget = kDefaultTupleBudget) {
  LogSumExp restricted;
  bool any = false;
  GridMeasure mu;
  for_each_tuple(mesh, basis, n, budget, [&](std::span<const int> idx, double term) {
    mu.support.clear();
    mu.masses.clear();
    mu.mesh_indices.clear();
    const double mass = gamma_d / static_cast<double>(idx.size());
    for (int i : idx) {
      mu.support.push_back(mesh.points[static_cast<std::size_t>(i)]);
      mu.masses.push_back(mass);
      mu.mesh_indices.push_back(i);
    }
    if (pred(mu)) {
      restricted.add(term);
      if (term != kNegInf) any = true;
    }
  });
  JnDirectResult out;
  out.exact = true;
  out.zero_frequency = !any;
  out.log_j = restricted.value() == kNegInf
                  ? kNegInf
                  : restricted.value() / (2.0 * static_cast<double>(basis.l_n));
  return out;
}

// Monte Carlo fallback: needs an external log Z_n (exact when brute-force
// feasible, else a Bernstein-Markov proxy); flagged as estimated.
inline JnDirectResult j_n_direct_sampled(const EnsembleSample& sample,
                                         const WeightedMesh& mesh, double gamma_d,
                                         const MeasurePredicate& pred, double log_z) {
  EventLogProb ev = event_log_probability_sampled(sample, mesh, gamma_d, pred);
  JnDirectResult out;
  out.exact = false;
  out.zero_frequency = ev.zero_frequency;
  out.log_j = (log_z + ev.log_sigma) / (2.0 * static_cast<double>(sample.l_n));
  return out;
}

}  // namespace ppt
