// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. The reference setting throughout is d=1, P = Sigma, K = [-1,1]
// with Q = 0 on a 401-point Chebyshev mesh; classical interval potential
// theory supplies the oracles, with brute-force enumeration wherever the state
// space is small enough to be exhausted.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ppt/extremal.hpp"
#include "ppt/fekete.hpp"
#include "ppt/functionals.hpp"
#include "ppt/oracles1d.hpp"
#include "ppt/polytope.hpp"
#include "ppt/rng.hpp"
#include "ppt/sampler.hpp"
#include "ppt/vdm.hpp"
#include "support/brute.hpp"

using namespace ppt;

namespace {

int g_failures = 0;

struct Criterion {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [FAILED: " << what << "]";
    }
  }

  template <typename T>
  Criterion& note(const std::string& k, T v) {
    detail << " " << k << "=" << v;
    return *this;
  }
};

void report(int id, const std::string& name, const Criterion& c) {
  std::printf("[%s] criterion %d: %s --%s\n", c.ok ? "PASS" : "FAIL", id, name.c_str(),
              c.detail.str().c_str());
  std::fflush(stdout);
  if (!c.ok) ++g_failures;
}

struct Reference {
  ConvexBody body = ConvexBody::simplex(1);
  BodyConstants consts;
  WeightedMesh mesh = chebyshev_interval_mesh(-1, 1, 401);
  std::vector<DeltaEstimate> deltas;  // n = 10, 20, 30, 40
  double delta_seconds = 0.0;        // charged to criterion 1's runtime budget
  Reference() {
    consts = compute_constants(body, 8);
    auto t0 = std::chrono::steady_clock::now();
    deltas = delta_estimate(mesh, body, {10, 20, 30, 40});
    delta_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  const DeltaEstimate& at(int n) const {
    for (const auto& de : deltas)
      if (de.n == n) return de;
    throw std::logic_error("missing delta estimate");
  }
};

// ---------------------------------------------------------------------------
// 1. transfinite diameter: extrapolated delta within 5% of 1/4 interval length,
//    raw sequence improving, exhaustive Fekete agreement at n <= 4, < 5 min
void criterion1(const Reference& ref) {
  auto t0 = std::chrono::steady_clock::now();
  Criterion c;
  double target = oracles::interval_delta(-1, 1);
  auto ex = extrapolate_delta(ref.deltas);
  c.note("delta_extrapolated", ex.value);
  c.expect(std::fabs(ex.value - target) <= 0.05 * target,
           "extrapolated delta off by more than 5%");
  c.expect(std::fabs(ref.at(40).delta_hat - target) <
               std::fabs(ref.at(30).delta_hat - target),
           "raw sequence not approaching the oracle");
  for (const auto& de : ref.deltas) c.expect(de.converged, "exchange did not converge");

  // exhaustive-search agreement on 12-point meshes, exact
  auto mesh12 = chebyshev_interval_mesh(-1, 1, 12);
  WeightedMesh uneven = mesh12;
  for (std::size_t i = 0; i < uneven.size(); ++i)
    uneven.q[i] = 0.4 * uneven.points[i][0].real();
  double worst = 0.0;
  for (const auto& mesh : {mesh12, uneven}) {
    for (int n = 1; n <= 4; ++n) {
      auto basis = lattice_points(ref.body, n);
      auto cfg = fekete_points(mesh, basis, n);
      double exact = brute::exhaustive_fekete_logw(mesh, basis, n);
      worst = std::max(worst, std::fabs(cfg.log_wvdm - exact));
    }
  }
  c.note("max_|logW-exhaustive|", worst);
  c.expect(worst <= 1e-9, "exchange missed the exhaustive maximum");

  double secs = ref.delta_seconds +
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.note("runtime_s", secs);
  c.expect(secs < 300.0, "runtime exceeded 5 minutes");
  report(1, "transfinite diameter", c);
}

// ---------------------------------------------------------------------------
// 2. Rumely formula: energy within 5% of log(2)/2, and the weight-translation
//    identity exact to 1e-10 per degree for random c in [-1,1]
void criterion2(const Reference& ref) {
  Criterion c;
  double target = std::log(2.0) / 2.0;
  auto ex = extrapolate_delta(ref.deltas);
  double energy = energy_via_rumely(std::log(ex.value), ref.consts);
  c.note("E_hat", energy);
  c.expect(std::fabs(energy - target) <= 0.05 * target, "energy off by more than 5%");

  Rng rng(20250810);
  double worst = 0.0;
  for (int n : {5, 20, 40}) {
    auto base = n == 20 ? ref.at(20) : (n == 40 ? ref.at(40) : delta_estimate_single(ref.mesh, ref.body, n));
    for (int rep = 0; rep < 3; ++rep) {
      double cc = 2.0 * rng.next_unit() - 1.0;
      WeightedMesh shifted = ref.mesh;
      for (auto& q : shifted.q) q += cc;
      auto de = delta_estimate_single(shifted, ref.body, n);
      double expected = std::log(base.delta_hat) -
                        cc * static_cast<double>(n) * base.d_n / static_cast<double>(base.l_n);
      worst = std::max(worst, std::fabs(std::log(de.delta_hat) - expected));
    }
  }
  c.note("max_translation_residual", worst);
  c.expect(worst <= 1e-10, "translation identity broke 1e-10");
  report(2, "Rumely energy relation", c);
}

// ---------------------------------------------------------------------------
// 3. extremal function: z in {1.5, 2, 3} within 2% below-or-equal of the
//    Joukowski oracle at n = 40; admissibility exact to 1e-9 on the mesh
void criterion3(const Reference& ref) {
  Criterion c;
  const auto& cfg = ref.at(40).config;
  std::vector<Point> zs{real_point({1.5}), real_point({2.0}), real_point({3.0})};
  auto evs = extremal_lower_batch(zs, cfg, ref.mesh);
  for (const auto& ev : evs) {
    double z = ev.z[0].real();
    double oracle = oracles::interval_extremal(z, -1, 1);
    std::ostringstream k;
    k << "u(" << z << ")";
    c.note(k.str(), ev.value);
    c.expect(ev.value <= oracle + 1e-6, "bound exceeded the oracle");
    c.expect(oracle - ev.value <= 0.02 * oracle, "bound more than 2% below the oracle");
  }
  auto audit = admissibility_audit(cfg, ref.mesh, evs);
  c.note("admissibility_mesh", audit.max_violation_mesh);
  c.expect(audit.max_violation_mesh <= 1e-9, "u_n > Q on the generating mesh");
  report(3, "extremal function lower bounds", c);
}

// ---------------------------------------------------------------------------
// 4. Z_n: exact 4/3 on {-1,0,1} at n=1; Z_n^{1/2 l_n} <= delta_hat + 1e-9 at
//    every brute-force-feasible pair tested
void criterion4(const Reference& ref) {
  Criterion c;
  WeightedMesh m3;
  m3.dim = 1;
  m3.label = "m3";
  for (double x : {-1.0, 0.0, 1.0}) m3.points.push_back(real_point({x}));
  m3.q.assign(3, 0.0);
  m3.nu.assign(3, 1.0 / 3.0);
  auto basis1 = lattice_points(ref.body, 1);
  double log_z = brute_force_log_z(m3, basis1, 1);
  c.note("Z_1", std::exp(log_z));
  c.expect(std::fabs(log_z - std::log(4.0 / 3.0)) <= 1e-12, "Z_1 != 4/3");

  WeightedMesh m5 = uniform_interval_mesh(-1, 1, 5, "m5");
  WeightedMesh cheb7 = chebyshev_interval_mesh(-1, 1, 7);
  WeightedMesh weighted7 = cheb7;
  for (std::size_t i = 0; i < weighted7.size(); ++i) {
    double x = weighted7.points[i][0].real();
    weighted7.q[i] = 0.3 * x * x;
  }
  double worst = kNegInf;
  int pairs = 0;
  for (const auto& mesh : {m3, m5, cheb7, weighted7}) {
    for (int n : {1, 2, 3}) {
      auto basis = lattice_points(ref.body, n);
      if (static_cast<long long>(mesh.size()) < basis.d_n()) continue;
      double lz = brute_force_log_z(mesh, basis, n);
      auto de = delta_estimate_single(mesh, ref.body, n);
      worst = std::max(worst, lz / (2.0 * basis.l_n) - std::log(de.delta_hat));
      ++pairs;
    }
  }
  c.note("pairs", pairs).note("max_logZroot_minus_logdelta", worst);
  c.expect(worst <= 1e-9, "Z_n^{1/2l_n} exceeded delta_hat");
  report(4, "normalization Z_n and Bernstein-Markov consistency", c);
}

// ---------------------------------------------------------------------------
// 5. sampler correctness: chi-square against exact Prob_n with p > 0.01 over
//    1e5 retained samples; tail bound within 3 MC standard errors
void criterion5(const Reference& ref) {
  Criterion c;
  WeightedMesh m3;
  m3.dim = 1;
  m3.label = "m3";
  for (double x : {-1.0, 0.0, 1.0}) m3.points.push_back(real_point({x}));
  m3.q.assign(3, 0.0);
  m3.nu.assign(3, 1.0 / 3.0);
  auto basis = lattice_points(ref.body, 1);

  std::map<std::vector<int>, double> state_logs;
  LogSumExp z;
  for_each_tuple(m3, basis, 1, 1u << 20, [&](std::span<const int> idx, double term) {
    z.add(term);
    if (term != kNegInf) state_logs[std::vector<int>(idx.begin(), idx.end())] = term;
  });

  McmcOptions opts;
  opts.burn_in = 5000;
  opts.thinning = 300;  // well past the ordswap relaxation (~100 proposals)
  opts.threads = 2;
  auto sample = mcmc_sample(m3, basis, 1, 2, 50000, 7052025, opts);
  std::map<std::vector<int>, std::size_t> counts;
  for (const auto& row : sample.rows) ++counts[row.idx];
  double n = static_cast<double>(sample.rows.size());
  double stat = 0.0;
  for (const auto& [state, lt] : state_logs) {
    double expectn = n * std::exp(lt - z.value());
    double observed = counts.count(state) ? static_cast<double>(counts[state]) : 0.0;
    stat += (observed - expectn) * (observed - expectn) / expectn;
  }
  double pval = brute::chi_square_tail(stat, static_cast<int>(state_logs.size()) - 1);
  c.note("retained", sample.rows.size()).note("chi2", stat).note("p", pval);
  c.expect(sample.rows.size() == 100000, "wrong retained count");
  c.expect(pval > 0.01, "chi-square p <= 0.01");

  auto de = delta_estimate_single(m3, ref.body, 1);
  for (double eta : {0.25, 0.5, 1.0, 1.5}) {
    double threshold = static_cast<double>(de.l_n) * std::log(de.delta_hat - eta);
    double exact_tail = 0.0;
    for (const auto& [state, lt] : state_logs) {
      std::vector<Point> pts{m3.points[static_cast<std::size_t>(state[0])],
                             m3.points[static_cast<std::size_t>(state[1])]};
      if (log_abs_vdm(basis, pts) < threshold) exact_tail += std::exp(lt - z.value());
    }
    double frac = tail_fraction(sample, de.delta_hat, eta);
    double se = std::sqrt(std::max(exact_tail * (1.0 - exact_tail), 1e-4) / n);
    double bound = std::pow(1.0 - eta / (2.0 * de.delta_hat), 2.0 * de.l_n);
    c.expect(exact_tail <= bound + 1e-12, "exact tail violated the deviation bound");
    c.expect(frac <= bound + 3.0 * se, "sampled tail violated the bound + 3 se");
    c.expect(std::fabs(frac - exact_tail) <= 3.0 * se, "sampled tail off the exact value");
  }
  report(5, "sampler matches Prob_n and the tail bound", c);
}

// ---------------------------------------------------------------------------
// 6. equilibrium convergence at n = 30: Fekete and chain-averaged second
//    moments within 0.05 of the arcsine value 1/2, first moments within 0.02
void criterion6(const Reference& ref) {
  Criterion c;
  auto muf = fekete_measure(ref.at(30).config, ref.consts.gamma_d);
  double f1 = measure_moment(muf, {1}).real();
  double f2 = measure_moment(muf, {2}).real();
  c.note("fekete_m1", f1).note("fekete_m2", f2);
  c.expect(std::fabs(f1 - 0.0) <= 0.02, "Fekete first moment off");
  c.expect(std::fabs(f2 - oracles::arcsine_moment(2)) <= 0.05, "Fekete second moment off");

  auto basis = lattice_points(ref.body, 30);
  McmcOptions opts;
  opts.threads = 2;
  auto sample = mcmc_sample(ref.mesh, basis, 30, 2, 40, 61804, opts);
  double m1 = chain_average_moment(sample, ref.mesh, {1});
  double m2 = chain_average_moment(sample, ref.mesh, {2});
  c.note("chain_m1", m1).note("chain_m2", m2);
  c.expect(std::fabs(m1 - 0.0) <= 0.02, "chain first moment off");
  c.expect(std::fabs(m2 - oracles::arcsine_moment(2)) <= 0.05, "chain second moment off");
  report(6, "equilibrium measure convergence", c);
}

// ---------------------------------------------------------------------------
// 7. rate function: I(mu-hat) <= 0.02, nonnegativity exact with Q in the
//    family, and the strict arcsine < uniform < half-interval ordering
void criterion7(const Reference& ref) {
  Criterion c;
  int n_max = 20;
  auto family = default_family(ref.mesh);
  auto mu_fekete = fekete_measure(ref.at(n_max).config, ref.consts.gamma_d);
  auto mu_arcsine = oracles::arcsine_cell_measure(ref.mesh, ref.consts.gamma_d);
  auto mu_uniform = measure_from_weights(ref.mesh, ref.mesh.nu, ref.consts.gamma_d);
  auto mu_half = restricted_nu_measure(ref.mesh, ref.consts.gamma_d,
                                       [](const Point& p) { return p[0].real() >= 0.0; });

  auto rf = rate_function(mu_fekete, ref.mesh, ref.body, family, n_max, ref.consts);
  auto ra = rate_function(mu_arcsine, ref.mesh, ref.body, family, n_max, ref.consts);
  auto ru = rate_function(mu_uniform, ref.mesh, ref.body, family, n_max, ref.consts);
  auto rh = rate_function(mu_half, ref.mesh, ref.body, family, n_max, ref.consts);
  c.note("I_fekete", rf.i_lower).note("I_arcsine", ra.i_lower);
  c.note("I_uniform", ru.i_lower).note("I_half", rh.i_lower);

  c.expect(rf.i_lower <= 0.02, "I(mu-hat) above 0.02");
  for (const auto* r : {&rf, &ra, &ru, &rh})
    c.expect(r->i_lower >= 0.0, "I went negative with Q in the family");
  c.expect(rf.i_lower < ra.i_lower, "mu-hat is not the strict J^Q maximizer");
  c.expect(ra.i_lower < ru.i_lower, "arcsine !< uniform");
  c.expect(ru.i_lower < rh.i_lower, "uniform !< half-interval");
  report(7, "rate function ordering and minimum", c);
}

// ---------------------------------------------------------------------------
// 8. J identities: log J - log J^Q = b_d int Q dmu to 1e-10 and
//    log J^Q <= log delta^Q + 1e-9 across the battery
void criterion8(const Reference& ref) {
  Criterion c;
  WeightedMesh mesh = chebyshev_interval_mesh(-1, 1, 201);
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    double x = mesh.points[i][0].real();
    mesh.q[i] = 0.3 * x * x;
  }
  auto family = default_family(mesh);
  int n_max = 12;
  auto de = delta_estimate_single(mesh, ref.body, n_max);
  std::vector<GridMeasure> battery;
  battery.push_back(fekete_measure(de.config, ref.consts.gamma_d));
  battery.push_back(measure_from_weights(mesh, mesh.nu, ref.consts.gamma_d));
  battery.push_back(restricted_nu_measure(mesh, ref.consts.gamma_d,
                                          [](const Point& p) { return p[0].real() >= 0.0; }));
  battery.push_back(oracles::arcsine_cell_measure(mesh, ref.consts.gamma_d));

  double worst_identity = 0.0, worst_dom = kNegInf;
  for (const auto& mu : battery) {
    auto est = j_estimates(mu, mesh, ref.body, family, n_max, ref.consts);
    double b_int_q = ref.consts.b_d * integrate_mesh_function(mu, mesh.q);
    worst_identity = std::max(worst_identity,
                              std::fabs((est.log_j - est.log_jq) - b_int_q));
    worst_dom = std::max(worst_dom, est.log_jq - std::log(de.delta_hat));
  }
  c.note("max_identity_residual", worst_identity).note("max_logJQ_minus_logdelta", worst_dom);
  c.expect(worst_identity <= 1e-10, "weighted/unweighted J identity broke 1e-10");
  c.expect(worst_dom <= 1e-9, "log J^Q exceeded log delta^Q");
  report(8, "J-functional identities", c);
}

// ---------------------------------------------------------------------------
// 9. Lambda functional: Lambda(0) = 0 exact, Lambda(c) = c within 1e-6 under
//    gamma_d = 1, and the derivative check discrepancy < 0.05 for u = x^2
void criterion9(const Reference& ref) {
  Criterion c;
  int n_max = 20;
  std::vector<double> zero(ref.mesh.size(), 0.0);
  auto l0 = lambda_functional(zero, ref.mesh, ref.body, n_max, ref.consts);
  c.note("lambda(0)", l0.lambda);
  c.expect(l0.lambda == 0.0, "Lambda(0) != 0 exactly");

  double cc = 0.8191;
  std::vector<double> constant(ref.mesh.size(), cc);
  auto lc = lambda_functional(constant, ref.mesh, ref.body, n_max, ref.consts);
  c.note("lambda(c)-c", lc.lambda - cc);
  c.expect(std::fabs(lc.lambda - cc) <= 1e-6, "Lambda(c) != c");

  std::vector<double> u(ref.mesh.size());
  for (std::size_t i = 0; i < ref.mesh.size(); ++i) {
    double x = ref.mesh.points[i][0].real();
    u[i] = x * x;
  }
  auto rep = gateaux_check(ref.mesh, ref.body, u, {-0.05, 0.0, 0.05}, 30, ref.consts);
  c.note("gateaux_discrepancy", rep.max_discrepancy);
  c.note("derivative", rep.rows[1].fd_derivative);
  c.expect(rep.max_discrepancy < 0.05, "derivative check discrepancy >= 0.05");
  report(9, "Lambda functional and derivative formula", c);
}

// ---------------------------------------------------------------------------
// 10. constants: A = 1 exactly for the simplex in d <= 3; A = 3/2 within 1% at
//     n_max = 60 for the unit square; b_1 gamma_1 = 2 exactly
void criterion10(const Reference& ref) {
  Criterion c;
  for (int d = 1; d <= 3; ++d) {
    auto bc = compute_constants(ConvexBody::simplex(d), d == 3 ? 8 : 12);
    std::ostringstream k;
    k << "A_simplex_d" << d;
    c.note(k.str(), bc.A);
    c.expect(bc.A == 1.0, "A(simplex) != 1 exactly");
  }
  auto square = compute_constants(ConvexBody::unit_cube(2), 60);
  c.note("A_square", square.A);
  c.expect(std::fabs(square.A - 1.5) <= 0.01 * 1.5, "A(square) off by more than 1%");
  c.expect(square.f_converged, "f_n sequence flagged as non-converged");
  c.note("b1*gamma1", ref.consts.b_d * ref.consts.gamma_d);
  c.expect(ref.consts.b_d * ref.consts.gamma_d == 2.0, "b_1 gamma_1 != 2 exactly");
  report(10, "body constants", c);
}

}  // namespace

int main() {
  auto t0 = std::chrono::steady_clock::now();
  Reference ref;
  criterion1(ref);
  criterion2(ref);
  criterion3(ref);
  criterion4(ref);
  criterion5(ref);
  criterion6(ref);
  criterion7(ref);
  criterion8(ref);
  criterion9(ref);
  criterion10(ref);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d/10 criteria passed (%.1f s)\n", 10 - g_failures, secs);
  return g_failures;
}
