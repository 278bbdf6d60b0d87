// Access to the Gibbs point process Prob_n with density |VDM^Q|^2 against
// nu^{d_n}: exact tuple enumeration at brute-force scale (Z_n, event
// probabilities) and a single-site Metropolis sampler beyond it. Sampling is
// reproducible bit-for-bit from (mesh, Q, n, seed, steps); chains use
// independent seed streams and aggregate in chain order, so results do not
// depend on thread count.
#pragma once

#include <cstdint>
#include <functional>
#include <future>
#include <span>
#include <stdexcept>
#include <vector>

#include "ppt/common.hpp"
#include "ppt/fekete.hpp"
#include "ppt/mesh.hpp"
#include "ppt/rng.hpp"
#include "ppt/vdm.hpp"

namespace ppt {

inline constexpr unsigned long long kDefaultTupleBudget = 10'000'000ull;

class TupleBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// log|VDM^Q| for tuples of mesh indices, by full refactorization per call.
// Rank-one update schemes would be faster but are numerically fragile; at desk
// scale the O(d_n^3) solve is cheap.
class TupleLogWvdm {
 public:
  TupleLogWvdm(const MonomialBasis& basis, const WeightedMesh& mesh)
      : basis_(&basis), mesh_(&mesh), n_(basis.n), real_(mesh.all_real()) {
    if (real_)
      e_r_ = basis_matrix_real(basis, mesh.points);
    else
      e_c_ = basis_matrix(basis, mesh.points);
  }

  double operator()(std::span<const int> idx) const {
    const auto k = static_cast<Eigen::Index>(basis_->d_n());
    double qsum = 0.0;
    for (int i : idx) {
      double q = mesh_->q[static_cast<std::size_t>(i)];
      if (q == kPosInf) return kNegInf;
      qsum += q;
    }
    double lv;
    if (real_) {
      Eigen::MatrixXd v(k, k);
      for (Eigen::Index j = 0; j < k; ++j)
        v.col(j) = e_r_.row(idx[static_cast<std::size_t>(j)]);
      lv = log_abs_det_equilibrated<double>(std::move(v));
    } else {
      Eigen::MatrixXcd v(k, k);
      for (Eigen::Index j = 0; j < k; ++j)
        v.col(j) = e_c_.row(idx[static_cast<std::size_t>(j)]);
      lv = log_abs_det_equilibrated<Complex>(std::move(v));
    }
    if (lv == kNegInf) return kNegInf;
    return lv - static_cast<double>(n_) * qsum;
  }

 private:
  const MonomialBasis* basis_;
  const WeightedMesh* mesh_;
  int n_;
  bool real_;
  Eigen::MatrixXd e_r_;
  Eigen::MatrixXcd e_c_;
};

inline unsigned long long tuple_count_or_throw(std::size_t m, long long d_n,
                                               unsigned long long budget) {
  long double count = 1.0L;
  for (long long i = 0; i < d_n; ++i) {
    count *= static_cast<long double>(m);
    if (count > static_cast<long double>(budget))
      throw TupleBudgetError("tuple enumeration over budget: m^d_n = " +
                             std::to_string(static_cast<double>(count)) + " > " +
                             std::to_string(budget));
  }
  return static_cast<unsigned long long>(count);
}

}  // namespace detail

// Visits every tuple in mesh^{d_n} with its log integrand
// 2 log|VDM^Q| + sum log(nu); throws TupleBudgetError when m^{d_n} > budget.
template <typename Visitor>
void for_each_tuple(const WeightedMesh& mesh, const MonomialBasis& basis, int n,
                    unsigned long long budget, Visitor&& visit) {
  mesh.validate();
  if (basis.n != n) throw std::invalid_argument("for_each_tuple: basis degree mismatch");
  const auto dn = basis.d_n();
  detail::tuple_count_or_throw(mesh.size(), dn, budget);
  detail::TupleLogWvdm engine(basis, mesh);
  std::vector<double> log_nu(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) log_nu[i] = std::log(mesh.nu[i]);
  std::vector<int> idx(static_cast<std::size_t>(dn), 0);
  while (true) {
    double lw = engine(idx);
    double term = kNegInf;
    if (lw != kNegInf) {
      term = 2.0 * lw;
      for (int i : idx) term += log_nu[static_cast<std::size_t>(i)];
    }
    visit(std::span<const int>(idx), term);
    std::size_t c = 0;
    while (c < idx.size() && ++idx[c] == static_cast<int>(mesh.size())) idx[c++] = 0;
    if (c == idx.size()) break;
  }
}

// Exact log Z_n by enumeration (log-sum-exp accumulation).
inline double brute_force_log_z(const WeightedMesh& mesh, const MonomialBasis& basis,
                                int n, unsigned long long budget = kDefaultTupleBudget) {
  LogSumExp lse;
  for_each_tuple(mesh, basis, n, budget,
                 [&](std::span<const int>, double term) { lse.add(term); });
  return lse.value();
}

struct ChainMeta {
  std::uint64_t seed = 0;
  std::size_t proposals = 0;
  std::size_t accepted = 0;
  std::size_t burn_in = 0;
  std::size_t thinning = 0;
  std::size_t retained = 0;
  double acceptance_rate = 0.0;
  bool low_acceptance = false;  // diagnostic: rate below 0.1%
};

struct SampleRow {
  int chain = 0;
  long long step = 0;          // retained-sample index within the chain
  std::vector<int> idx;        // mesh indices of the d_n points
  double log_wvdm = kNegInf;   // always finite for recorded states
};

struct EnsembleSample {
  int n = 0;
  long long d_n = 0;
  long long l_n = 0;
  std::uint64_t master_seed = 0;
  std::vector<SampleRow> rows;  // chain-major, step order
  std::vector<ChainMeta> chains;
};

struct McmcOptions {
  std::size_t burn_in = static_cast<std::size_t>(-1);   // default 10 * d_n * m
  std::size_t thinning = static_cast<std::size_t>(-1);  // default d_n * m
  int threads = 1;
  FeketeOptions fekete;  // for the deterministic initial state
};

// Single-site Metropolis on mesh^{d_n}: propose replacing one uniformly chosen
// slot by a nu-distributed mesh point, accept with min(1, exp(2 dlog|VDM^Q|)).
// The nu proposal factors cancel against the target, so the ratio is exact.
inline EnsembleSample mcmc_sample(const WeightedMesh& mesh, const MonomialBasis& basis,
                                  int n, std::size_t num_chains, std::size_t steps,
                                  std::uint64_t seed, const McmcOptions& opts = {}) {
  mesh.validate();
  const auto dn = basis.d_n();
  if (static_cast<long long>(mesh.size()) < dn)
    throw std::invalid_argument("mcmc_sample: need d_n <= mesh size");
  if (num_chains == 0 || steps == 0)
    throw std::invalid_argument("mcmc_sample: chains and steps must be positive");

  const std::size_t burn_in = opts.burn_in == static_cast<std::size_t>(-1)
                                  ? 10 * static_cast<std::size_t>(dn) * mesh.size()
                                  : opts.burn_in;
  const std::size_t thinning = opts.thinning == static_cast<std::size_t>(-1)
                                   ? static_cast<std::size_t>(dn) * mesh.size()
                                   : std::max<std::size_t>(1, opts.thinning);

  Configuration init = fekete_points(mesh, basis, n, opts.fekete);

  auto run_chain = [&](int chain_id) {
    std::pair<std::vector<SampleRow>, ChainMeta> out;
    ChainMeta& meta = out.second;
    meta.seed = derive_seed(seed, static_cast<std::uint64_t>(chain_id));
    meta.burn_in = burn_in;
    meta.thinning = thinning;
    Rng rng(meta.seed);
    DiscreteSampler nu(mesh.nu);
    detail::TupleLogWvdm engine(basis, mesh);

    std::vector<int> idx = init.mesh_indices;
    double cur = init.log_wvdm;
    std::vector<int> prop = idx;
    const std::size_t total = burn_in + thinning * steps;
    for (std::size_t t = 1; t <= total; ++t) {
      std::size_t slot = rng.next_index(static_cast<std::size_t>(dn));
      std::size_t cand = nu.sample(rng);
      prop = idx;
      prop[slot] = static_cast<int>(cand);
      double lw = engine(prop);
      ++meta.proposals;
      bool accept = false;
      if (lw != kNegInf) {
        double delta = lw - cur;
        accept = delta >= 0.0 || rng.next_unit() < std::exp(2.0 * delta);
      }
      if (accept) {
        idx[slot] = static_cast<int>(cand);
        cur = lw;
        ++meta.accepted;
      }
      if (t > burn_in && (t - burn_in) % thinning == 0) {
        SampleRow row;
        row.chain = chain_id;
        row.step = static_cast<long long>(out.first.size());
        row.idx = idx;
        row.log_wvdm = cur;
        out.first.push_back(std::move(row));
      }
    }
    meta.retained = out.first.size();
    meta.acceptance_rate =
        meta.proposals ? static_cast<double>(meta.accepted) / meta.proposals : 0.0;
    meta.low_acceptance = meta.acceptance_rate < 1e-3;
    return out;
  };

  EnsembleSample sample;
  sample.n = n;
  sample.d_n = dn;
  sample.l_n = basis.l_n;
  sample.master_seed = seed;

  if (opts.threads > 1 && num_chains > 1) {
    std::vector<std::future<std::pair<std::vector<SampleRow>, ChainMeta>>> futs;
    futs.reserve(num_chains);
    for (std::size_t c = 0; c < num_chains; ++c)
      futs.push_back(std::async(std::launch::async, run_chain, static_cast<int>(c)));
    for (auto& f : futs) {
      auto [rows, meta] = f.get();
      sample.chains.push_back(meta);
      for (auto& r : rows) sample.rows.push_back(std::move(r));
    }
  } else {
    for (std::size_t c = 0; c < num_chains; ++c) {
      auto [rows, meta] = run_chain(static_cast<int>(c));
      sample.chains.push_back(meta);
      for (auto& r : rows) sample.rows.push_back(std::move(r));
    }
  }
  return sample;
}

// gamma_d-mass empirical measure of one sampled configuration.
inline GridMeasure empirical_measure(const SampleRow& row, const WeightedMesh& mesh,
                                     double gamma_d) {
  GridMeasure mu;
  const double mass = gamma_d / static_cast<double>(row.idx.size());
  for (int i : row.idx) {
    mu.support.push_back(mesh.points[static_cast<std::size_t>(i)]);
    mu.masses.push_back(mass);
    mu.mesh_indices.push_back(i);
  }
  return mu;
}

// Chain-averaged real moment of the normalized (probability) empirical measure.
inline double chain_average_moment(const EnsembleSample& sample, const WeightedMesh& mesh,
                                   const std::vector<int>& alpha) {
  if (sample.rows.empty()) throw std::invalid_argument("chain_average_moment: empty sample");
  double acc = 0.0;
  for (const auto& row : sample.rows) {
    GridMeasure mu = empirical_measure(row, mesh, 1.0);
    acc += measure_moment(mu, alpha).real();
  }
  return acc / static_cast<double>(sample.rows.size());
}

// Fraction of sampled configurations with |VDM^Q| below (delta_hat - eta)^{l_n}.
inline double tail_fraction(const EnsembleSample& sample, double delta_hat, double eta) {
  if (!(eta > 0.0) || !(eta < delta_hat))
    throw std::invalid_argument("tail_fraction: need 0 < eta < delta_hat");
  const double threshold = static_cast<double>(sample.l_n) * std::log(delta_hat - eta);
  std::size_t below = 0;
  for (const auto& row : sample.rows)
    if (row.log_wvdm < threshold) ++below;
  return sample.rows.empty() ? 0.0
                             : static_cast<double>(below) / static_cast<double>(sample.rows.size());
}

using MeasurePredicate = std::function<bool(const GridMeasure&)>;

struct EventLogProb {
  double log_sigma = kNegInf;
  bool exact = false;
  bool zero_frequency = false;  // estimate is an upper bound only
};

// log sigma_n(B) by exact enumeration: log of the restricted integral minus
// log Z_n, both accumulated in one pass.
inline EventLogProb event_log_probability(const WeightedMesh& mesh,
                                          const MonomialBasis& basis, int n,
                                          double gamma_d, const MeasurePredicate& pred,
                                          unsigned long long budget = kDefaultTupleBudget) {
  LogSumExp total, restricted;
  bool any = false;
  GridMeasure mu;
  for_each_tuple(mesh, basis, n, budget, [&](std::span<const int> idx, double term) {
    total.add(term);
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
  EventLogProb out;
  out.exact = true;
  out.zero_frequency = !any;
  double z = total.value();
  if (z == kNegInf) throw std::runtime_error("event_log_probability: Z_n = 0");
  out.log_sigma = restricted.value() == kNegInf ? kNegInf : restricted.value() - z;
  return out;
}

// Sampled estimate of log sigma_n(B); zero-frequency events give the
// log(1/(N+1)) upper bound with the flag set.
inline EventLogProb event_log_probability_sampled(const EnsembleSample& sample,
                                                  const WeightedMesh& mesh, double gamma_d,
                                                  const MeasurePredicate& pred) {
  if (sample.rows.empty())
    throw std::invalid_argument("event_log_probability_sampled: empty sample");
  std::size_t hits = 0;
  for (const auto& row : sample.rows)
    if (pred(empirical_measure(row, mesh, gamma_d))) ++hits;
  EventLogProb out;
  out.exact = false;
  const auto n = static_cast<double>(sample.rows.size());
  if (hits == 0) {
    out.zero_frequency = true;
    out.log_sigma = std::log(1.0 / (n + 1.0));
  } else {
    out.log_sigma = std::log(static_cast<double>(hits) / n);
  }
  return out;
}

}  // namespace ppt
