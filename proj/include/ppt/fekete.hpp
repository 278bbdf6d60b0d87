// Mesh-based maximization of the weighted Vandermonde: Leja-style greedy
// seeding followed by single-point exchange passes, transfinite diameter
// estimates per degree, and Fekete empirical measures.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ppt/common.hpp"
#include "ppt/mesh.hpp"
#include "ppt/polytope.hpp"
#include "ppt/vdm.hpp"

namespace ppt {

struct FeketeOptions {
  int max_exchange_passes = 50;
  double exchange_tol = 1e-10;  // improvements below this do not trigger swaps
  // Optional starting configuration (mesh indices); skips the Leja seeding.
  // Used by the family optimizer, where consecutive weights differ slightly.
  const std::vector<int>* warm_start = nullptr;
};

namespace detail {

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> mesh_basis_matrix(
    const MonomialBasis& basis, const WeightedMesh& mesh);

template <>
inline Eigen::MatrixXd mesh_basis_matrix<double>(const MonomialBasis& basis,
                                                 const WeightedMesh& mesh) {
  return basis_matrix_real(basis, mesh.points);
}

template <>
inline Eigen::MatrixXcd mesh_basis_matrix<Complex>(const MonomialBasis& basis,
                                                   const WeightedMesh& mesh) {
  return basis_matrix(basis, mesh.points);
}

// Greedy seeding: row-pivoted elimination on the weighted basis matrix,
// maximizing the next pivot magnitude (Leja); ties break to the lowest mesh
// index, so the result is deterministic given mesh order.
template <typename Scalar>
std::vector<int> leja_seed(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& e,
                           const WeightedMesh& mesh, int n) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index m = e.rows();
  const Eigen::Index k = e.cols();
  Mat w = e;
  for (Eigen::Index r = 0; r < m; ++r) {
    double q = mesh.q[static_cast<std::size_t>(r)];
    double f = q == kPosInf ? 0.0 : std::exp(-static_cast<double>(n) * q);
    w.row(r) *= f;
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    double s = w.col(j).cwiseAbs().maxCoeff();
    if (s > 0) w.col(j) /= s;
  }
  std::vector<char> used(static_cast<std::size_t>(m), 0);
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(k));
  for (Eigen::Index t = 0; t < k; ++t) {
    Eigen::Index best = -1;
    double best_abs = 0.0;
    for (Eigen::Index r = 0; r < m; ++r) {
      if (used[static_cast<std::size_t>(r)]) continue;
      double a = std::abs(w(r, t));
      if (a > best_abs) {
        best_abs = a;
        best = r;
      }
    }
    if (best < 0 || best_abs < 1e-280)
      throw std::runtime_error(
          "fekete_points: mesh is degenerate for this basis (all candidate "
          "configurations have |VDM^Q| = 0)");
    used[static_cast<std::size_t>(best)] = 1;
    order.push_back(static_cast<int>(best));
    for (Eigen::Index r = 0; r < m; ++r) {
      if (used[static_cast<std::size_t>(r)]) continue;
      Scalar f = w(r, t) / w(best, t);
      if (f != Scalar(0)) w.row(r).tail(k - t) -= f * w.row(best).tail(k - t);
    }
  }
  return order;
}

}  // namespace detail

// Locally maximal weighted Fekete configuration on the mesh. On termination no
// single-point mesh swap increases log|VDM^Q| by more than opts.exchange_tol.
inline Configuration fekete_points(const WeightedMesh& mesh, const MonomialBasis& basis,
                                   int n, const FeketeOptions& opts = {}) {
  mesh.validate();
  const long long dn = basis.d_n();
  if (static_cast<long long>(mesh.size()) < dn)
    throw std::invalid_argument("fekete_points: mesh has fewer than d_n points");
  if (basis.n != n)
    throw std::invalid_argument("fekete_points: basis degree mismatch");

  const bool real = mesh.all_real();
  bool warm = false;
  if (opts.warm_start) {
    if (static_cast<long long>(opts.warm_start->size()) == dn) {
      std::vector<int> sorted = *opts.warm_start;
      std::sort(sorted.begin(), sorted.end());
      warm = sorted.front() >= 0 && sorted.back() < static_cast<int>(mesh.size()) &&
             std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
      for (int i : sorted)
        if (mesh.q[static_cast<std::size_t>(i)] == kPosInf) warm = false;
    }
  }
  std::vector<int> idx;
  Eigen::MatrixXcd e_c;
  std::optional<OrthoMeshBasis> ortho;
  if (real) {
    if (warm)
      idx = *opts.warm_start;
    else
      idx = detail::leja_seed<double>(detail::mesh_basis_matrix<double>(basis, mesh),
                                      mesh, n);
    ortho.emplace(basis, mesh.points);
  } else {
    e_c = detail::mesh_basis_matrix<Complex>(basis, mesh);
    idx = warm ? *opts.warm_start : detail::leja_seed<Complex>(e_c, mesh, n);
  }

  auto points_of = [&](const std::vector<int>& ids) {
    std::vector<Point> pts;
    pts.reserve(ids.size());
    for (int i : ids) pts.push_back(mesh.points[static_cast<std::size_t>(i)]);
    return pts;
  };

  auto log_matrix = [&](const std::vector<int>& ids) -> Eigen::MatrixXd {
    if (ortho && ortho->usable()) return MeshLagrange(*ortho, ids).log_matrix();
    LagrangeEvaluator eval(basis, points_of(ids));
    return real ? eval.log_lagrange_matrix(basis_matrix_real(basis, mesh.points))
                : eval.log_lagrange_matrix(e_c);
  };

  const std::size_t m = mesh.size();
  std::vector<char> in_config(m, 0);
  for (int i : idx) in_config[static_cast<std::size_t>(i)] = 1;
  bool converged = false;
  int pass = 0;
  for (; pass < opts.max_exchange_passes; ++pass) {
    Eigen::MatrixXd logl = log_matrix(idx);
    bool improved = false;
    for (long long j = 0; j < dn; ++j) {
      double qj = mesh.q[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
      double best = opts.exchange_tol;
      int best_p = -1;
      for (std::size_t p = 0; p < m; ++p) {
        // points already in the configuration would zero the determinant;
        // skipping them exactly also shields against solver noise under
        // strong weights, where log ell ~ -37 instead of -inf
        if (in_config[p]) continue;
        double qp = mesh.q[p];
        if (qp == kPosInf) continue;
        double delta = logl(j, static_cast<Eigen::Index>(p)) -
                       static_cast<double>(n) * (qp - qj);
        if (delta > best) {
          best = delta;
          best_p = static_cast<int>(p);
        }
      }
      if (best_p >= 0) {
        in_config[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])] = 0;
        in_config[static_cast<std::size_t>(best_p)] = 1;
        idx[static_cast<std::size_t>(j)] = best_p;
        improved = true;
        logl = log_matrix(idx);  // refactor before scanning further slots
      }
    }
    if (!improved) {
      converged = true;
      break;
    }
  }

  Configuration cfg;
  cfg.basis = basis;
  cfg.n = n;
  cfg.mesh_indices = idx;
  cfg.points = points_of(idx);
  cfg.q_values.reserve(idx.size());
  for (int i : idx) cfg.q_values.push_back(mesh.q[static_cast<std::size_t>(i)]);
  cfg.exchange_converged = converged;
  cfg.exchange_passes = pass + (converged ? 1 : 0);
  cfg.recompute_logs();
  if (cfg.log_wvdm == kNegInf)
    throw std::runtime_error("fekete_points: optimizer terminated on a singular configuration");
  return cfg;
}

// Scan every single-point swap; returns the best improvement found (<= tol on a
// converged configuration). Exposed for the exchange-optimality property test.
inline double best_exchange_gain(const WeightedMesh& mesh, const Configuration& cfg) {
  Eigen::MatrixXd logl;
  if (mesh.all_real()) {
    OrthoMeshBasis ortho(cfg.basis, mesh.points);
    if (ortho.usable()) {
      logl = MeshLagrange(ortho, cfg.mesh_indices).log_matrix();
    } else {
      LagrangeEvaluator eval(cfg.basis, cfg.points);
      logl = eval.log_lagrange_matrix(basis_matrix_real(cfg.basis, mesh.points));
    }
  } else {
    LagrangeEvaluator eval(cfg.basis, cfg.points);
    logl = eval.log_lagrange_matrix(basis_matrix(cfg.basis, mesh.points));
  }
  std::vector<char> in_config(mesh.size(), 0);
  for (int i : cfg.mesh_indices) in_config[static_cast<std::size_t>(i)] = 1;
  double best = kNegInf;
  for (long long j = 0; j < cfg.basis.d_n(); ++j) {
    double qj = cfg.q_values.empty() ? 0.0 : cfg.q_values[static_cast<std::size_t>(j)];
    for (std::size_t p = 0; p < mesh.size(); ++p) {
      if (in_config[p] || mesh.q[p] == kPosInf) continue;
      double delta = logl(j, static_cast<Eigen::Index>(p)) -
                     static_cast<double>(cfg.n) * (mesh.q[p] - qj);
      best = std::max(best, delta);
    }
  }
  return best;
}

struct DeltaEstimate {
  int n = 0;
  long long d_n = 0;
  long long l_n = 0;
  double log_W = kNegInf;     // attained lower bound for max log|VDM^Q|
  double delta_hat = 0.0;     // exp(log_W / l_n)
  bool converged = false;     // exchange converged within the pass cap
  Configuration config;       // the attaining configuration
};

inline DeltaEstimate delta_estimate_single(const WeightedMesh& mesh,
                                           const ConvexBody& body, int n,
                                           const FeketeOptions& opts = {}) {
  MonomialBasis basis = lattice_points(body, n);
  Configuration cfg = fekete_points(mesh, basis, n, opts);
  DeltaEstimate de;
  de.n = n;
  de.d_n = basis.d_n();
  de.l_n = basis.l_n;
  de.log_W = cfg.log_wvdm;
  de.delta_hat = std::exp(cfg.log_wvdm / static_cast<double>(basis.l_n));
  de.converged = cfg.exchange_converged;
  de.config = std::move(cfg);
  return de;
}

inline std::vector<DeltaEstimate> delta_estimate(const WeightedMesh& mesh,
                                                 const ConvexBody& body,
                                                 const std::vector<int>& n_list,
                                                 const FeketeOptions& opts = {}) {
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1])
      throw std::invalid_argument("delta_estimate: n_list must be increasing");
  std::vector<DeltaEstimate> out;
  out.reserve(n_list.size());
  for (int n : n_list) out.push_back(delta_estimate_single(mesh, body, n, opts));
  return out;
}

struct DeltaExtrapolation {
  double value = 0.0;
  bool extrapolated = false;
  std::string model;  // reporting choice: no convergence rate is asserted
};

// The delta_hat sequence converges like delta * exp(a log(n)/n + b/n + o(1/n));
// fit log(delta_hat) in the basis {1, log(n)/n, 1/n} on the last three degrees.
inline DeltaExtrapolation extrapolate_delta(const std::vector<DeltaEstimate>& seq) {
  std::vector<std::pair<double, double>> pts;  // (n, log delta_hat)
  for (const auto& de : seq)
    if (de.log_W != kNegInf && de.delta_hat > 0.0)
      pts.emplace_back(static_cast<double>(de.n), std::log(de.delta_hat));
  DeltaExtrapolation ex;
  if (pts.empty()) throw std::invalid_argument("extrapolate_delta: empty sequence");
  if (pts.size() == 1) {
    ex.value = std::exp(pts[0].second);
    ex.model = "raw";
    return ex;
  }
  if (pts.size() == 2) {
    // two-term model {1, log(n)/n}
    auto [n1, y1] = pts[pts.size() - 2];
    auto [n2, y2] = pts[pts.size() - 1];
    double t1 = std::log(n1) / n1, t2 = std::log(n2) / n2;
    if (std::fabs(t1 - t2) < 1e-14) {
      ex.value = std::exp(y2);
      ex.model = "raw";
      return ex;
    }
    double logd = y2 - t2 * (y1 - y2) / (t1 - t2);
    ex.value = std::exp(logd);
    ex.extrapolated = true;
    ex.model = "fit{1,log(n)/n} on last 2";
    return ex;
  }
  const auto& a = pts[pts.size() - 3];
  const auto& b = pts[pts.size() - 2];
  const auto& c = pts[pts.size() - 1];
  Eigen::Matrix3d m;
  Eigen::Vector3d y;
  int row = 0;
  for (const auto* p : {&a, &b, &c}) {
    double n = p->first;
    m(row, 0) = 1.0;
    m(row, 1) = std::log(n) / n;
    m(row, 2) = 1.0 / n;
    y(row) = p->second;
    ++row;
  }
  Eigen::FullPivLU<Eigen::Matrix3d> lu(m);
  if (!lu.isInvertible()) {
    ex.value = std::exp(c.second);
    ex.model = "raw";
    return ex;
  }
  Eigen::Vector3d sol = lu.solve(y);
  ex.value = std::exp(sol(0));
  ex.extrapolated = true;
  ex.model = "fit{1,log(n)/n,1/n} on last 3";
  return ex;
}

// gamma_d * (1/d_n) sum of point masses: lands in M_P(K) and targets mu_{K,Q}.
inline GridMeasure fekete_measure(const Configuration& cfg, double gamma_d) {
  GridMeasure mu;
  const auto dn = static_cast<double>(cfg.points.size());
  mu.support = cfg.points;
  mu.masses.assign(cfg.points.size(), gamma_d / dn);
  mu.mesh_indices = cfg.mesh_indices.empty()
                        ? std::vector<int>(cfg.points.size(), -1)
                        : cfg.mesh_indices;
  return mu;
}

}  // namespace ppt
