// Lower bounds for the weighted extremal function V*_{P,K,Q}. Every bound comes
// from an explicit competitor p in Poly(nP) with |p| <= e^{nQ} on the mesh, so
// the values are one-sided relative to the mesh by construction:
//
//  - Lagrange bound: u(z) = max_j [(1/n) log|ell_j(z)| + Q(x_j)], admissible by
//    Fekete exchange optimality. Cheap, but its deficit is O(log(n)/n).
//  - Extremal-polynomial bound: sup { (1/n) log|p(z)| : |p| <= e^{nQ} on the
//    mesh }, solved as a linear program (real z, real mesh). Deficit O(1/n).
//
// The reported value is the max of the two. Energies are recovered from
// transfinite-diameter estimates through the Rumely relation
// log delta^Q = -b_d E(V*_{P,K,Q}).
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ppt/common.hpp"
#include "ppt/fekete.hpp"
#include "ppt/lp.hpp"
#include "ppt/mesh.hpp"
#include "ppt/vdm.hpp"

namespace ppt {

struct ExtremalEval {
  Point z;
  int n = 0;
  double value = kNegInf;            // max over admissible competitors
  double lagrange_value = kNegInf;   // single-node Lagrange construction
  double chebyshev_value = kNegInf;  // LP extremal-polynomial bound
  int attaining_index = -1;          // Lagrange node attaining the max
  bool used_chebyshev = false;       // LP bound computed and took the max
  // LP competitor, stored by its values: log|p| at every mesh point (exact, by
  // the renormalization below) and signed log values at the configuration
  // nodes, from which an audit re-expands p off the mesh by interpolation.
  std::vector<double> cheb_mesh_logp;
  std::vector<double> cheb_node_logp;
  std::vector<double> cheb_node_sign;
};

namespace detail {

struct ChebBound {
  double log_value = kNegInf;
  std::vector<double> mesh_logp;  // log|p(zeta_i)| per mesh point (-inf if excluded)
  std::vector<double> mesh_sign;  // sign of p(zeta_i)
};

// sup { log|p(z)| : p in Poly(nP), |p(zeta_i)| <= exp(n q_i) } as a linear
// program. The polynomial space is represented in a basis orthonormalized on
// the weighted mesh (thin QR of the weighted evaluation matrix), which keeps
// every tableau entry O(1); raw monomials on an interval make the simplex
// terminate far from the optimum. The optimum is renormalized by its attained
// mesh max, so admissibility on the generating mesh holds exactly whatever
// roundoff the solve accumulated.
class ExtremalPolyLp {
 public:
  ExtremalPolyLp(const MonomialBasis& basis, const WeightedMesh& mesh, int n)
      : basis_(&basis), mesh_(&mesh), n_(n) {
    const auto k = static_cast<Eigen::Index>(basis.d_n());
    q_ref_ = kPosInf;
    for (std::size_t i = 0; i < mesh.size(); ++i)
      if (mesh.q[i] != kPosInf) {
        active_.push_back(i);
        q_ref_ = std::min(q_ref_, mesh.q[i]);
      }
    if (static_cast<Eigen::Index>(active_.size()) < k) return;

    // Row i: monomials at zeta_i divided by W_i = exp(n (q_i - q_ref)). The
    // exponent is clamped; far-excluded points then act as slightly tighter
    // constraints, which only lowers the bound (still one-sided).
    Eigen::MatrixXd ew(static_cast<Eigen::Index>(active_.size()), k);
    wlog_.resize(active_.size());
    for (std::size_t r = 0; r < active_.size(); ++r) {
      wlog_[r] = std::min(static_cast<double>(n) * (mesh.q[active_[r]] - q_ref_), 575.0);
      double winv = std::exp(-wlog_[r]);
      for (Eigen::Index c = 0; c < k; ++c)
        ew(static_cast<Eigen::Index>(r), c) =
            eval_monomial_real(mesh.points[active_[r]], basis.exponents[static_cast<std::size_t>(c)]) *
            winv;
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(ew);
    r_mat_ = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    double rmax = r_mat_.diagonal().cwiseAbs().maxCoeff();
    if (!(rmax > 0.0) || r_mat_.diagonal().cwiseAbs().minCoeff() < 1e-13 * rmax)
      return;  // mesh does not determine Poly(nP)
    q_mat_ = qr.householderQ() * Eigen::MatrixXd::Identity(ew.rows(), k);
    ok_ = true;
  }

  bool usable() const { return ok_; }

  std::optional<ChebBound> bound_at(double z) const {
    if (!ok_) return std::nullopt;
    const auto k = static_cast<std::size_t>(basis_->d_n());
    const std::size_t m = active_.size();
    Point zp = real_point({z});
    Eigen::VectorXd phi(static_cast<Eigen::Index>(k));
    for (std::size_t c = 0; c < k; ++c)
      phi(static_cast<Eigen::Index>(c)) = eval_monomial_real(zp, basis_->exponents[c]);
    // p(z) = phi(z)^T a with coefficients a = R^{-1} ahat in the orthonormal
    // basis: objective vector y solves R^T y = phi(z).
    Eigen::VectorXd y = r_mat_.transpose().triangularView<Eigen::Lower>().solve(phi);
    if (!y.allFinite()) return std::nullopt;
    double obj_scale = y.cwiseAbs().maxCoeff();
    if (!(obj_scale > 0.0)) return std::nullopt;

    std::vector<std::vector<double>> a(2 * m, std::vector<double>(2 * k, 0.0));
    std::vector<double> b(2 * m, 1.0), cost(2 * k, 0.0);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < k; ++c) {
        double v = q_mat_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        a[r][c] = v;
        a[r][k + c] = -v;
        a[m + r][c] = -v;
        a[m + r][k + c] = v;
      }
    for (std::size_t c = 0; c < k; ++c) {
      cost[c] = y(static_cast<Eigen::Index>(c)) / obj_scale;
      cost[k + c] = -cost[c];
    }
    LpResult lp = solve_lp_ineq(a, b, cost);
    if (lp.status != LpStatus::kOptimal || lp.objective <= 0.0) return std::nullopt;

    Eigen::VectorXd ahat(static_cast<Eigen::Index>(k));
    for (std::size_t c = 0; c < k; ++c)
      ahat(static_cast<Eigen::Index>(c)) = lp.x[c] - lp.x[k + c];
    Eigen::VectorXd vals = q_mat_ * ahat;  // p(zeta_i) / W_i
    double m_rel = vals.cwiseAbs().maxCoeff();
    if (!(m_rel > 0.0)) return std::nullopt;

    ChebBound out;
    out.log_value = static_cast<double>(n_) * q_ref_ + std::log(lp.objective) +
                    std::log(obj_scale) - std::log(m_rel);
    out.mesh_logp.assign(mesh_->size(), kNegInf);
    out.mesh_sign.assign(mesh_->size(), 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      double v = vals(static_cast<Eigen::Index>(r));
      double av = std::fabs(v);
      out.mesh_logp[active_[r]] =
          av > 0 ? static_cast<double>(n_) * q_ref_ + wlog_[r] + std::log(av) - std::log(m_rel)
                 : kNegInf;
      out.mesh_sign[active_[r]] = v >= 0 ? 1.0 : -1.0;
    }
    return out;
  }

 private:
  const MonomialBasis* basis_;
  const WeightedMesh* mesh_;
  int n_ = 0;
  bool ok_ = false;
  double q_ref_ = 0.0;
  std::vector<std::size_t> active_;
  std::vector<double> wlog_;
  Eigen::MatrixXd q_mat_;
  Eigen::MatrixXd r_mat_;
};

}  // namespace detail

namespace detail {

// Uniform access to Lagrange values: orthonormal mesh route when the
// configuration is mesh-based and real (consistent with the exchange
// optimizer), monomial route otherwise.
struct LagrangeAccess {
  std::optional<OrthoMeshBasis> ortho;
  std::optional<MeshLagrange> mesh_lagrange;
  std::optional<LagrangeEvaluator> mono;

  LagrangeAccess(const Configuration& cfg, const WeightedMesh& mesh) {
    mono.emplace(cfg.basis, cfg.points);
    if (mesh.all_real() && !cfg.mesh_indices.empty()) {
      ortho.emplace(cfg.basis, mesh.points);
      if (ortho->usable())
        mesh_lagrange.emplace(*ortho, cfg.mesh_indices);
      else
        ortho.reset();
    }
  }

  Eigen::VectorXd log_at(const Point& z) const {
    if (mesh_lagrange && point_is_real(z)) return mesh_lagrange->log_at(z);
    return mono->log_lagrange_at(z);
  }

  Eigen::VectorXd raw_real_at(const Point& z) const {
    if (mesh_lagrange) return mesh_lagrange->raw_at(z);
    return mono->lagrange_raw_real(z);
  }
};

}  // namespace detail

inline std::vector<ExtremalEval> extremal_lower_batch(const std::vector<Point>& zs,
                                                      const Configuration& cfg,
                                                      const WeightedMesh& mesh) {
  detail::LagrangeAccess eval(cfg, mesh);
  const bool lp_usable = mesh.all_real() && mesh.dim == 1;
  std::optional<detail::ExtremalPolyLp> lp;
  if (lp_usable) lp.emplace(cfg.basis, mesh, cfg.n);

  std::vector<ExtremalEval> out;
  out.reserve(zs.size());
  for (const auto& z : zs) {
    if (z.size() != static_cast<std::size_t>(mesh.dim))
      throw std::invalid_argument("extremal_lower: dimension mismatch");
    ExtremalEval ev;
    ev.z = z;
    ev.n = cfg.n;
    Eigen::VectorXd logl = eval.log_at(z);
    for (long long j = 0; j < cfg.basis.d_n(); ++j) {
      double qj = cfg.q_values.empty() ? 0.0 : cfg.q_values[static_cast<std::size_t>(j)];
      if (qj == kPosInf) continue;
      double v = logl(j) / cfg.n + qj;
      if (v > ev.lagrange_value) {
        ev.lagrange_value = v;
        ev.attaining_index = static_cast<int>(j);
      }
    }
    ev.value = ev.lagrange_value;

    if (lp && lp->usable() && point_is_real(z)) {
      if (auto cheb = lp->bound_at(z[0].real())) {
        ev.chebyshev_value = cheb->log_value / cfg.n;
        ev.cheb_mesh_logp = std::move(cheb->mesh_logp);
        // values at the configuration nodes, for off-mesh re-expansion
        ev.cheb_node_logp.reserve(cfg.mesh_indices.size());
        ev.cheb_node_sign.reserve(cfg.mesh_indices.size());
        for (int mi : cfg.mesh_indices) {
          ev.cheb_node_logp.push_back(ev.cheb_mesh_logp[static_cast<std::size_t>(mi)]);
          ev.cheb_node_sign.push_back(cheb->mesh_sign[static_cast<std::size_t>(mi)]);
        }
        if (ev.chebyshev_value > ev.value) {
          ev.value = ev.chebyshev_value;
          ev.used_chebyshev = true;
        }
      }
    }
    out.push_back(std::move(ev));
  }
  return out;
}

inline ExtremalEval extremal_lower(const Point& z, const Configuration& cfg,
                                   const WeightedMesh& mesh) {
  return extremal_lower_batch({z}, cfg, mesh).front();
}

// Off-mesh evaluation of the LP competitor: any member of Poly(nP) is
// reproduced exactly by Lagrange interpolation through the d_n configuration
// nodes, so p(x) = sum_j p(x_j) ell_j(x).
inline double eval_cheb_competitor(const ExtremalEval& ev,
                                   const detail::LagrangeAccess& eval, const Point& x) {
  if (ev.cheb_node_logp.empty() || !point_is_real(x)) return kNegInf;
  double off = kNegInf;
  for (double lv : ev.cheb_node_logp) off = std::max(off, lv);
  if (off == kNegInf) return kNegInf;
  Eigen::VectorXd ell = eval.raw_real_at(x);
  double acc = 0.0;
  for (std::size_t j = 0; j < ev.cheb_node_logp.size(); ++j) {
    if (ev.cheb_node_logp[j] == kNegInf) continue;
    acc += ev.cheb_node_sign[j] * std::exp(ev.cheb_node_logp[j] - off) *
           ell(static_cast<Eigen::Index>(j));
  }
  if (acc == 0.0) return kNegInf;
  return (off + std::log(std::fabs(acc))) / ev.n;
}

struct AdmissibilityReport {
  double max_violation_mesh = kNegInf;     // max over generating mesh of u - Q
  double max_violation_refined = kNegInf;  // over the 4x audit mesh
  bool refined_available = false;
};

// Mesh-relative admissibility: the Lagrange competitors satisfy u <= Q on the
// generating mesh up to the exchange tolerance, the LP competitors exactly by
// renormalization; the refined audit quantifies how much all of them overshoot
// Q between mesh points.
inline AdmissibilityReport admissibility_audit(const Configuration& cfg,
                                               const WeightedMesh& mesh,
                                               const std::vector<ExtremalEval>& evs = {}) {
  AdmissibilityReport rep;
  detail::LagrangeAccess eval(cfg, mesh);
  // On the generating mesh the Lagrange values must come from the same solve
  // the exchange optimizer used, or conditioning noise shows up as phantom
  // violations; log_matrix() is that route.
  std::optional<Eigen::MatrixXd> mesh_logl;
  if (eval.mesh_lagrange) mesh_logl = eval.mesh_lagrange->log_matrix();
  auto scan = [&](const WeightedMesh& probe, bool generating, double& worst) {
    for (std::size_t i = 0; i < probe.size(); ++i) {
      if (probe.q[i] == kPosInf) continue;
      Eigen::VectorXd logl = generating && mesh_logl
                                 ? mesh_logl->col(static_cast<Eigen::Index>(i)).eval()
                                 : eval.log_at(probe.points[i]);
      double u = kNegInf;
      for (long long j = 0; j < cfg.basis.d_n(); ++j) {
        double qj = cfg.q_values.empty() ? 0.0 : cfg.q_values[static_cast<std::size_t>(j)];
        if (qj == kPosInf) continue;
        u = std::max(u, logl(j) / cfg.n + qj);
      }
      for (const auto& ev : evs) {
        if (ev.cheb_node_logp.empty()) continue;
        double v = generating && i < ev.cheb_mesh_logp.size()
                       ? ev.cheb_mesh_logp[i] / ev.n  // exact stored mesh values
                       : eval_cheb_competitor(ev, eval, probe.points[i]);
        u = std::max(u, v);
      }
      if (u != kNegInf) worst = std::max(worst, u - probe.q[i]);
    }
  };
  scan(mesh, true, rep.max_violation_mesh);
  if (auto refined = refine_interval_mesh(mesh, 4)) {
    scan(*refined, false, rep.max_violation_refined);
    rep.refined_available = true;
  }
  return rep;
}

// Rumely relation: E(V*_{P,K,Q}) = -log delta^Q(K) / b_d.
inline double energy_via_rumely(double log_delta_hat, const BodyConstants& consts) {
  return -log_delta_hat / consts.b_d;
}

inline double energy_via_rumely(const DeltaEstimate& de, const BodyConstants& consts) {
  return energy_via_rumely(std::log(de.delta_hat), consts);
}

struct GateauxRow {
  double t = 0.0;
  double f_value = 0.0;       // -log delta^{Q+tu} / b_d
  double fd_derivative = 0.0; // central difference (interior rows only)
  double mu_integral = 0.0;   // int u d(mu-hat) at weight Q + t u
  double discrepancy = 0.0;
  bool has_fd = false;
};

struct GateauxReport {
  std::vector<GateauxRow> rows;
  double max_discrepancy = 0.0;
};

// Numerical check of the derivative formula for F(t) = E(V*_{P,K,Q+tu}):
// central differences of the Rumely energy against the Fekete-measure integral
// of u (the Monge-Ampere measure surrogate on the mesh).
inline GateauxReport gateaux_check(const WeightedMesh& mesh, const ConvexBody& body,
                                   const std::vector<double>& u,
                                   const std::vector<double>& t_grid, int n,
                                   const BodyConstants& consts,
                                   const FeketeOptions& opts = {}) {
  if (u.size() != mesh.size())
    throw std::invalid_argument("gateaux_check: direction values must match mesh");
  if (t_grid.size() < 3)
    throw std::invalid_argument("gateaux_check: need at least 3 grid points");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (t_grid[i] <= t_grid[i - 1])
      throw std::invalid_argument("gateaux_check: t_grid must be increasing");
  for (double t : t_grid) {
    bool matched = false;
    for (double s : t_grid)
      if (std::fabs(s + t) < 1e-12) matched = true;
    if (!matched)
      throw std::invalid_argument("gateaux_check: t_grid must be symmetric around 0");
  }

  MonomialBasis basis = lattice_points(body, n);
  GateauxReport rep;
  std::vector<double> f(t_grid.size());
  std::vector<double> integ(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    WeightedMesh shifted = mesh;
    for (std::size_t p = 0; p < mesh.size(); ++p) shifted.q[p] += t_grid[i] * u[p];
    Configuration cfg = fekete_points(shifted, basis, n, opts);
    double log_delta = cfg.log_wvdm / static_cast<double>(basis.l_n);
    f[i] = -log_delta / consts.b_d;
    GridMeasure mu = fekete_measure(cfg, consts.gamma_d);
    integ[i] = integrate_mesh_function(mu, u);
  }
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    GateauxRow row;
    row.t = t_grid[i];
    row.f_value = f[i];
    row.mu_integral = integ[i];
    if (i > 0 && i + 1 < t_grid.size()) {
      row.fd_derivative = (f[i + 1] - f[i - 1]) / (t_grid[i + 1] - t_grid[i - 1]);
      row.has_fd = true;
      row.discrepancy = std::fabs(row.fd_derivative - row.mu_integral);
      rep.max_discrepancy = std::max(rep.max_discrepancy, row.discrepancy);
    }
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace ppt
