// Numerically stable log-magnitude evaluation of (weighted) Vandermonde
// determinants and Lagrange determinant ratios. All determinant work happens
// in log scale through LU with partial pivoting; raw determinant values are
// never materialized (they under/overflow for n beyond ~20). Columns are
// equilibrated by their max monomial magnitude with the correction added back
// exactly in log space.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ppt/common.hpp"
#include "ppt/polytope.hpp"

namespace ppt {

inline Complex eval_monomial(const Point& z, const std::vector<int>& alpha) {
  Complex r(1.0, 0.0);
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    Complex p(1.0, 0.0);
    Complex base = z[i];
    int e = alpha[i];
    while (e > 0) {  // square-and-multiply keeps rounding mild for large e
      if (e & 1) p *= base;
      base *= base;
      e >>= 1;
    }
    r *= p;
  }
  return r;
}

inline double eval_monomial_real(const Point& z, const std::vector<int>& alpha) {
  double r = 1.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    double p = 1.0, base = z[i].real();
    int e = alpha[i];
    while (e > 0) {
      if (e & 1) p *= base;
      base *= base;
      e >>= 1;
    }
    r *= p;
  }
  return r;
}

namespace detail {

// Pivot magnitudes below this are treated as structural zeros.
inline constexpr double kRankTol = 1e-300;

template <typename Scalar>
double log_abs_det_equilibrated(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m) {
  const Eigen::Index k = m.cols();
  double corr = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) {
    double s = m.col(j).cwiseAbs().maxCoeff();
    if (s < kRankTol) return kNegInf;  // a whole zero column
    m.col(j) /= s;
    corr += std::log(s);
  }
  Eigen::PartialPivLU<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> lu(m);
  double acc = 0.0;
  auto diag = lu.matrixLU().diagonal();
  for (Eigen::Index i = 0; i < k; ++i) {
    double a = std::abs(diag(i));
    if (a < kRankTol) return kNegInf;
    acc += std::log(a);
  }
  return acc + corr;
}

}  // namespace detail

// Basis evaluation matrix: row p = point, column i = monomial e_i.
inline Eigen::MatrixXcd basis_matrix(const MonomialBasis& basis,
                                     const std::vector<Point>& pts) {
  Eigen::MatrixXcd e(static_cast<Eigen::Index>(pts.size()), basis.d_n());
  for (std::size_t p = 0; p < pts.size(); ++p)
    for (long long i = 0; i < basis.d_n(); ++i)
      e(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i)) =
          eval_monomial(pts[p], basis.exponents[i]);
  return e;
}

inline Eigen::MatrixXd basis_matrix_real(const MonomialBasis& basis,
                                         const std::vector<Point>& pts) {
  Eigen::MatrixXd e(static_cast<Eigen::Index>(pts.size()), basis.d_n());
  for (std::size_t p = 0; p < pts.size(); ++p)
    for (long long i = 0; i < basis.d_n(); ++i)
      e(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i)) =
          eval_monomial_real(pts[p], basis.exponents[i]);
  return e;
}

// log |det [e_i(z_j)]|; -inf on exact rank deficiency.
inline double log_abs_vdm(const MonomialBasis& basis, const std::vector<Point>& pts) {
  if (static_cast<long long>(pts.size()) != basis.d_n())
    throw std::invalid_argument("log_abs_vdm: need exactly d_n points");
  bool all_real = true;
  for (const auto& p : pts)
    if (!point_is_real(p)) {
      all_real = false;
      break;
    }
  if (all_real) {
    Eigen::MatrixXd m(basis.d_n(), basis.d_n());
    for (long long j = 0; j < basis.d_n(); ++j)
      for (long long i = 0; i < basis.d_n(); ++i)
        m(i, j) = eval_monomial_real(pts[j], basis.exponents[i]);
    return detail::log_abs_det_equilibrated<double>(std::move(m));
  }
  Eigen::MatrixXcd m(basis.d_n(), basis.d_n());
  for (long long j = 0; j < basis.d_n(); ++j)
    for (long long i = 0; i < basis.d_n(); ++i)
      m(i, j) = eval_monomial(pts[j], basis.exponents[i]);
  return detail::log_abs_det_equilibrated<Complex>(std::move(m));
}

// log |VDM^Q| = log |VDM| - n * sum_j Q(z_j).  Q = +inf excludes the point.
inline double log_abs_wvdm(const MonomialBasis& basis, const std::vector<Point>& pts,
                           const std::vector<double>& q, int n) {
  if (q.size() != pts.size())
    throw std::invalid_argument("log_abs_wvdm: Q values must match points");
  double qsum = 0.0;
  for (double v : q) {
    if (v == kPosInf) return kNegInf;
    qsum += v;
  }
  double base = log_abs_vdm(basis, pts);
  if (base == kNegInf) return kNegInf;
  return base - static_cast<double>(n) * qsum;
}

// A point configuration with cached log magnitudes. q_values / mesh_indices are
// populated when the configuration came from a weighted mesh.
struct Configuration {
  MonomialBasis basis;
  std::vector<Point> points;
  std::vector<int> mesh_indices;   // empty when not mesh-based
  std::vector<double> q_values;    // empty means Q == 0
  int n = 0;
  double log_vdm = kNegInf;   // unweighted
  double log_wvdm = kNegInf;  // weighted
  bool exchange_converged = true;
  int exchange_passes = 0;

  void recompute_logs() {
    log_vdm = log_abs_vdm(basis, points);
    if (q_values.empty()) {
      log_wvdm = log_vdm;
    } else {
      double qsum = 0.0;
      for (double v : q_values) qsum += v;
      log_wvdm = (log_vdm == kNegInf) ? kNegInf : log_vdm - n * qsum;
    }
  }
};

// Determinant-ratio Lagrange magnitude: log |VDM(points with slot j -> z)| minus
// log |VDM(points)|, by full refactorization. Coinciding nodes give -inf.
inline double lagrange_log(const Configuration& cfg, std::size_t j, const Point& z) {
  if (j >= cfg.points.size()) throw std::invalid_argument("lagrange_log: bad index");
  if (cfg.log_vdm == kNegInf)
    throw std::invalid_argument("lagrange_log: configuration is rank deficient");
  std::vector<Point> pts = cfg.points;
  pts[j] = z;
  double num = log_abs_vdm(cfg.basis, pts);
  if (num == kNegInf) return kNegInf;
  return num - cfg.log_vdm;
}

// Factors the configuration matrix once and evaluates all Lagrange ratios by
// Cramer's rule: ell(z) = V^{-1} e(z), where column j of V is the basis at
// point j. Used by the exchange optimizer and the extremal lower bounds; this
// route and lagrange_log() cross-check each other in the tests.
class LagrangeEvaluator {
 public:
  LagrangeEvaluator(const MonomialBasis& basis, const std::vector<Point>& pts)
      : basis_(&basis) {
    real_ = true;
    for (const auto& p : pts)
      if (!point_is_real(p)) {
        real_ = false;
        break;
      }
    const auto k = static_cast<Eigen::Index>(pts.size());
    if (real_) {
      Eigen::MatrixXd v(k, k);
      for (Eigen::Index j = 0; j < k; ++j)
        for (Eigen::Index i = 0; i < k; ++i)
          v(i, j) = eval_monomial_real(pts[j], basis.exponents[i]);
      lu_r_.compute(v);
    } else {
      Eigen::MatrixXcd v(k, k);
      for (Eigen::Index j = 0; j < k; ++j)
        for (Eigen::Index i = 0; i < k; ++i)
          v(i, j) = eval_monomial(pts[j], basis.exponents[i]);
      lu_c_.compute(v);
    }
  }

  // log |ell_j(z)| for all j.
  Eigen::VectorXd log_lagrange_at(const Point& z) const {
    const long long k = basis_->d_n();
    Eigen::VectorXd out(k);
    if (real_ && point_is_real(z)) {
      Eigen::VectorXd e(k);
      for (long long i = 0; i < k; ++i)
        e(i) = eval_monomial_real(z, basis_->exponents[i]);
      Eigen::VectorXd l = lu_r_.solve(e);
      for (long long i = 0; i < k; ++i)
        out(i) = l(i) != 0.0 ? std::log(std::fabs(l(i))) : kNegInf;
      return out;
    }
    Eigen::VectorXcd e(k);
    for (long long i = 0; i < k; ++i) e(i) = eval_monomial(z, basis_->exponents[i]);
    if (real_) {  // complex z against a real configuration: split the solve
      Eigen::VectorXd re = lu_r_.solve(e.real().eval());
      Eigen::VectorXd im = lu_r_.solve(e.imag().eval());
      for (long long i = 0; i < k; ++i) {
        double a = std::hypot(re(i), im(i));
        out(i) = a > 0 ? std::log(a) : kNegInf;
      }
      return out;
    }
    Eigen::VectorXcd l = lu_c_.solve(e);
    for (long long i = 0; i < k; ++i) {
      double a = std::abs(l(i));
      out(i) = a > 0 ? std::log(a) : kNegInf;
    }
    return out;
  }

  // Signed Lagrange values at a real point (real configurations only); used to
  // re-expand polynomials known by their values at the configuration nodes.
  Eigen::VectorXd lagrange_raw_real(const Point& z) const {
    if (!real_ || !point_is_real(z))
      throw std::logic_error("lagrange_raw_real: real path only");
    Eigen::VectorXd e(basis_->d_n());
    for (long long i = 0; i < basis_->d_n(); ++i)
      e(i) = eval_monomial_real(z, basis_->exponents[i]);
    return lu_r_.solve(e);
  }

  // log |ell_j(mesh_p)| for all (j, p): column p is the Lagrange vector at
  // mesh point p. E is the mesh basis matrix (rows = mesh points).
  Eigen::MatrixXd log_lagrange_matrix(const Eigen::MatrixXd& e_mesh) const {
    if (!real_) throw std::logic_error("log_lagrange_matrix: real path only");
    Eigen::MatrixXd l = lu_r_.solve(e_mesh.transpose());
    return l.cwiseAbs().unaryExpr([](double a) { return a > 0 ? std::log(a) : kNegInf; });
  }

  Eigen::MatrixXd log_lagrange_matrix(const Eigen::MatrixXcd& e_mesh) const {
    Eigen::MatrixXcd l;
    if (real_) {
      Eigen::MatrixXd re = lu_r_.solve(e_mesh.transpose().real().eval());
      Eigen::MatrixXd im = lu_r_.solve(e_mesh.transpose().imag().eval());
      l = re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>();
    } else {
      l = lu_c_.solve(e_mesh.transpose());
    }
    return l.cwiseAbs().unaryExpr([](double a) { return a > 0 ? std::log(a) : kNegInf; });
  }

  bool real() const { return real_; }

 private:
  const MonomialBasis* basis_;
  bool real_ = true;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_r_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_c_;
};

// Basis for Poly(nP) orthonormalized on a real mesh (thin QR of the monomial
// evaluation matrix). Lagrange ratios are intrinsic to the spanned space, so
// computing them in this basis is exact in theory and, unlike raw monomials on
// an interval (condition growth ~2.4^n), keeps the linear algebra
// well-conditioned at n ~ 40.
class OrthoMeshBasis {
 public:
  OrthoMeshBasis(const MonomialBasis& basis, const std::vector<Point>& mesh_points)
      : mono_(&basis) {
    Eigen::MatrixXd e = basis_matrix_real(basis, mesh_points);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(e);
    const auto k = static_cast<Eigen::Index>(basis.d_n());
    r_ = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    double rmax = r_.diagonal().cwiseAbs().maxCoeff();
    usable_ = rmax > 0.0 && r_.diagonal().cwiseAbs().minCoeff() > 1e-13 * rmax;
    if (usable_) q_ = qr.householderQ() * Eigen::MatrixXd::Identity(e.rows(), k);
  }

  bool usable() const { return usable_; }
  const MonomialBasis& monomials() const { return *mono_; }
  // values of the orthonormalized basis functions at the mesh points
  const Eigen::MatrixXd& mesh_values() const { return q_; }

  // values of the orthonormalized basis at an arbitrary real point
  Eigen::VectorXd eval_real(const Point& z) const {
    Eigen::VectorXd phi(mono_->d_n());
    for (long long i = 0; i < mono_->d_n(); ++i)
      phi(i) = eval_monomial_real(z, mono_->exponents[static_cast<std::size_t>(i)]);
    return r_.transpose().triangularView<Eigen::Lower>().solve(phi);
  }

 private:
  const MonomialBasis* mono_;
  Eigen::MatrixXd q_;
  Eigen::MatrixXd r_;
  bool usable_ = false;
};

// Lagrange machinery for a configuration given by mesh indices, running in the
// orthonormalized basis.
class MeshLagrange {
 public:
  MeshLagrange(const OrthoMeshBasis& basis, const std::vector<int>& config_indices)
      : basis_(&basis) {
    const auto k = static_cast<Eigen::Index>(config_indices.size());
    Eigen::MatrixXd v(k, k);
    for (Eigen::Index j = 0; j < k; ++j)
      v.col(j) = basis.mesh_values().row(config_indices[static_cast<std::size_t>(j)]);
    lu_.compute(v);
  }

  // log |ell_j(zeta_p)| over the whole mesh (d_n x m).
  Eigen::MatrixXd log_matrix() const {
    Eigen::MatrixXd l = lu_.solve(basis_->mesh_values().transpose());
    return l.cwiseAbs().unaryExpr([](double a) { return a > 0 ? std::log(a) : kNegInf; });
  }

  Eigen::VectorXd raw_at(const Point& z) const { return lu_.solve(basis_->eval_real(z)); }

  Eigen::VectorXd log_at(const Point& z) const {
    Eigen::VectorXd l = raw_at(z);
    return l.unaryExpr(
        [](double a) { return a != 0.0 ? std::log(std::fabs(a)) : kNegInf; });
  }

 private:
  const OrthoMeshBasis* basis_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

}  // namespace ppt
