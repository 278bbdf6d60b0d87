// Convex body P in the nonnegative orthant: support values, the logarithmic
// indicator H_P, lattice point enumeration for Poly(nP), and the derived
// constants gamma_d, A and b_d. Membership tests run a feasibility LP over the
// vertex hull; no facet representation is ever built.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ppt/common.hpp"
#include "ppt/lp.hpp"

namespace ppt {

namespace detail {

// Feasibility LP: is x a convex combination of the given vertices?
inline bool in_hull(const std::vector<std::vector<double>>& verts,
                    std::span<const double> x, double tol = 1e-7) {
  const std::size_t d = x.size();
  const std::size_t m = verts.size();
  std::vector<std::vector<double>> a(d + 1, std::vector<double>(m, 0.0));
  std::vector<double> b(d + 1, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < d; ++i) a[i][j] = verts[j][i];
    a[d][j] = 1.0;
  }
  for (std::size_t i = 0; i < d; ++i) b[i] = x[i];
  b[d] = 1.0;
  // Phase-1 feasibility is all we need; a zero objective makes phase 2 a no-op.
  LpResult r = solve_lp(std::move(a), std::move(b), std::vector<double>(m, 0.0));
  (void)tol;
  return r.status == LpStatus::kOptimal;
}

// max t such that t*dir lies in the hull (dir entering the body from 0).
inline double max_ray_scale(const std::vector<std::vector<double>>& verts,
                            const std::vector<double>& dir) {
  const std::size_t d = dir.size();
  const std::size_t m = verts.size();
  // Variables: lambda_1..lambda_m, t.  Constraints: sum lambda v = t*dir,
  // sum lambda = 1.  Maximize t.
  std::vector<std::vector<double>> a(d + 1, std::vector<double>(m + 1, 0.0));
  std::vector<double> b(d + 1, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < d; ++i) a[i][j] = verts[j][i];
    a[d][j] = 1.0;
  }
  for (std::size_t i = 0; i < d; ++i) a[i][m] = -dir[i];
  b[d] = 1.0;
  std::vector<double> c(m + 1, 0.0);
  c[m] = 1.0;
  LpResult r = solve_lp(std::move(a), std::move(b), std::move(c));
  if (r.status != LpStatus::kOptimal) return 0.0;
  return r.objective;
}

}  // namespace detail

struct ConvexBody {
  int dim = 0;
  std::vector<std::vector<double>> vertices;
  int k_sigma = 0;    // smallest positive integer k with Sigma subset of kP
  double r_sigma = 0; // smallest r with P subset of r*Sigma

  bool contains(std::span<const double> x) const {
    return detail::in_hull(vertices, x);
  }

  std::uint64_t content_hash() const {
    Fnv1a h;
    h.i64(dim);
    for (const auto& v : vertices)
      for (double c : v) h.f64(c);
    return h.value();
  }

  static ConvexBody from_vertices(int dim, std::vector<std::vector<double>> verts) {
    if (dim < 1) throw std::invalid_argument("ConvexBody: dim must be >= 1");
    if (verts.empty()) throw std::invalid_argument("ConvexBody: no vertices");
    for (const auto& v : verts) {
      if (static_cast<int>(v.size()) != dim)
        throw std::invalid_argument("ConvexBody: vertex dimension mismatch");
      for (double c : v)
        if (!(c >= 0.0))
          throw std::invalid_argument("ConvexBody: vertex coordinates must be >= 0");
    }
    ConvexBody body;
    body.dim = dim;
    body.vertices = std::move(verts);

    // r_sigma: max coordinate sum over vertices.
    double r = 0.0;
    for (const auto& v : body.vertices)
      r = std::max(r, std::accumulate(v.begin(), v.end(), 0.0));
    body.r_sigma = r;

    // Sigma subset of kP requires 0 in P and e_i/k in P for each i.
    std::vector<double> zero(dim, 0.0);
    if (!body.contains(zero))
      throw std::invalid_argument("ConvexBody: 0 must lie in P (Sigma in kP fails)");
    int k = 1;
    for (int i = 0; i < dim; ++i) {
      std::vector<double> dir(dim, 0.0);
      dir[i] = 1.0;
      double t = detail::max_ray_scale(body.vertices, dir);
      if (t <= 1e-12)
        throw std::invalid_argument(
            "ConvexBody: P touches the axis e_" + std::to_string(i + 1) +
            " only at 0; no k with Sigma in kP");
      k = std::max(k, static_cast<int>(std::ceil(1.0 / t - 1e-9)));
    }
    body.k_sigma = k;
    // Invariant check: each e_i/k_sigma must test inside.
    for (int i = 0; i < dim; ++i) {
      std::vector<double> p(dim, 0.0);
      p[i] = 1.0 / k;
      if (!body.contains(p))
        throw std::invalid_argument("ConvexBody: k_sigma certification failed");
    }
    return body;
  }

  static ConvexBody simplex(int d) {
    std::vector<std::vector<double>> v(1, std::vector<double>(d, 0.0));
    for (int i = 0; i < d; ++i) {
      std::vector<double> e(d, 0.0);
      e[i] = 1.0;
      v.push_back(e);
    }
    return from_vertices(d, std::move(v));
  }

  static ConvexBody unit_cube(int d) {
    std::vector<std::vector<double>> v;
    for (int mask = 0; mask < (1 << d); ++mask) {
      std::vector<double> p(d, 0.0);
      for (int i = 0; i < d; ++i) p[i] = (mask >> i) & 1 ? 1.0 : 0.0;
      v.push_back(p);
    }
    return from_vertices(d, std::move(v));
  }
};

// sup over P of <J,y>; attained at a vertex by convexity.
inline double support_value(const ConvexBody& body, std::span<const double> y) {
  if (y.size() != static_cast<std::size_t>(body.dim))
    throw std::invalid_argument("support_value: dimension mismatch");
  double best = kNegInf;
  for (const auto& v : body.vertices) {
    double s = 0.0;
    for (int i = 0; i < body.dim; ++i) s += v[i] * y[i];
    best = std::max(best, s);
  }
  return best;
}

// H_P(z) = sup_{J in P} sum_i J_i log|z_i| with the 0*(-inf)=0 convention:
// zero coordinates of z restrict the sup to the face {J_i = 0}. Coordinate
// hyperplanes support P (coordinates are nonnegative), so that face's
// vertices are exactly the vertices of P lying on it.
inline double h_p(const ConvexBody& body, const Point& z) {
  if (z.size() != static_cast<std::size_t>(body.dim))
    throw std::invalid_argument("h_p: dimension mismatch");
  std::vector<int> zero_coord(body.dim, 0);
  std::vector<double> logs(body.dim, 0.0);
  for (int i = 0; i < body.dim; ++i) {
    double a = std::abs(z[i]);
    if (a == 0.0)
      zero_coord[i] = 1;
    else
      logs[i] = std::log(a);
  }
  double best = kNegInf;
  for (const auto& v : body.vertices) {
    bool on_face = true;
    for (int i = 0; i < body.dim; ++i)
      if (zero_coord[i] && v[i] > 1e-12) {
        on_face = false;
        break;
      }
    if (!on_face) continue;
    double s = 0.0;
    for (int i = 0; i < body.dim; ++i)
      if (!zero_coord[i]) s += v[i] * logs[i];
    best = std::max(best, s);
  }
  return best;  // -inf only if the face is empty (impossible when 0 in P)
}

struct MonomialBasis {
  int n = 0;
  int dim = 0;
  std::vector<std::vector<int>> exponents;  // graded-lex sorted, no duplicates
  long long l_n = 0;

  long long d_n() const { return static_cast<long long>(exponents.size()); }

  std::uint64_t content_hash() const {
    Fnv1a h;
    h.i64(n);
    h.i64(dim);
    for (const auto& e : exponents)
      for (int v : e) h.i64(v);
    return h.value();
  }
};

inline constexpr long long kDefaultLatticeCap = 2'000'000;

// Exactly the lattice points of nP, membership by LP, graded-lex sorted.
inline MonomialBasis lattice_points(const ConvexBody& body, int n,
                                    long long cap = kDefaultLatticeCap) {
  if (n < 1) throw std::invalid_argument("lattice_points: n must be >= 1");
  const int d = body.dim;
  std::vector<long long> hi(d, 0);
  for (int i = 0; i < d; ++i) {
    double mx = 0.0;
    for (const auto& v : body.vertices) mx = std::max(mx, v[i]);
    hi[i] = static_cast<long long>(std::floor(n * mx + 1e-9));
  }
  MonomialBasis basis;
  basis.n = n;
  basis.dim = d;
  std::vector<int> alpha(d, 0);
  std::vector<double> q(d, 0.0);
  long long count = 0;
  // Odometer over the bounding box of nP.
  while (true) {
    for (int i = 0; i < d; ++i) q[i] = static_cast<double>(alpha[i]) / n;
    if (body.contains(q)) {
      if (++count > cap)
        throw std::runtime_error("lattice_points: cap exceeded (d_n too large)");
      basis.exponents.push_back(alpha);
    }
    int i = 0;
    while (i < d && ++alpha[i] > hi[i]) alpha[i++] = 0;
    if (i == d) break;
  }
  auto graded_lex = [](const std::vector<int>& a, const std::vector<int>& b) {
    long long sa = std::accumulate(a.begin(), a.end(), 0ll);
    long long sb = std::accumulate(b.begin(), b.end(), 0ll);
    if (sa != sb) return sa < sb;
    return a < b;
  };
  std::sort(basis.exponents.begin(), basis.exponents.end(), graded_lex);
  basis.l_n = 0;
  for (const auto& e : basis.exponents)
    basis.l_n += std::accumulate(e.begin(), e.end(), 0ll);
  return basis;
}

namespace detail {

inline std::array<double, 3> cross3(const std::array<double, 3>& u,
                                    const std::array<double, 3>& v) {
  return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
          u[0] * v[1] - u[1] * v[0]};
}

inline double dot3(const std::array<double, 3>& u, const std::array<double, 3>& v) {
  return u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
}

inline double volume2(const std::vector<std::vector<double>>& verts) {
  // Monotone chain hull then shoelace.
  auto pts = verts;
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return 0.0;
  auto cross = [](const std::vector<double>& o, const std::vector<double>& a,
                  const std::vector<double>& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<std::vector<double>> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0)
      hull.pop_back();
    hull.push_back(p);
  }
  std::size_t lower = hull.size() + 1;
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
    while (hull.size() >= lower && cross(hull[hull.size() - 2], hull.back(), *it) <= 0)
      hull.pop_back();
    hull.push_back(*it);
  }
  hull.pop_back();
  double area = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    area += a[0] * b[1] - b[0] * a[1];
  }
  return std::fabs(area) / 2.0;
}

inline double volume3(const std::vector<std::vector<double>>& verts) {
  // Brute-force facet planes (every triple, one-sidedness check), then fan
  // triangulation of each facet with outward orientation, apex at verts[0].
  const std::size_t m = verts.size();
  double scale = 1e-12;
  for (const auto& v : verts)
    for (double c : v) scale = std::max(scale, std::fabs(c));
  const double tol = 1e-9 * scale;
  auto at = [&](std::size_t i) {
    return std::array<double, 3>{verts[i][0], verts[i][1], verts[i][2]};
  };
  struct Plane {
    std::array<double, 3> n;
    double off;
  };
  std::vector<Plane> planes;
  auto plane_seen = [&](const Plane& p) {
    for (const auto& q : planes)
      if (std::fabs(p.n[0] - q.n[0]) < 1e-9 && std::fabs(p.n[1] - q.n[1]) < 1e-9 &&
          std::fabs(p.n[2] - q.n[2]) < 1e-9 && std::fabs(p.off - q.off) < 1e-9 * scale)
        return true;
    return false;
  };
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      for (std::size_t k = j + 1; k < m; ++k) {
        auto a = at(i), b = at(j), c = at(k);
        std::array<double, 3> u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
        std::array<double, 3> v{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
        auto nrm = cross3(u, v);
        double len = std::sqrt(dot3(nrm, nrm));
        if (len < tol * scale) continue;
        for (auto& x : nrm) x /= len;
        double off = dot3(nrm, a);
        bool pos = false, neg = false;
        for (std::size_t t = 0; t < m; ++t) {
          double s = dot3(nrm, at(t)) - off;
          if (s > tol) pos = true;
          if (s < -tol) neg = true;
        }
        if (pos && neg) continue;
        if (pos) {  // flip so the normal points outward
          for (auto& x : nrm) x = -x;
          off = -off;
        }
        Plane p{nrm, off};
        if (!plane_seen(p)) planes.push_back(p);
      }
  double vol = 0.0;
  auto apex = at(0);
  for (const auto& pl : planes) {
    std::vector<std::size_t> on;
    for (std::size_t t = 0; t < m; ++t)
      if (std::fabs(dot3(pl.n, at(t)) - pl.off) <= tol) on.push_back(t);
    if (on.size() < 3) continue;
    // Order facet vertices by angle about the centroid in an in-plane basis.
    std::array<double, 3> cen{0, 0, 0};
    for (auto t : on)
      for (int i = 0; i < 3; ++i) cen[i] += verts[t][i] / on.size();
    std::array<double, 3> ref{at(on[0])[0] - cen[0], at(on[0])[1] - cen[1],
                              at(on[0])[2] - cen[2]};
    auto e2 = cross3(pl.n, ref);
    std::sort(on.begin(), on.end(), [&](std::size_t x, std::size_t y) {
      auto px = at(x), py = at(y);
      std::array<double, 3> dx{px[0] - cen[0], px[1] - cen[1], px[2] - cen[2]};
      std::array<double, 3> dy{py[0] - cen[0], py[1] - cen[1], py[2] - cen[2]};
      return std::atan2(dot3(dx, e2), dot3(dx, ref)) <
             std::atan2(dot3(dy, e2), dot3(dy, ref));
    });
    for (std::size_t s = 1; s + 1 < on.size(); ++s) {
      auto p = at(on[0]), q = at(on[s]), r = at(on[s + 1]);
      std::array<double, 3> u{p[0] - apex[0], p[1] - apex[1], p[2] - apex[2]};
      std::array<double, 3> v{q[0] - apex[0], q[1] - apex[1], q[2] - apex[2]};
      std::array<double, 3> w{r[0] - apex[0], r[1] - apex[1], r[2] - apex[2]};
      double sv = dot3(u, cross3(v, w)) / 6.0;
      // Triangles inherit the facet ordering; orient by the outward normal.
      auto tri_n = cross3({q[0] - p[0], q[1] - p[1], q[2] - p[2]},
                          {r[0] - p[0], r[1] - p[1], r[2] - p[2]});
      if (dot3(tri_n, pl.n) < 0) sv = -sv;
      vol += sv;
    }
  }
  return std::fabs(vol);
}

}  // namespace detail

// Exact volume by fan triangulation, d <= 3 only.
inline double polytope_volume(const ConvexBody& body) {
  switch (body.dim) {
    case 1: {
      double lo = kPosInf, hi = kNegInf;
      for (const auto& v : body.vertices) {
        lo = std::min(lo, v[0]);
        hi = std::max(hi, v[0]);
      }
      return hi - lo;
    }
    case 2:
      return detail::volume2(body.vertices);
    case 3:
      return detail::volume3(body.vertices);
    default:
      throw std::invalid_argument("polytope_volume: only d <= 3 is supported");
  }
}

struct BodyConstants {
  double gamma_d = 0.0;      // d! Vol(P)
  double a_raw = 0.0;        // f_{n_max}
  double a_extrapolated = 0; // one-step Richardson in 1/n
  double A = 0.0;            // value used downstream (= a_extrapolated)
  double b_d = 0.0;          // (d+1) / (A d gamma_d)
  std::vector<std::pair<int, double>> f_n_sequence;
  bool f_converged = true;   // |f_{n_max} - f_{n_max-1}| within tolerance
};

// f_n is defined through l_n = f_n * (n d / (d+1)) * d_n; both sides are exact
// integers up to the division below.
inline double f_n_value(int d, int n, long long d_n, long long l_n) {
  return static_cast<double>(l_n * (d + 1)) / static_cast<double>(n * static_cast<long long>(d) * d_n);
}

inline BodyConstants compute_constants(const ConvexBody& body, int n_max,
                                       double converge_tol = 1e-3) {
  if (n_max < 2) throw std::invalid_argument("compute_constants: n_max must be >= 2");
  BodyConstants bc;
  double vol = polytope_volume(body);
  double fact = 1.0;
  for (int i = 2; i <= body.dim; ++i) fact *= i;
  bc.gamma_d = fact * vol;
  if (!(bc.gamma_d > 0.0))
    throw std::invalid_argument("compute_constants: gamma_d must be positive (degenerate body?)");

  for (int n = 1; n <= n_max; ++n) {
    MonomialBasis basis = lattice_points(body, n);
    bc.f_n_sequence.emplace_back(n, f_n_value(body.dim, n, basis.d_n(), basis.l_n));
  }
  double f_last = bc.f_n_sequence[n_max - 1].second;
  double f_prev = bc.f_n_sequence[n_max - 2].second;
  bc.a_raw = f_last;
  // Richardson step assuming f_n = A + c/n + o(1/n).
  bc.a_extrapolated = n_max * f_last - (n_max - 1) * f_prev;
  bc.A = bc.a_extrapolated;
  bc.f_converged = std::fabs(f_last - f_prev) <= converge_tol;
  bc.b_d = (body.dim + 1) / (bc.A * body.dim * bc.gamma_d);
  return bc;
}

}  // namespace ppt
