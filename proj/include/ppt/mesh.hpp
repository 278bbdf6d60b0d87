// Finite discretizations of the compact set K: mesh points with a weight Q and
// reference-measure masses nu, plus discrete measures of total mass gamma_d.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppt/common.hpp"

namespace ppt {

struct WeightedMesh {
  int dim = 1;
  std::vector<Point> points;
  std::vector<double> q;   // Q = -log w; +inf excludes the point from supports
  std::vector<double> nu;  // reference measure masses (defaults normalize to 1)
  std::string label;

  std::size_t size() const { return points.size(); }

  bool all_real() const {
    for (const auto& p : points)
      if (!point_is_real(p)) return false;
    return true;
  }

  void validate() const {
    if (points.empty()) throw std::invalid_argument("WeightedMesh: empty mesh");
    if (q.size() != points.size() || nu.size() != points.size())
      throw std::invalid_argument("WeightedMesh: ragged columns");
    double total = 0.0;
    bool finite_q = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].size() != static_cast<std::size_t>(dim))
        throw std::invalid_argument("WeightedMesh: point dimension mismatch");
      if (!(nu[i] > 0.0)) throw std::invalid_argument("WeightedMesh: nu must be > 0");
      total += nu[i];
      if (q[i] < kPosInf) finite_q = true;
    }
    if (!(total > 0.0)) throw std::invalid_argument("WeightedMesh: nu total must be > 0");
    if (!finite_q)
      throw std::invalid_argument("WeightedMesh: all weights are +inf (w == 0 on K)");
  }

  std::uint64_t content_hash() const {
    Fnv1a h;
    h.i64(dim);
    h.str(label);
    for (const auto& p : points)
      for (const auto& c : p) {
        h.f64(c.real());
        h.f64(c.imag());
      }
    for (double v : q) h.f64(v);
    for (double v : nu) h.f64(v);
    return h.value();
  }

  std::uint64_t q_hash() const {
    Fnv1a h;
    for (double v : q) h.f64(v);
    return h.value();
  }
};

// Chebyshev-distributed nodes on [a,b] with Q = 0 and nu = normalized cell
// lengths (arc-length masses). Denser near the endpoints, where Fekete points
// cluster; uniform meshes underestimate W_n badly near the ends.
inline WeightedMesh chebyshev_interval_mesh(double a, double b, std::size_t m,
                                            std::string label = "") {
  if (m < 2) throw std::invalid_argument("chebyshev_interval_mesh: need m >= 2");
  if (!(a < b)) throw std::invalid_argument("chebyshev_interval_mesh: need a < b");
  WeightedMesh mesh;
  mesh.dim = 1;
  mesh.label = label.empty() ? "cheb[" + std::to_string(a) + "," + std::to_string(b) +
                                   "]x" + std::to_string(m)
                             : std::move(label);
  std::vector<double> xs(m);
  for (std::size_t k = 0; k < m; ++k) {
    double t = std::cos(M_PI * static_cast<double>(k) / static_cast<double>(m - 1));
    xs[m - 1 - k] = 0.5 * (a + b) + 0.5 * (b - a) * t;
  }
  mesh.points.reserve(m);
  mesh.q.assign(m, 0.0);
  mesh.nu.resize(m);
  for (std::size_t k = 0; k < m; ++k) mesh.points.push_back(real_point({xs[k]}));
  for (std::size_t k = 0; k < m; ++k) {
    double lo = k == 0 ? a : 0.5 * (xs[k - 1] + xs[k]);
    double hi = k + 1 == m ? b : 0.5 * (xs[k] + xs[k + 1]);
    mesh.nu[k] = (hi - lo) / (b - a);
  }
  return mesh;
}

inline WeightedMesh uniform_interval_mesh(double a, double b, std::size_t m,
                                          std::string label = "") {
  if (m < 2) throw std::invalid_argument("uniform_interval_mesh: need m >= 2");
  WeightedMesh mesh;
  mesh.dim = 1;
  mesh.label = label.empty() ? "unif[" + std::to_string(a) + "," + std::to_string(b) +
                                   "]x" + std::to_string(m)
                             : std::move(label);
  mesh.q.assign(m, 0.0);
  mesh.nu.assign(m, 1.0 / static_cast<double>(m));
  for (std::size_t k = 0; k < m; ++k) {
    double x = a + (b - a) * static_cast<double>(k) / static_cast<double>(m - 1);
    mesh.points.push_back(real_point({x}));
  }
  return mesh;
}

// Refines a one-dimensional real mesh by inserting factor-1 points per gap.
// Q is linearly interpolated (exact for the affine weights used in audits);
// returns nullopt when the mesh is not a real interval mesh.
inline std::optional<WeightedMesh> refine_interval_mesh(const WeightedMesh& mesh,
                                                        int factor = 4) {
  if (mesh.dim != 1 || !mesh.all_real() || factor < 2) return std::nullopt;
  std::vector<std::pair<double, double>> xq;
  xq.reserve(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i)
    xq.emplace_back(mesh.points[i][0].real(), mesh.q[i]);
  std::sort(xq.begin(), xq.end());
  WeightedMesh out;
  out.dim = 1;
  out.label = mesh.label + "+refined";
  for (std::size_t i = 0; i + 1 < xq.size(); ++i) {
    for (int s = 0; s < factor; ++s) {
      double t = static_cast<double>(s) / factor;
      double x = xq[i].first + t * (xq[i + 1].first - xq[i].first);
      double qv;
      if (xq[i].second == kPosInf || xq[i + 1].second == kPosInf)
        qv = t == 0.0 ? xq[i].second : kPosInf;
      else
        qv = xq[i].second + t * (xq[i + 1].second - xq[i].second);
      out.points.push_back(real_point({x}));
      out.q.push_back(qv);
    }
  }
  out.points.push_back(real_point({xq.back().first}));
  out.q.push_back(xq.back().second);
  out.nu.assign(out.points.size(), 1.0 / static_cast<double>(out.points.size()));
  return out;
}

// Discrete positive measure; elements of M_P(K) carry total mass gamma_d.
struct GridMeasure {
  std::vector<Point> support;
  std::vector<double> masses;
  std::vector<int> mesh_indices;  // alignment with a mesh; -1 when unknown

  double total() const { return std::accumulate(masses.begin(), masses.end(), 0.0); }

  void validate(double expected_total = -1.0) const {
    if (support.size() != masses.size())
      throw std::invalid_argument("GridMeasure: ragged columns");
    for (double m : masses)
      if (!(m >= 0.0)) throw std::invalid_argument("GridMeasure: negative mass");
    if (expected_total > 0.0) {
      double t = total();
      if (std::fabs(t - expected_total) > 1e-9 * std::max(1.0, expected_total))
        throw std::invalid_argument("GridMeasure: total mass " + std::to_string(t) +
                                    " != required " + std::to_string(expected_total));
    }
  }
};

// Moment of the raw (mass gamma_d) measure for a real exponent multi-index.
inline Complex measure_moment(const GridMeasure& mu, const std::vector<int>& alpha) {
  Complex acc(0.0, 0.0);
  for (std::size_t i = 0; i < mu.support.size(); ++i) {
    Complex term(1.0, 0.0);
    for (std::size_t c = 0; c < alpha.size(); ++c) {
      for (int e = 0; e < alpha[c]; ++e) term *= mu.support[i][c];
    }
    acc += mu.masses[i] * term;
  }
  return acc;
}

// sum_i f(mesh point i) * mass_i for a mesh-aligned measure.
inline double integrate_mesh_function(const GridMeasure& mu,
                                      const std::vector<double>& values_on_mesh) {
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.support.size(); ++i) {
    int idx = i < mu.mesh_indices.size() ? mu.mesh_indices[i] : -1;
    if (idx < 0 || static_cast<std::size_t>(idx) >= values_on_mesh.size())
      throw std::invalid_argument("integrate_mesh_function: measure not mesh-aligned");
    acc += values_on_mesh[idx] * mu.masses[i];
  }
  return acc;
}

// Measure proportional to given nonnegative point weights, scaled to gamma.
inline GridMeasure measure_from_weights(const WeightedMesh& mesh,
                                        const std::vector<double>& weights,
                                        double gamma) {
  if (weights.size() != mesh.size())
    throw std::invalid_argument("measure_from_weights: size mismatch");
  double s = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(s > 0.0)) throw std::invalid_argument("measure_from_weights: zero total");
  GridMeasure mu;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    mu.support.push_back(mesh.points[i]);
    mu.masses.push_back(gamma * weights[i] / s);
    mu.mesh_indices.push_back(static_cast<int>(i));
  }
  return mu;
}

// Uniform (w.r.t. nu) measure on the mesh points satisfying pred.
template <typename Pred>
GridMeasure restricted_nu_measure(const WeightedMesh& mesh, double gamma, Pred pred) {
  std::vector<double> w(mesh.size(), 0.0);
  for (std::size_t i = 0; i < mesh.size(); ++i)
    if (pred(mesh.points[i])) w[i] = mesh.nu[i];
  return measure_from_weights(mesh, w, gamma);
}

inline GridMeasure nu_measure(const WeightedMesh& mesh, double gamma) {
  return restricted_nu_measure(mesh, gamma, [](const Point&) { return true; });
}

}  // namespace ppt
