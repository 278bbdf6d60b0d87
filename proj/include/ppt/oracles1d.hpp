// Closed-form classical d=1 references: interval transfinite diameter, arcsine
// equilibrium moments, the Joukowski-map extremal function, and the weighted
// logarithmic energy double sum. Test-support API: production code paths never
// include this header; only tests and the acceptance suite cross-check
// against it.
#pragma once

#include <cmath>
#include <stdexcept>

#include "ppt/common.hpp"
#include "ppt/mesh.hpp"

namespace ppt::oracles {

// Transfinite diameter / capacity of a real interval.
inline double interval_delta(double a, double b) {
  if (!(a < b)) throw std::invalid_argument("interval_delta: need a < b");
  return (b - a) / 4.0;
}

// Even moments of the arcsine measure on [-1,1]: binom(k, k/2) / 2^k.
inline double arcsine_moment(int k) {
  if (k < 0) throw std::invalid_argument("arcsine_moment: k >= 0 required");
  if (k % 2 == 1) return 0.0;
  double binom = 1.0;
  for (int i = 1; i <= k / 2; ++i)
    binom *= static_cast<double>(k / 2 + i) / static_cast<double>(i);
  return binom / std::pow(2.0, k);
}

// V_{Sigma,[a,b]}(z) = log|T + sqrt(T^2-1)| for z outside [a,b], T the affine
// map onto [-1,1].
inline double interval_extremal(double z, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("interval_extremal: need a < b");
  double t = (2.0 * z - a - b) / (b - a);
  if (std::fabs(t) < 1.0)
    throw std::invalid_argument("interval_extremal: z must be outside [a,b]");
  double at = std::fabs(t);
  return std::log(at + std::sqrt(at * at - 1.0));
}

// Discrete surrogate of the weighted logarithmic energy
//   int int log(1/|x-y|) dmu dmu + 2 int Q dmu
// with the diagonal excluded; used for ordering checks only. A measure whose
// support carries fewer than two charged points diverges (+inf).
inline double log_energy(const GridMeasure& mu, const std::vector<double>& q_at_support) {
  if (q_at_support.size() != mu.support.size())
    throw std::invalid_argument("log_energy: Q values must match support");
  std::size_t charged = 0;
  for (double m : mu.masses)
    if (m > 0.0) ++charged;
  if (charged < 2) return kPosInf;
  double e = 0.0;
  for (std::size_t i = 0; i < mu.support.size(); ++i) {
    for (std::size_t j = 0; j < mu.support.size(); ++j) {
      if (i == j) continue;
      double d = std::abs(mu.support[i][0] - mu.support[j][0]);
      if (d == 0.0) return kPosInf;
      e += -std::log(d) * mu.masses[i] * mu.masses[j];
    }
    e += 2.0 * q_at_support[i] * mu.masses[i];
  }
  return e;
}

// Arcsine measure discretized by exact cell integrals on an interval mesh:
// mass over [l,r] is (asin(r) - asin(l)) / pi, scaled to total gamma.
inline GridMeasure arcsine_cell_measure(const WeightedMesh& mesh, double gamma) {
  if (mesh.dim != 1 || !mesh.all_real())
    throw std::invalid_argument("arcsine_cell_measure: real interval mesh required");
  std::vector<std::pair<double, std::size_t>> xs;
  for (std::size_t i = 0; i < mesh.size(); ++i)
    xs.emplace_back(mesh.points[i][0].real(), i);
  std::sort(xs.begin(), xs.end());
  double lo = xs.front().first, hi = xs.back().first;
  if (lo < -1.0 - 1e-12 || hi > 1.0 + 1e-12)
    throw std::invalid_argument("arcsine_cell_measure: mesh must lie in [-1,1]");
  auto clamp = [](double x) { return std::min(1.0, std::max(-1.0, x)); };
  std::vector<double> w(mesh.size(), 0.0);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    double l = k == 0 ? -1.0 : 0.5 * (xs[k - 1].first + xs[k].first);
    double r = k + 1 == xs.size() ? 1.0 : 0.5 * (xs[k].first + xs[k + 1].first);
    w[xs[k].second] = (std::asin(clamp(r)) - std::asin(clamp(l))) / M_PI;
  }
  return measure_from_weights(mesh, w, gamma);
}

}  // namespace ppt::oracles
