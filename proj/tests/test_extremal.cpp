#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ppt/extremal.hpp"
#include "ppt/oracles1d.hpp"

using namespace ppt;

namespace {
struct Setup {
  WeightedMesh mesh;
  ConvexBody body;
  MonomialBasis basis;
  Configuration cfg;
};

Setup make_setup(int n, std::size_t m = 201) {
  Setup s{chebyshev_interval_mesh(-1, 1, m), ConvexBody::simplex(1), {}, {}};
  s.basis = lattice_points(s.body, n);
  s.cfg = fekete_points(s.mesh, s.basis, n);
  return s;
}
}  // namespace

TEST_CASE("extremal lower bound vanishes at Fekete nodes for Q=0") {
  auto s = make_setup(8);
  for (int j : {0, 3, 7}) {
    auto ev = extremal_lower(s.cfg.points[static_cast<std::size_t>(j)], s.cfg, s.mesh);
    CHECK(ev.value == Catch::Approx(0.0).margin(1e-8));
  }
}

TEST_CASE("constant weight shifts the bound by exactly c") {
  auto s = make_setup(6, 101);
  double c = 0.731;
  auto shifted_mesh = s.mesh;
  for (auto& q : shifted_mesh.q) q += c;
  auto cfg_c = fekete_points(shifted_mesh, s.basis, 6);
  for (double z : {1.4, 2.2}) {
    auto ev0 = extremal_lower(real_point({z}), s.cfg, s.mesh);
    auto evc = extremal_lower(real_point({z}), cfg_c, shifted_mesh);
    CHECK(evc.lagrange_value == Catch::Approx(ev0.lagrange_value + c).margin(1e-8));
    CHECK(evc.chebyshev_value == Catch::Approx(ev0.chebyshev_value + c).margin(1e-7));
    CHECK(evc.value == Catch::Approx(ev0.value + c).margin(1e-7));
  }
}

TEST_CASE("bounds are one-sided and sharpen with n") {
  auto oracle = [](double z) { return oracles::interval_extremal(z, -1, 1); };
  double prev = kNegInf;
  for (int n : {5, 10, 20}) {
    auto s = make_setup(n);
    auto ev = extremal_lower(real_point({2.0}), s.cfg, s.mesh);
    CHECK(ev.value <= oracle(2.0) + 1e-6);
    CHECK(ev.value >= prev - 1e-9);
    CHECK(ev.chebyshev_value >= ev.lagrange_value - 1e-9);  // LP dominates here
    prev = ev.value;
  }
  // At n=20 the LP bound is already within a few percent; the Lagrange-only
  // bound is not (its deficit decays like log(n)/n).
  auto s = make_setup(20);
  auto ev = extremal_lower(real_point({2.0}), s.cfg, s.mesh);
  CHECK(ev.used_chebyshev);
  CHECK(ev.value > 0.95 * oracle(2.0));
}

TEST_CASE("LP bound dominates the Chebyshev polynomial competitor") {
  // T_n is feasible for the mesh-constrained problem on [-1,1] with Q = 0, so
  // the LP optimum cannot be smaller than (1/n) log T_n(z).
  for (int n : {8, 16}) {
    auto s = make_setup(n);
    for (double z : {1.5, 3.0}) {
      double tn = std::log(std::cosh(n * std::acosh(z))) / n;
      auto ev = extremal_lower(real_point({z}), s.cfg, s.mesh);
      CHECK(ev.chebyshev_value >= tn - 1e-8);
    }
  }
}

TEST_CASE("admissibility on the generating mesh is exact") {
  auto s = make_setup(12);
  std::vector<ExtremalEval> evs;
  for (double z : {1.5, 2.0}) evs.push_back(extremal_lower(real_point({z}), s.cfg, s.mesh));
  auto rep = admissibility_audit(s.cfg, s.mesh, evs);
  CHECK(rep.max_violation_mesh <= 1e-9);
  CHECK(rep.refined_available);
  // off-mesh overshoot exists but stays small on a 201-point mesh at n=12
  CHECK(rep.max_violation_refined <= 0.05);
}

TEST_CASE("admissibility with a nonconstant weight") {
  auto mesh = chebyshev_interval_mesh(-1, 1, 101);
  for (std::size_t i = 0; i < mesh.size(); ++i)
    mesh.q[i] = 0.5 * mesh.points[i][0].real() * mesh.points[i][0].real();
  auto body = ConvexBody::simplex(1);
  auto basis = lattice_points(body, 8);
  auto cfg = fekete_points(mesh, basis, 8);
  std::vector<ExtremalEval> evs{extremal_lower(real_point({2.0}), cfg, mesh)};
  auto rep = admissibility_audit(cfg, mesh, evs);
  CHECK(rep.max_violation_mesh <= 1e-9);
}

TEST_CASE("far-field growth matches the H_P envelope") {
  auto s = make_setup(10);
  auto body = s.body;
  double base = kNegInf;
  for (double z : {10.0, 11.0, 13.0})
    base = std::max(base, extremal_lower(real_point({z}), s.cfg, s.mesh).value -
                              h_p(body, real_point({z})));
  for (double z : {100.0, 1000.0}) {
    double diff = extremal_lower(real_point({z}), s.cfg, s.mesh).value -
                  h_p(body, real_point({z}));
    CHECK(std::isfinite(diff));
    CHECK(diff <= base + 0.1);
  }
}

TEST_CASE("rumely energy basics") {
  auto body = ConvexBody::simplex(1);
  auto consts = compute_constants(body, 6);
  CHECK(energy_via_rumely(0.0, consts) == 0.0);  // delta = 1
  CHECK(energy_via_rumely(std::log(0.5), consts) == Catch::Approx(std::log(2.0) / 2.0));
  // translation: E(Q+c) - E(Q) = c * (n d_n / l_n) / b_d per n, exactly
  auto mesh = chebyshev_interval_mesh(-1, 1, 101);
  double c = -0.37;
  auto shifted = mesh;
  for (auto& q : shifted.q) q += c;
  for (int n : {3, 7}) {
    auto d0 = delta_estimate_single(mesh, body, n);
    auto dc = delta_estimate_single(shifted, body, n);
    double e0 = energy_via_rumely(d0, consts);
    double ec = energy_via_rumely(dc, consts);
    double ndn_over_ln = static_cast<double>(n) * d0.d_n / static_cast<double>(d0.l_n);
    CHECK(ec - e0 == Catch::Approx(c * ndn_over_ln / consts.b_d).margin(1e-9));
  }
}

TEST_CASE("gateaux check: constant and odd directions") {
  auto mesh = chebyshev_interval_mesh(-1, 1, 101);
  auto body = ConvexBody::simplex(1);
  auto consts = compute_constants(body, 6);

  std::vector<double> ones(mesh.size(), 1.0);
  auto rep1 = gateaux_check(mesh, body, ones, {-0.1, 0.0, 0.1}, 8, consts);
  REQUIRE(rep1.rows.size() == 3);
  CHECK(rep1.rows[1].fd_derivative == Catch::Approx(consts.gamma_d).margin(1e-8));
  CHECK(rep1.rows[1].mu_integral == Catch::Approx(consts.gamma_d).margin(1e-12));
  CHECK(rep1.max_discrepancy <= 1e-8);

  std::vector<double> odd(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) odd[i] = mesh.points[i][0].real();
  auto rep2 = gateaux_check(mesh, body, odd, {-0.05, 0.0, 0.05}, 8, consts);
  CHECK(std::fabs(rep2.rows[1].fd_derivative) <= 0.02);

  CHECK_THROWS_AS(gateaux_check(mesh, body, ones, {-0.1, 0.0, 0.2}, 4, consts),
                  std::invalid_argument);
}
