#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "ppt/fekete.hpp"
#include "support/brute.hpp"

using namespace ppt;

namespace {
WeightedMesh mesh_from_xs(const std::vector<double>& xs, std::string label = "m") {
  WeightedMesh mesh;
  mesh.dim = 1;
  mesh.label = std::move(label);
  for (double x : xs) mesh.points.push_back(real_point({x}));
  mesh.q.assign(xs.size(), 0.0);
  mesh.nu.assign(xs.size(), 1.0 / xs.size());
  return mesh;
}

std::vector<double> sorted_xs(const Configuration& cfg) {
  std::vector<double> xs;
  for (const auto& p : cfg.points) xs.push_back(p[0].real());
  std::sort(xs.begin(), xs.end());
  return xs;
}
}  // namespace

TEST_CASE("endpoint pair maximizes at n=1") {
  auto mesh = mesh_from_xs({-1, -0.5, 0, 0.5, 1});
  auto body = ConvexBody::simplex(1);
  auto basis = lattice_points(body, 1);
  auto cfg = fekete_points(mesh, basis, 1);
  CHECK(sorted_xs(cfg) == std::vector<double>{-1, 1});
  CHECK(cfg.log_wvdm == Catch::Approx(std::log(2.0)));
}

TEST_CASE("n=2 picks the symmetric triple (exhaustive check)") {
  auto mesh = mesh_from_xs({-1, -0.5, 0, 0.5, 1});
  auto body = ConvexBody::simplex(1);
  auto basis = lattice_points(body, 2);
  auto cfg = fekete_points(mesh, basis, 2);
  CHECK(sorted_xs(cfg) == std::vector<double>{-1, 0, 1});
  CHECK(cfg.log_wvdm == Catch::Approx(std::log(2.0)));
  CHECK(cfg.log_wvdm ==
        Catch::Approx(brute::exhaustive_fekete_logw(mesh, basis, 2)).margin(1e-10));
}

TEST_CASE("weights steer the configuration") {
  auto mesh = mesh_from_xs({-1, 0, 1});
  mesh.q = {0.0, 0.0, 10.0};  // Q = 10 for x > 0
  auto body = ConvexBody::simplex(1);
  auto basis = lattice_points(body, 1);
  auto cfg = fekete_points(mesh, basis, 1);
  CHECK(sorted_xs(cfg) == std::vector<double>{-1, 0});
  CHECK(cfg.log_wvdm ==
        Catch::Approx(brute::exhaustive_fekete_logw(mesh, basis, 1)).margin(1e-10));
}

TEST_CASE("brute-force agreement on small weighted meshes") {
  std::mt19937 gen(31);
  std::uniform_real_distribution<double> uni(-1.0, 1.0), qdist(0.0, 1.5);
  auto body = ConvexBody::simplex(1);
  for (int rep = 0; rep < 8; ++rep) {
    std::vector<double> xs(10 + rep % 3);
    for (auto& x : xs) x = uni(gen);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    auto mesh = mesh_from_xs(xs);
    for (auto& qv : mesh.q) qv = qdist(gen);
    for (int n : {1, 2, 3}) {
      if (static_cast<long long>(xs.size()) < n + 1) continue;
      auto basis = lattice_points(body, n);
      auto cfg = fekete_points(mesh, basis, n);
      double exact = brute::exhaustive_fekete_logw(mesh, basis, n);
      CHECK(cfg.log_wvdm == Catch::Approx(exact).margin(1e-9));
    }
  }
}

TEST_CASE("brute-force agreement in d=2") {
  std::mt19937 gen(37);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto body = ConvexBody::simplex(2);
  auto basis = lattice_points(body, 1);  // d_n = 3
  WeightedMesh mesh;
  mesh.dim = 2;
  mesh.label = "m2";
  for (int i = 0; i < 9; ++i)
    mesh.points.push_back(real_point({uni(gen), uni(gen)}));
  mesh.q.assign(9, 0.0);
  mesh.nu.assign(9, 1.0 / 9);
  auto cfg = fekete_points(mesh, basis, 1);
  CHECK(cfg.log_wvdm ==
        Catch::Approx(brute::exhaustive_fekete_logw(mesh, basis, 1)).margin(1e-9));
}

TEST_CASE("exchange optimality holds on termination") {
  auto mesh = chebyshev_interval_mesh(-1, 1, 101);
  auto body = ConvexBody::simplex(1);
  auto basis = lattice_points(body, 10);
  auto cfg = fekete_points(mesh, basis, 10);
  CHECK(cfg.exchange_converged);
  CHECK(best_exchange_gain(mesh, cfg) <= 1e-10);
}

TEST_CASE("monotone domination: nonneg weights can only lower delta") {
  auto mesh = chebyshev_interval_mesh(-1, 1, 61);
  auto body = ConvexBody::simplex(1);
  std::mt19937 gen(41);
  std::uniform_real_distribution<double> qdist(0.0, 0.8);
  auto weighted = mesh;
  for (auto& q : weighted.q) q = qdist(gen);
  for (int n : {2, 5, 8}) {
    auto d0 = delta_estimate_single(mesh, body, n);
    auto dq = delta_estimate_single(weighted, body, n);
    CHECK(dq.delta_hat <= d0.delta_hat + 1e-9);
  }
}

TEST_CASE("d=1 scaling: delta(rK) = r delta(K)") {
  auto body = ConvexBody::simplex(1);
  auto mesh = chebyshev_interval_mesh(-1, 1, 51);
  double r = 2.5;
  auto scaled = chebyshev_interval_mesh(-r, r, 51);
  for (int n : {2, 4}) {
    auto d1 = delta_estimate_single(mesh, body, n);
    auto d2 = delta_estimate_single(scaled, body, n);
    CHECK(d2.log_W == Catch::Approx(d1.log_W + d1.l_n * std::log(r)).margin(1e-8));
    CHECK(d2.delta_hat == Catch::Approx(r * d1.delta_hat).epsilon(1e-8));
  }
}

TEST_CASE("delta_estimate at n=2 on the standard mesh") {
  auto mesh = chebyshev_interval_mesh(-1, 1, 401);
  auto body = ConvexBody::simplex(1);
  auto des = delta_estimate(mesh, body, {1, 2});
  REQUIRE(des.size() == 2);
  CHECK(des[1].l_n == 3);
  CHECK(des[1].delta_hat == Catch::Approx(std::pow(2.0, 1.0 / 3.0)).epsilon(1e-9));
  CHECK_THROWS_AS(delta_estimate(mesh, body, {3, 2}), std::invalid_argument);
}

TEST_CASE("constant weight shift is an exact per-n translation") {
  auto body = ConvexBody::simplex(1);
  auto mesh = chebyshev_interval_mesh(-1, 1, 101);
  std::mt19937 gen(43);
  std::uniform_real_distribution<double> cdist(-1.0, 1.0);
  for (int n : {2, 5, 9}) {
    double c = cdist(gen);
    auto shifted = mesh;
    for (auto& q : shifted.q) q += c;
    auto d0 = delta_estimate_single(mesh, body, n);
    auto dc = delta_estimate_single(shifted, body, n);
    double ndn = static_cast<double>(n) * d0.d_n;
    CHECK(std::log(dc.delta_hat) ==
          Catch::Approx(std::log(d0.delta_hat) - c * ndn / d0.l_n).margin(1e-10));
  }
}

TEST_CASE("fekete_measure masses") {
  auto mesh = mesh_from_xs({-1, 0, 1});
  auto body = ConvexBody::simplex(1);
  auto basis = lattice_points(body, 1);
  auto cfg = fekete_points(mesh, basis, 1);
  auto mu = fekete_measure(cfg, 1.0);
  REQUIRE(mu.masses.size() == 2);
  CHECK(mu.masses[0] == 0.5);
  CHECK(mu.masses[1] == 0.5);
  CHECK(mu.total() == Catch::Approx(1.0));
  auto mu2 = fekete_measure(cfg, 2.0);
  CHECK(mu2.total() == Catch::Approx(2.0));
}

TEST_CASE("degenerate meshes are reported") {
  auto mesh = mesh_from_xs({0.5, 0.5, 0.7});  // duplicate point
  auto body = ConvexBody::simplex(1);
  auto basis = lattice_points(body, 2);
  CHECK_THROWS(fekete_points(mesh, basis, 2));
  auto tiny = mesh_from_xs({0.1, 0.2});
  CHECK_THROWS_AS(fekete_points(tiny, lattice_points(body, 3), 3),
                  std::invalid_argument);
}

TEST_CASE("extrapolation recovers a synthetic limit") {
  std::vector<DeltaEstimate> seq;
  double logd = std::log(0.5), a = 0.9, b = 1.1;
  for (int n : {20, 30, 40}) {
    DeltaEstimate de;
    de.n = n;
    de.l_n = n * (n + 1) / 2;
    de.delta_hat = std::exp(logd + a * std::log(n) / n + b / n);
    de.log_W = std::log(de.delta_hat) * de.l_n;
    seq.push_back(de);
  }
  auto ex = extrapolate_delta(seq);
  CHECK(ex.extrapolated);
  CHECK(ex.value == Catch::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("fekete determinism") {
  auto mesh = chebyshev_interval_mesh(-1, 1, 101);
  auto body = ConvexBody::simplex(1);
  auto basis = lattice_points(body, 7);
  auto a = fekete_points(mesh, basis, 7);
  auto b = fekete_points(mesh, basis, 7);
  CHECK(a.mesh_indices == b.mesh_indices);
  CHECK(a.log_wvdm == b.log_wvdm);
}
