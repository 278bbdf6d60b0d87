#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "ppt/vdm.hpp"
#include "support/brute.hpp"

using namespace ppt;

namespace {
std::vector<Point> pts1d(const std::vector<double>& xs) {
  std::vector<Point> p;
  for (double x : xs) p.push_back(real_point({x}));
  return p;
}
}  // namespace

TEST_CASE("log_abs_vdm d=1 basics") {
  auto basis1 = lattice_points(ConvexBody::simplex(1), 1);
  CHECK(log_abs_vdm(basis1, pts1d({-1, 1})) == Catch::Approx(std::log(2.0)));
  CHECK(log_abs_vdm(basis1, pts1d({0.5, 0.5})) == kNegInf);

  auto basis2 = lattice_points(ConvexBody::simplex(1), 2);
  CHECK(log_abs_vdm(basis2, pts1d({-1, 0, 1})) == Catch::Approx(std::log(2.0)));
}

TEST_CASE("log_abs_vdm agrees with the d=1 product oracle") {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int n = 1; n <= 12; n += 3) {
    auto basis = lattice_points(ConvexBody::simplex(1), n);
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<double> xs(basis.d_n());
      for (auto& x : xs) x = uni(gen);
      double expect = brute::log_vdm_product_1d(xs);
      CHECK(log_abs_vdm(basis, pts1d(xs)) == Catch::Approx(expect).margin(1e-8));
    }
  }
}

TEST_CASE("log_abs_vdm agrees with cofactor determinants in d=2") {
  auto basis = lattice_points(ConvexBody::simplex(2), 1);  // 1, x, y
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Point> pts;
    for (int i = 0; i < 3; ++i)
      pts.push_back({Complex(uni(gen), uni(gen)), Complex(uni(gen), uni(gen))});
    double expect = std::log(std::abs(brute::vdm_cofactor(basis, pts)));
    CHECK(log_abs_vdm(basis, pts) == Catch::Approx(expect).margin(1e-9));
  }
}

TEST_CASE("weighted VDM") {
  auto basis = lattice_points(ConvexBody::simplex(1), 1);
  auto pts = pts1d({-1, 1});
  CHECK(log_abs_wvdm(basis, pts, {0, 0}, 1) == Catch::Approx(std::log(2.0)));
  CHECK(log_abs_wvdm(basis, pts, {1, 1}, 1) == Catch::Approx(std::log(2.0) - 2.0));
  // +inf weight excludes the configuration entirely
  CHECK(log_abs_wvdm(basis, pts, {kPosInf, 0}, 1) == kNegInf);
}

TEST_CASE("weight translation identity is exact") {
  std::mt19937 gen(9);
  std::uniform_real_distribution<double> uni(-1.0, 1.0), cdist(-3.0, 3.0);
  for (int n : {1, 3, 6}) {
    auto basis = lattice_points(ConvexBody::simplex(1), n);
    std::vector<double> xs(basis.d_n());
    for (auto& x : xs) x = uni(gen);
    auto pts = pts1d(xs);
    std::vector<double> q(basis.d_n()), qc(basis.d_n());
    double c = cdist(gen);
    for (long long i = 0; i < basis.d_n(); ++i) {
      q[i] = uni(gen);
      qc[i] = q[i] + c;
    }
    double lhs = log_abs_wvdm(basis, pts, qc, n);
    double rhs = log_abs_wvdm(basis, pts, q, n) - n * static_cast<double>(basis.d_n()) * c;
    CHECK(lhs == Catch::Approx(rhs).margin(1e-12 * std::max(1.0, std::fabs(rhs))));
  }
}

TEST_CASE("permutation invariance and basis-order invariance") {
  std::mt19937 gen(13);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto basis = lattice_points(ConvexBody::simplex(1), 5);
  std::vector<double> xs(basis.d_n());
  for (auto& x : xs) x = uni(gen);
  double ref = log_abs_vdm(basis, pts1d(xs));
  for (int rep = 0; rep < 10; ++rep) {
    std::shuffle(xs.begin(), xs.end(), gen);
    CHECK(log_abs_vdm(basis, pts1d(xs)) == Catch::Approx(ref).margin(1e-9));
  }
  // reversing the monomial order flips the determinant sign only
  auto rev = basis;
  std::reverse(rev.exponents.begin(), rev.exponents.end());
  CHECK(log_abs_vdm(rev, pts1d(xs)) == Catch::Approx(ref).margin(1e-9));
}

TEST_CASE("d=1 scaling adds l_n log r") {
  std::mt19937 gen(17);
  std::uniform_real_distribution<double> uni(-1.0, 1.0), rdist(0.3, 4.0);
  for (int n : {2, 5, 9}) {
    auto basis = lattice_points(ConvexBody::simplex(1), n);
    std::vector<double> xs(basis.d_n()), ys(basis.d_n());
    double r = rdist(gen);
    for (long long i = 0; i < basis.d_n(); ++i) {
      xs[i] = uni(gen);
      ys[i] = r * xs[i];
    }
    double lhs = log_abs_vdm(basis, pts1d(ys));
    double rhs = log_abs_vdm(basis, pts1d(xs)) + basis.l_n * std::log(r);
    CHECK(lhs == Catch::Approx(rhs).margin(1e-8));
  }
}

TEST_CASE("lagrange_log determinant ratios") {
  auto basis = lattice_points(ConvexBody::simplex(1), 1);
  Configuration cfg;
  cfg.basis = basis;
  cfg.n = 1;
  cfg.points = pts1d({-1, 1});
  cfg.recompute_logs();

  CHECK(lagrange_log(cfg, 1, real_point({1.0})) == Catch::Approx(0.0).margin(1e-12));
  CHECK(lagrange_log(cfg, 1, real_point({-1.0})) == kNegInf);
  CHECK(lagrange_log(cfg, 1, real_point({0.0})) == Catch::Approx(std::log(0.5)));
}

TEST_CASE("LagrangeEvaluator matches the refactorization route") {
  std::mt19937 gen(23);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int n : {2, 4, 8}) {
    auto basis = lattice_points(ConvexBody::simplex(1), n);
    Configuration cfg;
    cfg.basis = basis;
    cfg.n = n;
    std::vector<double> xs(basis.d_n());
    for (auto& x : xs) x = uni(gen);
    std::sort(xs.begin(), xs.end());
    cfg.points = pts1d(xs);
    cfg.recompute_logs();
    LagrangeEvaluator eval(basis, cfg.points);
    for (double z : {-0.731, 0.119, 1.553}) {
      auto logl = eval.log_lagrange_at(real_point({z}));
      for (long long j = 0; j < basis.d_n(); ++j) {
        double slow = lagrange_log(cfg, static_cast<std::size_t>(j), real_point({z}));
        CHECK(logl(j) == Catch::Approx(slow).margin(1e-7));
      }
    }
  }
}

TEST_CASE("complex evaluation path") {
  auto basis = lattice_points(ConvexBody::simplex(1), 2);
  std::vector<Point> pts{{Complex(0, 1)}, {Complex(1, 0)}, {Complex(-1, 0)}};
  double expect = std::log(std::abs(brute::vdm_cofactor(basis, pts)));
  CHECK(log_abs_vdm(basis, pts) == Catch::Approx(expect).margin(1e-9));
}

TEST_CASE("configuration cache invariant: logs reproducible") {
  auto basis = lattice_points(ConvexBody::simplex(1), 3);
  Configuration cfg;
  cfg.basis = basis;
  cfg.n = 3;
  cfg.points = pts1d({-1, -0.4, 0.3, 1});
  cfg.q_values = {0.1, 0.2, 0.3, 0.4};
  cfg.recompute_logs();
  double lw = cfg.log_wvdm;
  cfg.recompute_logs();
  CHECK(cfg.log_wvdm == Catch::Approx(lw).epsilon(1e-9));
}
