#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "wbx/linsolve.hpp"

using namespace wbx::linsolve;

TEST_CASE("identity returns the right-hand side") {
  DenseSystem sys({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {3.5, -2, 7});
  auto sol = solve(sys);
  auto* u = std::get_if<Unique>(&sol);
  REQUIRE(u);
  CHECK(u->x == std::vector<double>{3.5, -2, 7});
}

TEST_CASE("three-file symmetric coded matrix") {
  DenseSystem sys({{0.9, 0.95, 0.95}, {0.95, 0.9, 0.95}, {0.95, 0.95, 0.9}}, {1, 1, 1});
  auto sol = solve(sys);
  auto* u = std::get_if<Unique>(&sol);
  REQUIRE(u);
  for (double x : u->x) CHECK(x == doctest::Approx(1.0 / 2.8).epsilon(1e-14));
  CHECK(sys.residual_inf(u->x) < 1e-12);
}

TEST_CASE("duplicated rows give a one-dimensional family") {
  DenseSystem sys({{0.9, 0.9}, {0.9, 0.9}}, {1, 1});
  auto sol = solve(sys);
  auto* f = std::get_if<Family>(&sol);
  REQUIRE(f);
  REQUIRE(f->null_basis.size() == 1);
  const auto& v = f->null_basis[0];
  CHECK(v[0] == doctest::Approx(-v[1]));
  CHECK(sys.residual_inf(f->particular) < 1e-12);
  // Any point along the null direction still solves the system.
  std::vector<double> moved{f->particular[0] + 3 * v[0], f->particular[1] + 3 * v[1]};
  CHECK(sys.residual_inf(moved) < 1e-12);
}

TEST_CASE("inconsistent system") {
  DenseSystem sys({{1, 2}, {2, 4}}, {1, 3});
  CHECK(std::holds_alternative<Inconsistent>(solve(sys)));
}

TEST_CASE("zero matrix with zero rhs is a full family") {
  DenseSystem sys({{0, 0}, {0, 0}}, {0, 0});
  auto sol = solve(sys);
  auto* f = std::get_if<Family>(&sol);
  REQUIRE(f);
  CHECK(f->null_basis.size() == 2);
}

TEST_CASE("rejects bad input") {
  CHECK_THROWS(DenseSystem(0));
  CHECK_THROWS(DenseSystem({{1, 2}}, {1}));
  DenseSystem sys({{1}}, {1});
  CHECK_THROWS(solve(sys, 0.0));
  sys.a(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(solve(sys));
}

TEST_CASE("random well-conditioned systems: residual and row-permutation invariance") {
  std::mt19937_64 gen(20240611);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 10;
    std::vector<std::vector<double>> rows(n, std::vector<double>(n));
    std::vector<double> rhs(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) rows[r][c] = entry(gen);
      rows[r][r] += static_cast<double>(n);  // diagonally dominant
      rhs[r] = entry(gen) * 10.0;
    }
    DenseSystem sys(rows, rhs);
    auto sol = solve(sys);
    auto* u = std::get_if<Unique>(&sol);
    REQUIRE(u);
    CHECK(sys.residual_inf(u->x) < 1e-9);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<std::vector<double>> prow;
    std::vector<double> prhs;
    for (std::size_t p : perm) {
      prow.push_back(rows[p]);
      prhs.push_back(rhs[p]);
    }
    auto psol = solve(DenseSystem(prow, prhs));
    auto* pu = std::get_if<Unique>(&psol);
    REQUIRE(pu);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(pu->x[i] - u->x[i]) < 1e-12);
  }
}
