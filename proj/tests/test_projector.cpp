#include <doctest.h>

#include <numbers>

#include "bergman/projector.hpp"
#include "oracles.hpp"

using namespace bergman;

TEST_CASE("project_monomial") {
  MomentTable t0(make_power(0.0));
  auto pm = project_monomial(t0, 2, 1);
  CHECK(pm.degree == 1);
  CHECK(pm.coefficient == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(project_monomial(t0, 1, 2).coefficient == 0.0);
  auto hol = project_monomial(make_dostanic(0.0, 1.0, 1.0), 7, 0);
  CHECK(hol.coefficient == 1.0);
  CHECK(hol.degree == 7);
  // Frozen 50-digit moments of Dostanic(0,1,1).
  MomentTable td(make_dostanic(0.0, 1.0, 1.0));
  auto d = project_monomial(td, 16, 2);
  CHECK(d.degree == 14);
  CHECK(d.coefficient == doctest::Approx(0.000017161559272094398623 / 0.000031112599160066404094).epsilon(1e-11));
  CHECK_THROWS_AS(project_monomial(t0, -1, 0), InvalidInput);
}

TEST_CASE("lp_norm_monomial") {
  MomentTable t0(make_power(0.0));
  CHECK(lp_norm_monomial(t0, 1, 0, 2.0) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-13));
  CHECK(lp_norm_monomial(t0, 1, 1, 2.0) == doctest::Approx(std::numbers::pi / 3).epsilon(1e-13));
  CHECK(lp_norm_monomial(make_dostanic(0.0, 1.0, 1.0), 8, 1, 1.5) ==
        doctest::Approx(2 * std::numbers::pi * 0.00045273406875836394762).epsilon(1e-11));
  CHECK_THROWS_AS(lp_norm_monomial(t0, 1, 0, 1.0), InvalidInput);
}

TEST_CASE("min_k") {
  CHECK(min_k(1.5) == 8);
  CHECK(min_k(1.9) == 40);
  CHECK(min_k(1.99) == 400);
  CHECK(min_k(1.25) == 5);
  CHECK_THROWS_AS(min_k(2.0), InvalidInput);
  CHECK_THROWS_AS(min_k(1.0), InvalidInput);
}

TEST_CASE("ratio: closed forms") {
  MomentTable t0(make_power(0.0));
  CHECK(ratio(t0, 2.0, 2, 1) == doctest::Approx(8.0 / 9.0).epsilon(1e-13));
  // Power(t): Phi is a Beta function, so R has a closed form through lgamma.
  for (double t : {0.0, 1.0, 3.0}) {
    MomentTable table(make_power(t));
    for (int m : {1, 3, 10, 64}) {
      const int k = 8;
      const double p = 1.5;
      auto lb = [t](double x) { return std::log(oracle::beta_moment(t, x)); };
      const double want = p * (lb(k * m) - lb((k - 1) * m)) + lb(0.5 * p * (k - 1) * m) - lb(0.5 * p * (k + 1) * m);
      CHECK(log_ratio(table, p, k, m) == doctest::Approx(want).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(ratio(t0, 1.5, 0, 1), InvalidInput);
  CHECK_THROWS_AS(ratio(t0, 1.5, 2, 0), InvalidInput);
}

TEST_CASE("ratio: Hoelder bound at p = 2") {
  for (const auto& w : {make_power(0.0), make_power(1.0), make_dostanic(0.0, 1.0, 1.0), make_dostanic(2.0, 0.5, 2.0)}) {
    MomentTable table(w);
    for (int k = 1; k <= 6; ++k)
      for (int m : {1, 2, 5, 17, 64, 200}) CHECK(ratio(table, 2.0, k, m) <= 1.0 + 1e-9);
  }
}

TEST_CASE("ratio: scale invariance") {
  auto w = make_dostanic(0.0, 1.0, 1.0);
  MomentTable a(w);
  MomentTable b(w.scaled(37.5));
  for (int m : {1, 4, 32}) {
    const double ra = ratio(a, 1.5, 8, m);
    const double rb = ratio(b, 1.5, 8, m);
    CHECK(std::abs(rb / ra - 1.0) <= 1e-10);
  }
}

TEST_CASE("ratio: projection and norm consistency") {
  MomentTable table(make_dostanic(0.0, 1.0, 1.0));
  const double p = 1.5;
  for (int k : {5, 8}) {
    for (int m : {1, 3, 12}) {
      const auto pm = project_monomial(table, k * m, m);
      const double num = std::pow(pm.coefficient, p) * lp_norm_monomial(table, pm.degree, 0, p);
      const double den = lp_norm_monomial(table, k * m, m, p);
      CHECK(num / den == doctest::Approx(ratio(table, p, k, m)).epsilon(1e-10));
    }
  }
}

TEST_CASE("ratio: Dostanic blow-up trend") {
  MomentTable table(make_dostanic(0.0, 1.0, 1.0));
  double prev = 0.0;
  for (int m : {10, 20, 40, 80}) {
    const double r = ratio(table, 1.5, 8, m);
    CHECK(r > prev);
    prev = r;
  }
  // Frozen values computed with mpmath at 50 digits.
  CHECK(ratio(table, 1.5, 8, 16) == doctest::Approx(1.344920857933754).epsilon(1e-9));
  CHECK(ratio(table, 1.5, 8, 256) == doctest::Approx(2.962888856738634).epsilon(1e-9));
}

TEST_CASE("ratio_sweep") {
  const auto grid = dyadic_grid(256);
  REQUIRE(grid.size() == 9);
  CHECK(grid.front() == 1);
  CHECK(grid.back() == 256);
  CHECK(dyadic_grid(300).back() == 256);
  CHECK_THROWS_AS(dyadic_grid(0), InvalidInput);

  auto s = ratio_sweep(make_dostanic(0.0, 1.0, 1.0), 1.5, 8, grid);
  CHECK(s.weight_id == "dostanic:A=0,B=1,alpha=1");
  REQUIRE(s.points.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(s.points[i].m == grid[i]);
    CHECK(s.points[i].error.empty());
    CHECK(s.points[i].R > 0.0);
    if (i > 0) CHECK(s.points[i].log_R > s.points[i - 1].log_R);
  }

  auto flat = ratio_sweep(make_power(0.0), 2.0, 3, grid);
  for (const auto& pt : flat.points) CHECK(pt.R <= 1.0 + 1e-9);

  auto reg = ratio_sweep(make_power(3.0), 1.5, 8, grid);
  double lo = 1e300;
  double hi = 0.0;
  for (const auto& pt : reg.points) {
    lo = std::min(lo, pt.R);
    hi = std::max(hi, pt.R);
  }
  CHECK(hi / lo < 2.0);
}
