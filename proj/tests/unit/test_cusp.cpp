#include <cmath>

#include <gtest/gtest.h>

#include "hypo/cusp.hpp"
#include "hypo/exact_spectrum.hpp"
#include "support.hpp"

using namespace hypo;

namespace {

std::vector<Complex> exact_grid(double alpha, int k) {
  std::vector<Complex> z;
  for (int n = 0; n <= k; ++n)
    for (int m = 0; n + m <= k; ++m) z.push_back(exact_eigenvalue(n, m, alpha));
  return z;
}

std::vector<Complex> random_points(prop::Gen& g, int count) {
  std::vector<Complex> z;
  for (int i = 0; i < count; ++i) z.emplace_back(g.uniform(-0.5, 20), g.uniform(-30, 30));
  return z;
}

}  // namespace

TEST(FitConstant, Examples) {
  const std::vector<Complex> origin{0.0};
  const auto f0 = fit_constant(origin, 1.0);
  EXPECT_EQ(f0.C, 0.0);
  EXPECT_TRUE(f0.violations.empty());

  const std::vector<Complex> three{{0, 0}, {1, 2}, {4, 3}};
  const auto f = fit_constant(three, 1.0);
  EXPECT_DOUBLE_EQ(f.C, 1.0);
  EXPECT_EQ(f.included, 3u);
}

TEST(FitConstant, ExactGridMatchesDirectScan) {
  const auto grid = exact_grid(1.0, 20);
  double scan = 0.0;
  for (const Complex z : grid) scan = std::max(scan, std::abs(z.imag()) / (1 + z.real()));
  const auto f = fit_constant(grid, 1.0);
  EXPECT_NEAR(f.C, scan, 1e-12);
  // The supremum over the full grid is sqrt(3), approached along the lambda+ ray.
  EXPECT_NEAR(scan, 20 * std::sqrt(3.0) / 22, 1e-12);
  EXPECT_LT(f.C, std::sqrt(3.0));
  EXPECT_TRUE(f.violations.empty());
}

TEST(FitConstant, ConeContainmentForExactGrid) {
  for (double alpha : {0.6, 1.0, 2.0, 4.0}) {
    const auto f = fit_constant(exact_grid(alpha, 50), 1.0);
    EXPECT_TRUE(f.violations.empty());
    EXPECT_LE(f.C, std::sqrt(4 * alpha * alpha - 1) + 1e-9);
  }
}

TEST(FitConstant, Violations) {
  const std::vector<Complex> pts{{-1, 0}, {1, 1}, {-1e-9, 0.5}};
  const auto f = fit_constant(pts, 1.0);
  ASSERT_EQ(f.violations.size(), 1u);
  EXPECT_EQ(f.violations[0], Complex(-1, 0));
  EXPECT_EQ(f.included, 2u);
  const std::vector<Complex> bad{{-1, 0}};
  EXPECT_THROW(fit_constant(bad, 1.0), FitError);
  EXPECT_THROW(fit_constant(pts, 0.0), DomainError);
  EXPECT_THROW(fit_constant(pts, 1.5), DomainError);
  EXPECT_THROW(fit_constant(std::vector<Complex>{}, 1.0), DomainError);
}

TEST(FitConstant, RefitIsIdempotent) {
  prop::Gen g(51);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pts = random_points(g, 40);
    const double nu = g.uniform(0.1, 1.0);
    const auto f = fit_constant(pts, nu);
    for (const Complex z : pts)
      if (z.real() >= -f.tol) EXPECT_TRUE(contains(f, z));
  }
}

TEST(FitConstant, MonotoneUnderUnion) {
  prop::Gen g(52);
  for (int trial = 0; trial < 30; ++trial) {
    auto a = random_points(g, 20);
    const auto b = random_points(g, 20);
    const double c_a = fit_constant(a, 0.7).C;
    a.insert(a.end(), b.begin(), b.end());
    EXPECT_GE(fit_constant(a, 0.7).C, c_a);
  }
}

TEST(ScanNu, RealAxisGivesZero) {
  const std::vector<Complex> pts{0.0, 1.0, 7.0};
  const std::vector<double> grid{0.25, 0.5, 1.0};
  const auto s = scan_nu(pts, grid, 10.0);
  for (const auto& f : s.fits) EXPECT_EQ(f.C, 0.0);
  ASSERT_TRUE(s.smallest_nu.has_value());
  EXPECT_EQ(*s.smallest_nu, 0.25);
}

TEST(ScanNu, SinglePointFormula) {
  const std::vector<Complex> pts{{1, 2}};
  const std::vector<double> grid{0.2, 0.4, 0.6, 0.8, 1.0};
  const auto s = scan_nu(pts, grid, 1.5);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(s.fits[i].C, 2 / std::pow(2.0, grid[i]), 1e-14);
  EXPECT_TRUE(s.monotone);
  ASSERT_TRUE(s.smallest_nu.has_value());
  EXPECT_EQ(*s.smallest_nu, 0.6);
}

TEST(ScanNu, MonotoneOnRandomSets) {
  prop::Gen g(53);
  std::vector<double> grid;
  for (int i = 1; i <= 10; ++i) grid.push_back(0.1 * i);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pts = random_points(g, 30);
    const auto s = scan_nu(pts, grid, 1e9);
    EXPECT_TRUE(s.monotone);
    for (std::size_t i = 1; i < s.fits.size(); ++i) EXPECT_LE(s.fits[i].C, s.fits[i - 1].C * (1 + 1e-14));
  }
}

TEST(RegionBoundary, Examples) {
  CuspFit zero;
  zero.C = 0.0;
  for (const auto& [x, y] : region_boundary(zero, 0, 5, 4).upper) EXPECT_EQ(y, 0.0);

  CuspFit one;
  one.C = 1.0;
  one.nu = 1.0;
  const auto p = region_boundary(one, 0, 1, 2);
  ASSERT_EQ(p.upper.size(), 2u);
  EXPECT_EQ(p.upper[0], std::make_pair(0.0, 1.0));
  EXPECT_EQ(p.upper[1], std::make_pair(1.0, 2.0));
  EXPECT_EQ(p.lower[1], std::make_pair(1.0, -2.0));

  CuspFit half;
  half.C = 2.0;
  half.nu = 0.5;
  EXPECT_DOUBLE_EQ(region_boundary(half, 3, 3, 1).upper[0].second, 4.0);
}

TEST(FitTau, Examples) {
  const std::vector<Complex> pts{{1, 1}, {4, 3}};
  const auto f = fit_tau(pts, 2.0);
  // x >= y^2 - c needs c >= 0 and c >= 5.
  EXPECT_DOUBLE_EQ(f.c, 5.0);
  EXPECT_EQ(f.included, 2u);
  EXPECT_THROW(fit_tau(pts, 0.0), DomainError);
}

TEST(ResolvedPoints, FiltersFlags) {
  Spectrum s;
  s.eigenvalues = {1.0, 2.0, 3.0};
  s.residuals = {0.0, 1.0, 0.0};
  s.resolved = {true, false, true};
  EXPECT_EQ(resolved_points(s), (std::vector<Complex>{1.0, 3.0}));
}
