#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "hypo/sobolev.hpp"
#include "support.hpp"

using namespace hypo;

namespace {

constexpr double kPi = std::numbers::pi;

double max_diff(const GridFunction& a, const GridFunction& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

GridFunction random_packet(prop::Gen& g, std::vector<int> counts, double half_width) {
  const double cx = g.uniform(-3, 3), cy = g.uniform(-3, 3), kx = g.uniform(-2, 2), w = g.uniform(0.7, 1.5);
  return sample(std::move(counts), half_width, [&](const std::vector<double>& x) {
    const double r2 = (x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy);
    return std::exp(-r2 / (2 * w * w)) * std::polar(1.0, kx * x[0]);
  });
}

GridFunction gaussian_1d(int n, double half_width) {
  return sample({n}, half_width, [](const std::vector<double>& x) { return Complex(std::exp(-x[0] * x[0] / 2)); });
}

}  // namespace

TEST(GridFunction, Validation) {
  EXPECT_THROW(GridFunction({12}, 1.0), DomainError);
  EXPECT_THROW(GridFunction({}, 1.0), DomainError);
  EXPECT_THROW(GridFunction({8}, 0.0), DomainError);
  EXPECT_THROW(GridFunction({4}, 1.0, std::vector<Complex>(4, std::nan(""))), DomainError);
  const GridFunction g({4, 8}, 2.0);
  EXPECT_EQ(g.size(), 32u);
  EXPECT_EQ(g.point(0), (std::vector<double>{-2.0, -2.0}));
  EXPECT_EQ(g.point(1), (std::vector<double>{-2.0, -1.5}));
}

TEST(LambdaApply, ZeroIsIdentity) {
  prop::Gen g(61);
  const auto u = random_packet(g, {32, 32}, 10.0);
  EXPECT_LT(max_diff(lambda_apply(u, 0.0), u), 1e-14);
}

TEST(LambdaApply, SingleModeScaling) {
  const auto u = sample({16}, kPi, [](const std::vector<double>& x) { return std::polar(1.0, x[0]); });
  for (double alpha : {1.0, -1.0, 2.5}) {
    auto expected = u;
    expected *= std::pow(2.0, alpha / 2);
    EXPECT_LT(max_diff(lambda_apply(u, alpha), expected), 1e-12);
  }
}

TEST(LambdaApply, InverseAndComposition) {
  prop::Gen g(62);
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = random_packet(g, {32, 32}, 10.0);
    const double a = g.uniform(-2, 2), b = g.uniform(-2, 2);
    EXPECT_LT(max_diff(lambda_apply(lambda_apply(u, a), -a), u), 1e-12);
    EXPECT_LT(max_diff(lambda_apply(lambda_apply(u, a), b), lambda_apply(u, a + b)), 1e-11);
  }
}

TEST(LambdaApply, SelfAdjoint) {
  prop::Gen g(63);
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = random_packet(g, {32, 32}, 10.0), v = random_packet(g, {32, 32}, 10.0);
    const double a = g.uniform(-2, 2);
    const Complex lhs = grid_inner(lambda_apply(u, a), v), rhs = grid_inner(u, lambda_apply(v, a));
    EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(LambdabarApply, Examples) {
  const GridFunction u({8, 8}, 4.0, std::vector<Complex>(64, 1.0));
  EXPECT_LT(max_diff(lambdabar_apply(u, 0.0), u), 1e-15);
  const auto w = lambdabar_apply(u, 2.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto x = u.point(i);
    const double r2 = x[0] * x[0] + x[1] * x[1];
    if (r2 == 0.0) EXPECT_EQ(w[i], Complex(1.0));
    if (r2 == 1.0) EXPECT_NEAR(w[i].real(), 2.0, 1e-15);
  }
}

TEST(WeightedNorm, PlainL2) {
  const auto u = gaussian_1d(256, 20.0);
  // ||e^{-x^2/2}||^2 = sqrt(pi).
  EXPECT_NEAR(weighted_norm(u, 0, 0), std::sqrt(std::sqrt(kPi)), 1e-12);
}

TEST(WeightedNorm, DiscreteDeltaAtOrigin) {
  GridFunction u({64}, 8.0);
  const std::size_t origin = 32;
  ASSERT_EQ(u.point(origin)[0], 0.0);
  u[origin] = 1.0 / std::sqrt(u.spacing(0));
  for (double beta : {0.0, 1.0, 3.0}) EXPECT_NEAR(weighted_norm(u, 0, beta), 1.0, 1e-14);
}

TEST(WeightedNorm, GaussianAgainstAnalyticTransform) {
  // u^(k) = sqrt(2 pi) e^{-k^2/2}, so ||Lambda^2 u||^2 = int (1+k^2)^2 e^{-k^2} dk = 2.75 sqrt(pi).
  const auto u = gaussian_1d(1 << 10, 20.0);
  EXPECT_NEAR(weighted_norm(u, 2, 0), std::sqrt(2.75 * std::sqrt(kPi)), 1e-6);
}

TEST(WeightedNorm, Monotonicity) {
  prop::Gen g(64);
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = random_packet(g, {64, 64}, 12.0);
    const double a = g.uniform(-1, 1), b = g.uniform(-1, 1);
    const double da = g.uniform(0, 1), db = g.uniform(0, 1);
    EXPECT_LE(weighted_norm(u, a, b), weighted_norm(u, a + da, b + db) * (1 + 1e-12));
  }
}

TEST(Polarization, Examples) {
  prop::Gen g(65);
  const auto f = random_packet(g, {32, 32}, 10.0);
  EXPECT_NEAR(polarization_check(f, f, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5).ratio, 1.0, 1e-12);

  const auto e1 = sample({16}, kPi, [](const std::vector<double>& x) { return std::polar(1.0, x[0]); });
  const auto e2 = sample({16}, kPi, [](const std::vector<double>& x) { return std::polar(1.0, 2 * x[0]); });
  EXPECT_LT(polarization_check(e1, e2, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0).ratio, 1e-14);

  EXPECT_THROW(polarization_check(f, f, 1.0, 0.0, 1.0, 0.0, 0.5, 0.0), DomainError);
}

TEST(Polarization, EnsembleRatioStaysBounded) {
  prop::Gen g(66);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_packet(g, {64, 64}, 12.0), h = random_packet(g, {64, 64}, 12.0);
    worst = std::max(worst, polarization_check(f, h, 0.5, 0.5, 1.5, 0.5, -0.5, 0.5).ratio);
  }
  // With equal beta the split only moves powers of Lambda, so Cauchy-Schwarz gives 1.
  EXPECT_GT(worst, 0.0);
  EXPECT_LE(worst, 1.0 + 1e-12);
}

TEST(HermiteFunction, Orthonormal) {
  const int n = 512;
  const double L = 20.0, h = 2 * L / n;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        const double x = -L + i * h;
        s += hermite_function(a, x) * hermite_function(b, x) * h;
      }
      EXPECT_NEAR(s, a == b ? 1.0 : 0.0, 1e-12);
    }
  EXPECT_NEAR(hermite_function(0, 0.0), std::pow(kPi, -0.25), 1e-15);
  EXPECT_THROW(hermite_function(-1, 0.0), DomainError);
}

TEST(ApplyGenerator, GroundStateIsAnnihilated) {
  OscParams p;
  const auto spec = oscillator_spec(p);
  const auto u = sample({128, 128}, 16.0, [](const std::vector<double>& x) {
    return Complex(hermite_function(0, x[0]) * hermite_function(0, x[1]));
  });
  EXPECT_LT(weighted_norm(apply_generator(spec, u), 0, 0), 1e-10);
}

TEST(ApplyGenerator, MatchesFockMatrixOnHermiteProducts) {
  OscParams p;
  p.alpha = 1.5;
  p.eps = 0.2;
  const auto spec = oscillator_spec(p);
  const auto basis = FockBasis::total_level(2, 10);
  const auto k = oscillator_matrix(p, basis);
  auto product = [](int n, int m) {
    return sample({128, 128}, 16.0, [n, m](const std::vector<double>& x) {
      return Complex(hermite_function(n, x[0]) * hermite_function(m, x[1]));
    });
  };
  for (const auto [n, m] : {std::pair{0, 0}, {1, 0}, {2, 1}, {0, 3}}) {
    const std::size_t col = *basis.find(std::vector<int>{n, m});
    GridFunction expected({128, 128}, 16.0);
    for (const auto& t : k.triplets())
      if (t.col == col) {
        auto term = product(basis.index(t.row)[0], basis.index(t.row)[1]);
        term *= t.value;
        expected += term;
      }
    EXPECT_LT(max_diff(apply_generator(spec, product(n, m)), expected), 1e-9) << n << " " << m;
  }
}

TEST(Ensemble, DefaultHas64Members) {
  const auto e = default_ensemble({256, 256}, 20.0);
  ASSERT_GE(e.size(), 64u);
  for (const auto& m : e) EXPECT_LT(boundary_mass_fraction(m.u), 1e-8) << m.label;
  const auto again = default_ensemble({256, 256}, 20.0);
  EXPECT_EQ(max_diff(e.back().u, again.back().u), 0.0);
}

TEST(Probe, TrivialExponentsBoundRatioByOne) {
  OscParams p;
  EnsembleSpec es;
  es.hermite_max_level = 2;
  es.wave_packets = 4;
  const auto ensemble = default_ensemble({64, 64}, 16.0, es);
  ProbeSettings s;
  s.delta = 0.0;
  s.eps = 0.0;
  s.ys = {0.0, 5.0};
  const auto r = hypoellipticity_probe(oscillator_spec(p), ensemble, s);
  for (const auto& rep : r.per_y)
    for (double ratio : rep.ratios) EXPECT_LE(ratio, 1.0 + 1e-12);
  EXPECT_LT(r.max_scaling_defect, 1e-10);
}

TEST(Probe, GroundStateRatioMatchesGaussianNorms) {
  OscParams p;
  const auto u = sample({128, 128}, 16.0, [](const std::vector<double>& x) {
    return Complex(hermite_function(0, x[0]) * hermite_function(0, x[1]));
  });
  ProbeSettings s;
  s.ys = {0.0};
  const auto r = hypoellipticity_probe(oscillator_spec(p), {{"ground", u}}, s);
  const double expected = weighted_norm(u, 0.1, 0.1) / weighted_norm(u, 0.0, 0.1);
  EXPECT_NEAR(r.per_y[0].ratios[0], expected, 1e-9);
}

TEST(Probe, Errors) {
  OscParams p;
  EXPECT_THROW(hypoellipticity_probe(oscillator_spec(p), {}, ProbeSettings{}), ProbeError);
  const GridFunction edge({16, 16}, 4.0, std::vector<Complex>(256, 1.0));
  EXPECT_THROW(hypoellipticity_probe(oscillator_spec(p), {{"flat", edge}}, ProbeSettings{}), ProbeError);
  const GridFunction wrong({16}, 4.0);
  EXPECT_THROW(apply_generator(oscillator_spec(p), wrong), DomainError);
}
