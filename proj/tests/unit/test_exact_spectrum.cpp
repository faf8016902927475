#include <cmath>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "hypo/eigensolver.hpp"
#include "hypo/exact_spectrum.hpp"
#include "hypo/models.hpp"
#include "support.hpp"

using namespace hypo;

namespace {

const double kS3 = std::sqrt(3.0);

void expect_near(Complex a, Complex b, double tol) { EXPECT_LT(std::abs(a - b), tol) << a << " vs " << b; }

Complex nearest(const Eigen::VectorXcd& values, Complex z) {
  Complex best = values[0];
  for (Eigen::Index i = 1; i < values.size(); ++i)
    if (std::abs(values[i] - z) < std::abs(best - z)) best = values[i];
  return best;
}

// Oracle: symmetric finite difference of the eigenvalue of L0 + eps q^3 d_p
// nearest lambda0, from an independent dense eigensolver.
Complex finite_difference_delta(int n, int m, double alpha, int cutoff) {
  const auto b = FockBasis::total_level(2, cutoff);
  const double h = 1e-6;
  const Complex z0 = exact_eigenvalue(n, m, alpha);
  OscParams p;
  p.alpha = alpha;
  const auto l0 = oscillator_matrix(p, b);
  p.eps = 1.0;
  const auto v = oscillator_matrix(p, b) - l0;
  Complex shifted[2];
  for (int s = 0; s < 2; ++s) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(to_dense(l0 + scale(s == 0 ? h : -h, v)), false);
    shifted[s] = nearest(es.eigenvalues(), z0);
  }
  return (shifted[0] - shifted[1]) / (2 * h);
}

}  // namespace

TEST(HarmonicData, AlphaOne) {
  const auto h = harmonic_data(1.0);
  expect_near(h.lambda_plus, {0.5, kS3 / 2}, 1e-12);
  expect_near(h.lambda_minus, {0.5, -kS3 / 2}, 1e-12);
  expect_near(h.beta_plus, {-0.5, kS3 / 2}, 1e-12);
  expect_near(h.beta_minus, {-0.5, -kS3 / 2}, 1e-12);
  EXPECT_EQ(h.regime, Regime::Oscillatory);
}

TEST(HarmonicData, Regimes) {
  const auto d = harmonic_data(0.5);
  EXPECT_EQ(d.regime, Regime::Degenerate);
  expect_near(d.lambda_plus, 0.5, 1e-15);
  expect_near(d.lambda_minus, 0.5, 1e-15);
  const auto o = harmonic_data(0.3);
  EXPECT_EQ(o.regime, Regime::Overdamped);
  EXPECT_EQ(o.lambda_plus.imag(), 0.0);
  EXPECT_THROW(harmonic_data(0.0), DomainError);
  EXPECT_THROW(harmonic_data(-1.0), DomainError);
}

TEST(HarmonicData, Identities) {
  prop::Gen g(31);
  for (int trial = 0; trial < 50; ++trial) {
    const double alpha = g.uniform(0.05, 5.0);
    if (std::abs(alpha - 0.5) < 1e-3) continue;
    const auto h = harmonic_data(alpha);
    expect_near(h.lambda_plus + h.lambda_minus, 1.0, 1e-12);
    expect_near(h.lambda_plus, -alpha / h.beta_plus, 1e-12);
    expect_near(h.lambda_minus, -alpha / h.beta_minus, 1e-12);
  }
}

TEST(ExactEigenvalue, Examples) {
  expect_near(exact_eigenvalue(0, 0, 1.0), 0.0, 1e-15);
  for (double alpha : {0.3, 1.0, 3.0}) expect_near(exact_eigenvalue(1, 1, alpha), 1.0, 1e-12);
  expect_near(exact_eigenvalue(2, 1, 1.0), {1.5, kS3 / 2}, 1e-12);
}

TEST(ExactEigenvalue, ConeContainment) {
  for (double alpha : {0.6, 1.0, 2.0, 7.5}) {
    const double slope = std::sqrt(4 * alpha * alpha - 1);
    for (int n = 0; n <= 50; ++n)
      for (int m = 0; n + m <= 50; ++m) {
        const Complex z = exact_eigenvalue(n, m, alpha);
        EXPECT_GE(z.real(), 0.0);
        EXPECT_LE(std::abs(z.imag()), slope * z.real() * (1 + 1e-14) + 1e-14);
      }
  }
}

TEST(Eigenvector, Examples) {
  const auto b = FockBasis::total_level(2, 6);
  const auto v0 = eigenvector(0, 0, 1.0, b);
  EXPECT_EQ(v0[0], Complex(1.0));
  EXPECT_NEAR(v0.norm(), 1.0, 1e-15);
  const auto v1 = eigenvector(1, 0, 1.0, b);
  expect_near(v1[*b.find(std::vector<int>{1, 0})], 1.0, 1e-15);
  // c+* = a* - beta+ b*.
  expect_near(v1[*b.find(std::vector<int>{0, 1})], -harmonic_data(1.0).beta_plus, 1e-12);
  EXPECT_THROW(eigenvector(4, 3, 1.0, b), DomainError);
}

TEST(Eigenvector, IsEigenvectorOfTruncation) {
  for (double alpha : {0.8, 1.0, 2.0, 0.3}) {
    OscParams p;
    p.alpha = alpha;
    const auto b = FockBasis::total_level(2, 10);
    const auto l0 = oscillator_matrix(p, b);
    for (int n = 0; n <= 4; ++n)
      for (int m = 0; m <= 4; ++m) {
        const auto v = eigenvector(n, m, alpha, b);
        EXPECT_LE(residual(l0, exact_eigenvalue(n, m, alpha), v.coeffs()), 1e-10) << alpha << " " << n << " " << m;
        for (std::size_t i = 0; i < b.dim(); ++i)
          if (v[i] != Complex(0.0)) EXPECT_EQ(b.total_level(i), n + m);
      }
  }
}

TEST(Eigenvector, AdjointIsEigenvectorOfAdjoint) {
  for (double alpha : {0.8, 1.0, 2.0}) {
    OscParams p;
    p.alpha = alpha;
    const auto b = FockBasis::total_level(2, 9);
    const auto l0h = adjoint(oscillator_matrix(p, b));
    for (int n = 0; n <= 4; ++n)
      for (int m = 0; m <= 4; ++m)
        EXPECT_LE(residual(l0h, std::conj(exact_eigenvalue(n, m, alpha)), adjoint_eigenvector(n, m, alpha, b).coeffs()),
                  1e-10);
  }
}

TEST(Eigenvector, Biorthogonality) {
  const auto b = FockBasis::total_level(2, 8);
  for (double alpha : {0.8, 1.0, 2.0}) {
    for (int n = 0; n <= 3; ++n)
      for (int m = 0; m <= 3; ++m) {
        const auto dual = adjoint_eigenvector(n, m, alpha, b);
        for (int n2 = 0; n2 <= 3; ++n2)
          for (int m2 = 0; m2 <= 3; ++m2) {
            const Complex pairing = inner(dual, eigenvector(n2, m2, alpha, b));
            if (n == n2 && m == m2)
              EXPECT_GT(std::abs(pairing), 1e-10);
            else
              EXPECT_LT(std::abs(pairing), 1e-10);
          }
      }
  }
}

TEST(Eigenvector, LadderCommutationOnInterior) {
  prop::Gen g(32);
  const double alpha = 1.3;
  OscParams p;
  p.alpha = alpha;
  const auto b = FockBasis::total_level(2, 14);
  const auto l0 = oscillator_matrix(p, b);
  const auto h = harmonic_data(alpha);
  const auto ad = ladder(b, 0, Ladder::Raise), bd = ladder(b, 1, Ladder::Raise);
  for (bool plus : {true, false}) {
    const Complex x = right_ladder_coefficient(h, plus);
    const Complex lambda = plus ? h.lambda_plus : h.lambda_minus;
    const auto c = ad + scale(x, bd);
    const auto comm = l0 * c - c * l0;
    for (int trial = 0; trial < 10; ++trial) {
      FockVector v = g.vector(b);
      for (std::size_t i = 0; i < b.dim(); ++i)
        if (b.total_level(i) > 9) v[i] = 0.0;
      EXPECT_LE((apply(comm, v) - apply(scale(lambda, c), v)).norm(), 1e-10 * v.norm());
    }
  }
}

TEST(DeltaNm, VacuumIsZero) {
  const auto r = delta_nm(0, 0, 1.0, FockBasis::total_level(2, 6));
  EXPECT_EQ(r.delta, Complex(0.0));
  EXPECT_EQ(r.lambda0, Complex(0.0));
}

TEST(DeltaNm, FirstLevels) {
  const auto b = FockBasis::total_level(2, 10);
  expect_near(delta_nm(1, 0, 1.0, b).delta, {0.0, kS3 / 2}, 1e-12);
  expect_near(delta_nm(2, 0, 1.0, b).delta, {-0.5, 1.5 * kS3}, 1e-12);
}

TEST(DeltaNm, MatchesFiniteDifferenceOracle) {
  for (double alpha : {0.8, 1.0, 2.0})
    for (const auto [n, m] : {std::pair{1, 0}, {2, 0}, {3, 0}, {1, 2}, {0, 2}}) {
      const Complex oracle = finite_difference_delta(n, m, alpha, 12);
      const Complex d = delta_nm(n, m, alpha, FockBasis::total_level(2, 12)).delta;
      EXPECT_LT(std::abs(d - oracle), 1e-5 * (1 + std::abs(d))) << alpha << " " << n << " " << m;
    }
}

TEST(DeltaNm, ConjugateSymmetry) {
  const auto b = FockBasis::total_level(2, 14);
  for (double alpha : {0.8, 1.0, 2.0})
    for (int n = 0; n <= 4; ++n)
      for (int m = 0; m <= 4; ++m)
        expect_near(delta_nm(m, n, alpha, b).delta, std::conj(delta_nm(n, m, alpha, b).delta), 1e-8);
}

TEST(DeltaNm, Errors) {
  const auto b = FockBasis::total_level(2, 6);
  EXPECT_THROW(delta_nm(1, 0, 0.5, b), DomainError);
  EXPECT_THROW(delta_nm(2, 1, 1.0, b), DomainError);
  EXPECT_THROW(delta_nm(1, 0, 1.0, FockBasis::total_level(3, 6)), BasisMismatch);
}

TEST(DeltaClosed, Examples) {
  EXPECT_EQ(delta_n0_closed(0, 1.0), Complex(0.0));
  expect_near(delta_n0_closed(1, 1.0), {0.0, 9 / kS3}, 1e-12);
  expect_near(delta_n0_closed(1, 2.0), {0.0, 18 / std::sqrt(15.0)}, 1e-12);
  expect_near(delta_n0_closed(2, 1.0), {-24 * 0.5 / kS3, 24 * (kS3 / 2) / kS3 + 18 / kS3}, 1e-12);
  EXPECT_THROW(delta_n0_closed(1, 0.5), DomainError);
  EXPECT_THROW(delta_n0_closed(1, 0.3), DomainError);
}

TEST(PerturbedSpectrum, Examples) {
  const auto b = FockBasis::total_level(2, 10);
  const auto zero = perturbed_spectrum(1.0, 0.0, 1.0, 2, 3, b);
  ASSERT_EQ(zero.size(), 12u);
  for (int n = 0, k = 0; n <= 2; ++n)
    for (int m = 0; m <= 3; ++m, ++k) EXPECT_EQ(zero[k], exact_eigenvalue(n, m, 1.0));
  const auto one = perturbed_spectrum(1.0, 0.1, 1.0, 1, 0, b);
  ASSERT_EQ(one.size(), 2u);
  expect_near(one[0], 0.0, 1e-15);
  expect_near(one[1], harmonic_data(1.0).lambda_plus + 0.1 * delta_nm(1, 0, 1.0, b).delta, 1e-14);
  EXPECT_THROW(perturbed_spectrum(1.0, 0.1, 1.0, 4, 4, b), DomainError);
}

TEST(CompleteLevel, Examples) {
  EXPECT_EQ(complete_level(FockBasis::total_level(2, 7)), 7);
  EXPECT_EQ(complete_level(FockBasis::per_mode({5, 8})), 4);
}
