#include "hypo/exact_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hypo {

namespace {

constexpr double kPairingGuard = 1e-10;

void check_alpha(double alpha) {
  if (!std::isfinite(alpha) || alpha <= 0.0) throw DomainError("alpha must be positive");
}

FockVector ladder_power_state(int n, int m, double alpha, const FockBasis& basis, bool adjoint) {
  if (basis.n_modes() != 2) throw BasisMismatch("the harmonic generator acts on a 2-mode basis");
  if (n < 0 || m < 0) throw DomainError("n and m must be non-negative");
  if (complete_level(basis) < n + m)
    throw DomainError("cutoff too small for total level " + std::to_string(n + m));
  const auto h = harmonic_data(alpha);
  const auto as = ladder(basis, 0, Ladder::Raise);
  const auto bs = ladder(basis, 1, Ladder::Raise);
  auto coefficient = [&](bool plus) {
    return adjoint ? adjoint_ladder_coefficient(h, plus) : right_ladder_coefficient(h, plus);
  };
  const SparseOperator plus = as + coefficient(true) * bs;
  const SparseOperator minus = as + coefficient(false) * bs;
  FockVector v = FockVector::vacuum(basis);
  for (int k = 0; k < m; ++k) v = minus * v;
  for (int k = 0; k < n; ++k) v = plus * v;
  return v;
}

}  // namespace

HarmonicSpectralData harmonic_data(double alpha) {
  check_alpha(alpha);
  HarmonicSpectralData h;
  h.alpha = alpha;
  const double disc = 4.0 * alpha * alpha - 1.0;
  const Complex s = std::sqrt(Complex(disc, 0.0));
  const Complex i(0.0, 1.0);
  h.lambda_plus = 0.5 + i * s / 2.0;
  h.lambda_minus = 0.5 - i * s / 2.0;
  h.beta_plus = -1.0 / (2.0 * alpha) + i * s / (2.0 * alpha);
  h.beta_minus = -1.0 / (2.0 * alpha) - i * s / (2.0 * alpha);
  h.regime = disc > 0.0 ? Regime::Oscillatory : (disc == 0.0 ? Regime::Degenerate : Regime::Overdamped);
  return h;
}

Complex exact_eigenvalue(int n, int m, double alpha) {
  if (n < 0 || m < 0) throw DomainError("n and m must be non-negative");
  const auto h = harmonic_data(alpha);
  return static_cast<double>(n) * h.lambda_plus + static_cast<double>(m) * h.lambda_minus;
}

Complex right_ladder_coefficient(const HarmonicSpectralData& h, bool plus) {
  const Complex lambda = plus ? h.lambda_plus : h.lambda_minus;
  return (1.0 - lambda) / h.alpha;
}

Complex adjoint_ladder_coefficient(const HarmonicSpectralData& h, bool plus) {
  const Complex lambda = plus ? h.lambda_plus : h.lambda_minus;
  return (std::conj(lambda) - 1.0) / h.alpha;
}

int complete_level(const FockBasis& basis) {
  if (basis.scheme() == FockBasis::Scheme::TotalLevel) return basis.level_cutoff();
  const auto& k = basis.cutoffs();
  return *std::min_element(k.begin(), k.end()) - 1;
}

FockVector eigenvector(int n, int m, double alpha, const FockBasis& basis) {
  return ladder_power_state(n, m, alpha, basis, false);
}

FockVector adjoint_eigenvector(int n, int m, double alpha, const FockBasis& basis) {
  return ladder_power_state(n, m, alpha, basis, true);
}

PerturbationResult delta_nm(int n, int m, double alpha, const FockBasis& basis) {
  const auto h = harmonic_data(alpha);
  if (h.regime == Regime::Degenerate)
    throw DomainError("perturbation theory is undefined at alpha = 1/2 (Jordan structure)");
  if (basis.n_modes() != 2) throw BasisMismatch("the harmonic generator acts on a 2-mode basis");
  if (n < 0 || m < 0) throw DomainError("n and m must be non-negative");
  if (complete_level(basis) < n + m + 4)
    throw DomainError("cutoff must be at least n + m + 4 = " + std::to_string(n + m + 4));

  const FockVector psi = eigenvector(n, m, alpha, basis);
  const FockVector dual = adjoint_eigenvector(n, m, alpha, basis);
  const ModeFactor cubic[] = {{0, 0, 1}, {1, 3, 0}};
  const FockVector v_psi = monomial_op(basis, cubic) * psi;

  PerturbationResult r;
  r.n = n;
  r.m = m;
  r.lambda0 = exact_eigenvalue(n, m, alpha);
  r.denominator = inner(dual, psi);
  r.cutoff = complete_level(basis);
  if (std::abs(r.denominator) < kPairingGuard)
    throw DomainError("degenerate biorthogonal pairing for (n, m) = (" + std::to_string(n) + ", " +
                      std::to_string(m) + ")");
  r.delta = inner(dual, v_psi) / r.denominator;
  return r;
}

Complex delta_n0_closed(int n, double alpha) {
  check_alpha(alpha);
  if (alpha <= 0.5) throw DomainError("the closed form needs alpha > 1/2");
  if (n < 0) throw DomainError("n must be non-negative");
  const auto h = harmonic_data(alpha);
  const double s = std::sqrt(4.0 * alpha * alpha - 1.0);
  const double nn = static_cast<double>(n);
  return -12.0 * nn * (nn - 1.0) * std::conj(h.lambda_plus) / s + Complex(0.0, 9.0 * nn * alpha / s);
}

std::vector<Complex> perturbed_spectrum(double alpha, double eps, double c, int n_max, int m_max,
                                        const FockBasis& basis) {
  if (n_max < 0 || m_max < 0) throw DomainError("n_max and m_max must be non-negative");
  if (!std::isfinite(eps) || !std::isfinite(c)) throw DomainError("eps and c must be finite");
  const double ceps = c * eps;
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>((n_max + 1) * (m_max + 1)));
  if (ceps != 0.0 && complete_level(basis) < n_max + m_max + 4)
    throw DomainError("cutoff must be at least n_max + m_max + 4");
  for (int n = 0; n <= n_max; ++n)
    for (int m = 0; m <= m_max; ++m) {
      Complex z = exact_eigenvalue(n, m, alpha);
      if (ceps != 0.0) z += ceps * delta_nm(n, m, alpha, basis).delta;
      out.push_back(z);
    }
  return out;
}

}  // namespace hypo
