#pragma once

// Closed-form spectral data of the harmonic generator
//   L0 = a*a + alpha (b*a - a*b)
// and first-order perturbation theory in the cubic term q^3 d_p.

#include <vector>

#include "hypo/fock.hpp"

namespace hypo {

enum class Regime { Oscillatory, Degenerate, Overdamped };

struct HarmonicSpectralData {
  double alpha = 0.0;
  Complex lambda_plus, lambda_minus;
  Complex beta_plus, beta_minus;
  Regime regime = Regime::Oscillatory;
};

/// lambda_pm = 1/2 +- i sqrt(4 alpha^2 - 1)/2 and
/// beta_pm = -1/(2 alpha) +- i sqrt(4 alpha^2 - 1)/(2 alpha), with the
/// principal complex square root (real values when alpha < 1/2).
HarmonicSpectralData harmonic_data(double alpha);

/// n lambda_+ + m lambda_-.
Complex exact_eigenvalue(int n, int m, double alpha);

/// Coefficient x in the eigen-ladder a* + x b* with [L0, a* + x b*] = lambda (a* + x b*):
/// x = (1 - lambda)/alpha, i.e. -beta_pm for lambda_pm.
Complex right_ladder_coefficient(const HarmonicSpectralData& h, bool plus);
/// Coefficient y in a* + y b* with [L0^*, a* + y b*] = conj(lambda)(a* + y b*):
/// y = (conj(lambda) - 1)/alpha, i.e. beta_-+ for lambda_pm when alpha > 1/2.
Complex adjoint_ladder_coefficient(const HarmonicSpectralData& h, bool plus);

/// Largest L such that every 2-mode multi-index of total level <= L is kept.
int complete_level(const FockBasis& basis);

/// (c_+^*)^n (c_-^*)^m |vacuum>, with c_pm^* = a* - beta_pm b*.
FockVector eigenvector(int n, int m, double alpha, const FockBasis& basis);
/// (d_+^*)^n (d_-^*)^m |vacuum>, the eigenvector of L0^* paired with eigenvector(n, m).
FockVector adjoint_eigenvector(int n, int m, double alpha, const FockBasis& basis);

struct PerturbationResult {
  int n = 0, m = 0;
  Complex lambda0;
  Complex delta;
  Complex denominator;  // <adjoint_eigenvector, eigenvector>
  int cutoff = 0;
};

/// delta_{n,m} = <psi~, q^3 d_p psi> / <psi~, psi>.  Needs complete_level >= n+m+4.
/// Refuses alpha = 1/2 and pairings smaller than 1e-10 in magnitude.
PerturbationResult delta_nm(int n, int m, double alpha, const FockBasis& basis);

/// -12 n(n-1) conj(lambda_+)/sqrt(4 alpha^2 - 1) + 9 n i alpha/sqrt(4 alpha^2 - 1), alpha > 1/2.
Complex delta_n0_closed(int n, double alpha);

/// {lambda0(n,m) + c eps delta(n,m)} for 0 <= n <= n_max, 0 <= m <= m_max, n-major.
std::vector<Complex> perturbed_spectrum(double alpha, double eps, double c, int n_max, int m_max,
                                        const FockBasis& basis);

}  // namespace hypo
