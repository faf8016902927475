#pragma once

// Concrete generators: the Langevin oscillator in reduced units and the
// heat-conduction chain coupled to two baths.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hypo/diff_operator.hpp"
#include "hypo/fock.hpp"
#include "hypo/symbolic.hpp"

namespace hypo {

struct PhysicalOscillator {
  double gamma;
  double temperature;
  double nu;
};

struct OscParams {
  double alpha = 1.0;
  double eps = 0.0;
  double c = 1.0;
  std::optional<PhysicalOscillator> physical;

  void validate() const;
};

/// alpha = 2 sqrt(2T) nu / gamma.
OscParams reduce_params(double gamma, double temperature, double nu, double eps, double c = 1.0);

/// K = sum_i w_i X_i^T X_i + X0 + f.
struct GeneratorSpec {
  std::vector<std::string> variables;
  std::vector<PolyVectorField> diffusion;  // X_1..X_m
  std::vector<Rational> weights;           // w_i
  PolyVectorField drift;                   // X0
  MultiPoly potential;                     // f
  std::vector<std::string> notes;

  int n_vars() const { return static_cast<int>(variables.size()); }
  void validate() const;
};

/// Variables (p, q).  X1 = d_p with weight 1/2 and f = (p^2 - 1)/2, so that
/// (1/2) X1^T X1 + f = a*a; X0 = alpha(q d_p - p d_q) + c eps q^3 d_p.
GeneratorSpec oscillator_spec(const OscParams& p);
/// a*a + alpha(b*a - a*b) + c eps q^3 d_p with mode 0 = p, mode 1 = q, as the
/// exact Galerkin truncation.
SparseOperator oscillator_matrix(const OscParams& p, const FockBasis& basis);

struct ChainParams {
  int n = 1;  // particles 0..n
  double gamma_l = 1.0, gamma_r = 1.0;
  double lambda_l = 1.0, lambda_r = 1.0;
  double t_l = 1.0, t_r = 1.0;
  double t_ref = 2.0;  // reference temperature of the weighted space
  std::vector<double> v1{0.0, 0.0, 1.0};  // coefficients of V1, lowest degree first
  std::vector<double> v2{0.0, 0.0, 0.5};

  int n_vars() const { return 2 * (n + 1) + 2; }
  int p_index(int i) const { return i; }
  int q_index(int i) const { return n + 1 + i; }
  int rl_index() const { return 2 * (n + 1); }
  int rr_index() const { return 2 * (n + 1) + 1; }
  std::vector<std::string> variable_names() const;
  /// Parameter ranges only; the reference-temperature stability condition is
  /// checked by the operator builders.
  void validate() const;
};

struct BathCoefficients {
  double b_l, b_r;
  /// f_{L,R}^2 = f2_{l,r} (r - lambda q)^2
  double f2_l, f2_r;
};

BathCoefficients bath_coefficients(const ChainParams& p);

/// Variables ordered (p_0..p_N, q_0..q_N, r_L, r_R).  The drift uses r_R in
/// the right bath terms.
GeneratorSpec chain_spec(const ChainParams& p);
SparseOperator chain_matrix(const ChainParams& p, const FockBasis& basis);

double hamiltonian(const ChainParams& p, std::span<const double> point);
double gibbs_energy(const ChainParams& p, std::span<const double> point);
/// H and G as polynomials in the chain variables (H ignores the bath variables).
MultiPoly hamiltonian_poly(const ChainParams& p);
MultiPoly gibbs_energy_poly(const ChainParams& p);

/// Symbolic K = sum_i w_i X_i^T X_i + X0 + f.
DiffOperator generator_operator(const GeneratorSpec& spec);
/// Exact truncation P K P of a polynomial differential operator; variable i is
/// represented by mode i.
SparseOperator galerkin_matrix(const DiffOperator& op, const FockBasis& basis);
/// The same K assembled by truncated operator algebra (adjoint(X) o X etc.),
/// which differs from galerkin_matrix only near the cutoff.
SparseOperator assemble_composed(const GeneratorSpec& spec, const FockBasis& basis);

struct GrowthConstants {
  double lower;   // c_odd in V >= c (1+x^2)^n - c'
  double offset;  // c_even
  bool ok;
};

struct AssumptionReport {
  int degree_v1 = 0, degree_v2 = 0;
  double n = 0.0, m = 0.0;  // half degrees
  bool polynomial_growth = false;   // even degrees, positive leading terms
  bool convex_coupling = false;     // V2'' > c > 0
  double convexity_margin = 0.0;    // min of V2''
  bool ordered_growth = false;      // 1 < n < m
  bool asymptotic_growth = false;
  GrowthConstants v1_growth{}, v1_force{}, v2_growth{}, v2_force{};
  std::vector<std::string> notes;
};

AssumptionReport check_assumptions(const ChainParams& p);

}  // namespace hypo
