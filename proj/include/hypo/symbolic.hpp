#pragma once

// Exact polynomial algebra for first-order differential operators
//   X = G0(x) + sum_j G_j(x) d_j
// with rational coefficients, and the bracket families used to test
// Hormander-type non-degeneracy.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hypo/common.hpp"

namespace hypo {

using Rational = boost::multiprecision::cpp_rational;
using Exponent = std::vector<int>;

class MultiPoly {
 public:
  explicit MultiPoly(int n_vars = 0) : n_vars_(n_vars) {}

  static MultiPoly constant(int n_vars, const Rational& c);
  static MultiPoly variable(int n_vars, int var);
  static MultiPoly monomial(int n_vars, Exponent exps, const Rational& c);
  /// sum_k coefficients[k] * x_var^k; doubles are converted exactly.
  static MultiPoly univariate(int n_vars, int var, std::span<const double> coefficients);

  int n_vars() const { return n_vars_; }
  const std::map<Exponent, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Maximum total exponent; 0 for constants and for the zero polynomial.
  int degree() const;
  Rational coefficient(const Exponent& e) const;

  MultiPoly derivative(int var) const;
  double evaluate(std::span<const double> x) const;

  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  MultiPoly& operator*=(const Rational& c);
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(const Rational& c, MultiPoly a) { return a *= c; }
  MultiPoly operator-() const { return Rational(-1) * *this; }
  bool operator==(const MultiPoly& o) const { return n_vars_ == o.n_vars_ && terms_ == o.terms_; }

  std::string to_string(std::span<const std::string> names = {}) const;

 private:
  void check(const MultiPoly& o) const;
  void add_term(const Exponent& e, const Rational& c);

  int n_vars_;
  std::map<Exponent, Rational> terms_;
};

/// Substitute a polynomial argument into a univariate polynomial (Horner).
MultiPoly compose_univariate(std::span<const double> coefficients, const MultiPoly& argument);

/// Exact rational value of a finite double.
Rational to_rational(double v);

struct PolyVectorField {
  MultiPoly zeroth;
  std::vector<MultiPoly> components;

  PolyVectorField() = default;
  explicit PolyVectorField(int n_vars);
  PolyVectorField(MultiPoly zeroth, std::vector<MultiPoly> components);

  int n_vars() const { return zeroth.n_vars(); }
  bool is_zero() const;
  /// First-order part acting as a derivation: sum_j G_j d_j f.
  MultiPoly derive(const MultiPoly& f) const;
  /// Coefficient vector (G_1(x), ..., G_n(x)).
  std::vector<double> first_order_at(std::span<const double> x) const;

  PolyVectorField& operator+=(const PolyVectorField& o);
  PolyVectorField& operator*=(const Rational& c);
  friend PolyVectorField operator+(PolyVectorField a, const PolyVectorField& b) { return a += b; }
  friend PolyVectorField operator*(const Rational& c, PolyVectorField a) { return a *= c; }
  bool operator==(const PolyVectorField& o) const = default;

  std::string to_string(std::span<const std::string> names = {}) const;
};

/// The constant field d_var.
PolyVectorField coordinate_field(int n_vars, int var, const Rational& scale = 1);

/// [X, Y] including the zeroth-order parts: components X(Y_j) - Y(X_j),
/// zeroth part X(Y_0) - Y(X_0).
PolyVectorField lie_bracket(const PolyVectorField& x, const PolyVectorField& y);

int growth_degree(const MultiPoly& f);
int growth_degree(const PolyVectorField& x);

/// If a == c * b for a constant c, returns c.
std::optional<Rational> scalar_ratio(const PolyVectorField& a, const PolyVectorField& b);

struct BracketEntry {
  PolyVectorField field;
  std::string provenance;  // e.g. "[[X1,X0],X0]"
  int rank;                // number of generators in the bracket
};

struct BracketFamily {
  int generation = 0;  // highest rank included
  std::vector<BracketEntry> entries;
};

/// Family {X_i}_{i>=1} (plus X0 when include_x0) together with the left-nested
/// brackets [..[[X_i,X_j],X_k]..] among X_0..X_m of rank up to `max_rank`.
/// Zero fields are dropped and fields equal to a constant multiple of an
/// earlier one are deduplicated.
BracketFamily bracket_closure(const PolyVectorField& x0, const std::vector<PolyVectorField>& xs,
                              int max_rank, bool include_x0);

/// Rebuild the field described by a provenance string from the generators
/// (X0 = x0, Xi = xs[i-1]).  Throws DomainError on malformed input.
PolyVectorField evaluate_provenance(const std::string& provenance, const PolyVectorField& x0,
                                    const std::vector<PolyVectorField>& xs);

struct NondegeneracyReport {
  bool pass = false;
  /// min over samples of (1+|x|^2)^N sigma_min(x).
  double margin = 0.0;
  /// 1 / margin when the margin is positive.
  std::optional<double> constant;
  int weight_exponent = 0;
  std::vector<double> sigma_min;  // per sample
  std::size_t worst_sample = 0;
  std::string note;
};

/// Smallest eigenvalue of sum_i A_i(x) A_i(x)^T at every sample, using only
/// first-order coefficients.  A vanishing eigenvalue is reported as FAIL.
NondegeneracyReport nondegeneracy_margin(const BracketFamily& family,
                                         const std::vector<std::vector<double>>& samples,
                                         int weight_exponent);

/// Tensor grid with `per_axis` points on [-half_width, half_width] per variable.
std::vector<std::vector<double>> sample_grid(int n_vars, double half_width, int per_axis);

}  // namespace hypo
