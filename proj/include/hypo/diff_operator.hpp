#pragma once

#include <map>

#include "hypo/symbolic.hpp"

namespace hypo {

/// Linear differential operator sum_beta c_beta(x) d^beta with polynomial
/// coefficients, kept in normal order (multiplication after differentiation).
class DiffOperator {
 public:
  explicit DiffOperator(int n_vars = 0) : n_vars_(n_vars) {}

  static DiffOperator multiplication(const MultiPoly& f);
  static DiffOperator from_field(const PolyVectorField& x);
  /// The single term c(x) d^beta.
  static DiffOperator term(const Exponent& beta, const MultiPoly& c);

  int n_vars() const { return n_vars_; }
  const std::map<Exponent, MultiPoly>& terms() const { return terms_; }
  int order() const;

  DiffOperator& operator+=(const DiffOperator& o);
  DiffOperator& operator*=(const Rational& c);
  friend DiffOperator operator+(DiffOperator a, const DiffOperator& b) { return a += b; }
  friend DiffOperator operator*(const Rational& c, DiffOperator a) { return a *= c; }
  bool operator==(const DiffOperator& o) const = default;

  /// Apply to a polynomial.
  MultiPoly apply(const MultiPoly& f) const;

 private:
  void add_term(const Exponent& beta, const MultiPoly& c);

  int n_vars_;
  std::map<Exponent, MultiPoly> terms_;
};

/// a o b, normal-ordered with the Leibniz rule.
DiffOperator compose(const DiffOperator& a, const DiffOperator& b);
/// Formal L^2 adjoint: (c d^beta)^T = (-1)^|beta| d^beta o c.
DiffOperator transpose(const DiffOperator& a);

}  // namespace hypo
