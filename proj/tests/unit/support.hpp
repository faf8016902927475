#pragma once

// Seeded generators for property tests.

#include <complex>
#include <random>
#include <vector>

#include "hypo/fock.hpp"
#include "hypo/symbolic.hpp"

namespace hypo::prop {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>()(rng_); }
  Complex complex() { return {normal(), normal()}; }

  FockVector vector(const FockBasis& b) {
    FockVector v = FockVector::zero(b);
    for (std::size_t i = 0; i < b.dim(); ++i) v[i] = complex();
    return v;
  }

  SparseOperator sparse(const FockBasis& b, double density) {
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < b.dim(); ++i)
      for (std::size_t j = 0; j < b.dim(); ++j)
        if (uniform(0, 1) < density) t.push_back({i, j, complex()});
    return SparseOperator::from_triplets(b.dim(), b.tag(), std::move(t));
  }

  /// Random polynomial with small integer coefficients and total degree <= max_degree.
  MultiPoly poly(int n_vars, int max_degree, int terms) {
    MultiPoly p(n_vars);
    for (int k = 0; k < terms; ++k) {
      Exponent e(n_vars, 0);
      int budget = integer(0, max_degree);
      for (int i = 0; i < n_vars && budget > 0; ++i) {
        const int d = integer(0, budget);
        e[i] = d;
        budget -= d;
      }
      p += MultiPoly::monomial(n_vars, e, Rational(integer(-3, 3), integer(1, 2)));
    }
    return p;
  }

  PolyVectorField field(int n_vars, int max_degree) {
    PolyVectorField f(n_vars);
    f.zeroth = poly(n_vars, max_degree, 2);
    for (auto& c : f.components) c = poly(n_vars, max_degree, 3);
    return f;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace hypo::prop
