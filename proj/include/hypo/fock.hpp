#pragma once

// Truncated Hermite/Fock spaces and the sparse operators acting on them.
//
// Each mode carries an orthonormal Hermite basis |n>, on which the ladder
// operators act as a|n> = sqrt(n)|n-1> and a*|n> = sqrt(n+1)|n+1>.  A
// FockBasis keeps a finite set of multi-indices; every operator is the
// Galerkin truncation P A P, i.e. matrix entries that would leave the kept set
// are discarded.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hypo/common.hpp"

namespace hypo {

using MultiIndex = std::vector<int>;

class FockBasis {
 public:
  enum class Scheme { PerMode, TotalLevel };

  /// Mode i keeps levels 0..cutoffs[i]-1.
  static FockBasis per_mode(std::vector<int> cutoffs);
  /// Keeps every multi-index with sum(n_i) <= max_level.
  static FockBasis total_level(int n_modes, int max_level);

  Scheme scheme() const { return scheme_; }
  int n_modes() const { return n_modes_; }
  std::size_t dim() const { return indices_.size(); }
  /// Highest level representable in `mode`.
  int max_level(int mode) const;
  /// Total-level cutoff K (TotalLevel), or the largest per-mode level (PerMode).
  int level_cutoff() const;
  const std::vector<int>& cutoffs() const { return cutoffs_; }

  const MultiIndex& index(std::size_t flat) const { return indices_.at(flat); }
  int total_level(std::size_t flat) const;
  std::optional<std::size_t> find(std::span<const int> levels) const;
  bool contains(std::span<const int> levels) const { return find(levels).has_value(); }

  /// Identifier shared by all bases built with the same scheme and cutoffs.
  std::uint64_t tag() const { return tag_; }
  std::string describe() const;

 private:
  FockBasis() = default;
  void build();
  std::uint64_t key(std::span<const int> levels) const;

  Scheme scheme_ = Scheme::PerMode;
  int n_modes_ = 0;
  std::vector<int> cutoffs_;  // PerMode: K_i; TotalLevel: single entry K
  std::vector<MultiIndex> indices_;
  std::vector<std::uint64_t> radix_;
  std::unordered_map<std::uint64_t, std::size_t> lookup_;
  std::uint64_t tag_ = 0;
};

class FockVector {
 public:
  FockVector(std::size_t dim, std::uint64_t tag) : coeffs_(dim), tag_(tag) {}
  FockVector(std::vector<Complex> coeffs, std::uint64_t tag)
      : coeffs_(std::move(coeffs)), tag_(tag) {}

  static FockVector zero(const FockBasis& basis) { return {basis.dim(), basis.tag()}; }
  static FockVector vacuum(const FockBasis& basis);
  static FockVector unit(const FockBasis& basis, std::span<const int> levels);

  std::size_t dim() const { return coeffs_.size(); }
  std::uint64_t basis_tag() const { return tag_; }
  Complex& operator[](std::size_t i) { return coeffs_[i]; }
  const Complex& operator[](std::size_t i) const { return coeffs_[i]; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  std::span<Complex> coeffs() { return coeffs_; }

  double norm() const;
  FockVector& operator+=(const FockVector& other);
  FockVector& operator-=(const FockVector& other);
  FockVector& operator*=(Complex z);

 private:
  std::vector<Complex> coeffs_;
  std::uint64_t tag_;
};

FockVector operator+(FockVector a, const FockVector& b);
FockVector operator-(FockVector a, const FockVector& b);
FockVector operator*(Complex z, FockVector v);

/// Sesquilinear pairing sum(conj(u_i) v_i).
Complex inner(const FockVector& u, const FockVector& v);

struct Triplet {
  std::size_t row;
  std::size_t col;
  Complex value;
};

/// Complex matrix in compressed-row form.  Entries that are exactly zero are
/// never stored; nothing else is dropped.
class SparseOperator {
 public:
  SparseOperator(std::size_t dim, std::uint64_t tag);
  /// Duplicate (row, col) pairs are summed.
  static SparseOperator from_triplets(std::size_t dim, std::uint64_t tag,
                                      std::vector<Triplet> triplets);
  static SparseOperator identity(const FockBasis& basis);
  static SparseOperator zero(const FockBasis& basis) { return {basis.dim(), basis.tag()}; }

  std::size_t dim() const { return dim_; }
  std::uint64_t basis_tag() const { return tag_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> col_index() const { return cols_; }
  std::span<const Complex> values() const { return values_; }

  Complex at(std::size_t row, std::size_t col) const;
  std::vector<Triplet> triplets() const;

  Complex trace() const;
  /// Maximum absolute column sum.
  double norm1() const;
  bool is_real() const;
  bool operator==(const SparseOperator& other) const = default;

 private:
  std::size_t dim_;
  std::uint64_t tag_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> cols_;
  std::vector<Complex> values_;
};

SparseOperator add(const SparseOperator& a, const SparseOperator& b);
SparseOperator scale(Complex z, const SparseOperator& a);
SparseOperator compose(const SparseOperator& a, const SparseOperator& b);
SparseOperator adjoint(const SparseOperator& a);
FockVector apply(const SparseOperator& a, const FockVector& v);

inline SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) { return add(a, b); }
inline SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) {
  return add(a, scale(-1.0, b));
}
inline SparseOperator operator*(Complex z, const SparseOperator& a) { return scale(z, a); }
inline SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) { return compose(a, b); }
inline FockVector operator*(const SparseOperator& a, const FockVector& v) { return apply(a, v); }

enum class Ladder { Lower, Raise };

SparseOperator ladder(const FockBasis& basis, int mode, Ladder kind);
/// (a + a*)/sqrt(2) on `mode`.
SparseOperator position_op(const FockBasis& basis, int mode);
/// (a - a*)/sqrt(2) on `mode`.
SparseOperator derivative_op(const FockBasis& basis, int mode);
/// sum_k coefficients[k] * position_op^k, built by repeated truncated composition.
SparseOperator poly_multiplier(const FockBasis& basis, int mode,
                               std::span<const double> coefficients);

/// q^q_power d^d_power acting on one mode (derivatives applied first).
struct ModeFactor {
  int mode;
  int q_power;
  int d_power;
};

/// Exact Galerkin truncation P (prod_f q^k d^l) P of a product of single-mode
/// monomials.  Intermediate levels beyond the cutoff are kept while forming
/// each factor, so only the final projection truncates.
SparseOperator monomial_op(const FockBasis& basis, std::span<const ModeFactor> factors,
                           Complex coefficient = 1.0);

}  // namespace hypo
