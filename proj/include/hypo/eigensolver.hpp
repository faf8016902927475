#pragma once

// Eigenvalues of truncated non-self-adjoint operators.
//
// dense_eigs: diagonal balancing, Hessenberg reduction and single-shift
// complex QR with Wilkinson shifts; eigenvectors by back-substitution in the
// Schur basis.  arnoldi_eigs: Krylov-Schur iteration on (A - shift)^-1 with a
// sparse LU factorization.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hypo/fock.hpp"

namespace hypo {

constexpr double kResolvedRelative = 1e-6;

struct Spectrum {
  std::vector<Complex> eigenvalues;
  /// ||A v - lambda v|| / ||v||, when an eigenvector was computed.
  std::vector<std::optional<double>> residuals;
  std::vector<bool> resolved;
  std::string provenance;  // "dense" or "arnoldi(shift=..., k=...)"
  double threshold = 0.0;  // residual bound for `resolved`

  std::size_t size() const { return eigenvalues.size(); }
  std::vector<Complex> resolved_eigenvalues() const;
};

struct DenseOptions {
  std::size_t dense_limit = 3000;
  /// QR sweeps allowed per eigenvalue (total cap = factor * dim).
  int iterations_per_eigenvalue = 30;
  bool compute_residuals = true;
};

/// All eigenvalues, ordered by (Re, Im).  Throws SolverError on QR
/// non-convergence, naming the index that failed to deflate.
Spectrum dense_eigs(const SparseOperator& a, const DenseOptions& options = {});

struct ArnoldiOptions {
  Complex shift = 0.0;
  int k = 6;
  /// 0 selects min(max(4k, k + 2), dim).  Values up to dim are accepted.
  int max_subspace = 0;
  double tol = 1e-12;  // relative Ritz residual in the inverted operator
  int max_restarts = 500;
};

/// The k eigenvalues nearest `shift`, ordered by distance to it.
Spectrum arnoldi_eigs(const SparseOperator& a, const ArnoldiOptions& options);

/// ||A v - lambda v||_2 / ||v||_2.
double residual(const SparseOperator& a, Complex lambda, std::span<const Complex> v);

/// Sparse LU of A - shift I with a fill-reducing column ordering.
class SparseLu {
 public:
  SparseLu(const SparseOperator& a, Complex shift = 0.0);
  ~SparseLu();
  SparseLu(SparseLu&&) noexcept;
  SparseLu& operator=(SparseLu&&) noexcept;

  std::size_t dim() const { return dim_; }
  std::vector<Complex> solve(std::span<const Complex> b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t dim_;
};

/// Eigenvector for an eigenvalue estimate by inverse iteration.
std::vector<Complex> inverse_iteration(const SparseOperator& a, Complex lambda, int iterations = 3);

/// Dense copy.
Eigen::MatrixXcd to_dense(const SparseOperator& a);

/// Complex Schur form of an upper Hessenberg matrix: on return h is upper
/// triangular and z has been multiplied by the accumulated unitary factor.
/// Throws SolverError if the active block ending at some index does not
/// deflate within `max_iterations` sweeps in total.
void hessenberg_qr(Eigen::MatrixXcd& h, Eigen::MatrixXcd& z, int max_iterations);

/// Schur form A = Z T Z^H of a general square matrix.
void schur_decompose(const Eigen::MatrixXcd& a, Eigen::MatrixXcd& t, Eigen::MatrixXcd& z,
                     int iterations_per_eigenvalue = 30);

/// Swap the diagonal entries j and j+1 of an upper triangular T, updating Z.
void schur_swap(Eigen::MatrixXcd& t, Eigen::MatrixXcd& z, Eigen::Index j);

/// Eigenvector of upper triangular T for the diagonal entry k (supported on 0..k).
Eigen::VectorXcd triangular_eigenvector(const Eigen::MatrixXcd& t, Eigen::Index k);

/// Permutation pairing a[i] with b[perm[i]] that minimizes the total distance.
std::vector<std::size_t> match_multisets(std::span<const Complex> a, std::span<const Complex> b);
/// Largest |a[i] - b[perm[i]]| under the optimal matching; sizes must agree.
double matched_distance(std::span<const Complex> a, std::span<const Complex> b);

struct TruncationReport {
  int cutoff_small = 0, cutoff_large = 0;
  double tolerance = 1e-6;
  std::vector<Complex> stable;    // eigenvalues reproduced at the larger cutoff
  std::vector<Complex> drifting;  // eigenvalues without a partner within tolerance
  double max_stable_drift = 0.0;
};

/// Pairs each eigenvalue of `small` with a distinct nearest eigenvalue of
/// `large` and classifies it as stable when they agree within `tolerance`.
TruncationReport truncation_convergence(std::span<const Complex> small, std::span<const Complex> large,
                                        int cutoff_small, int cutoff_large, double tolerance = 1e-6);

}  // namespace hypo
