#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>

#include "hypo/eigensolver.hpp"

namespace hypo {

namespace {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

VectorXcd start_vector(Index n, std::uint64_t salt) {
  VectorXcd v(n);
  std::uint64_t state = 0x9e3779b97f4a7c15ULL ^ salt;
  auto next = [&state] {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<double>((z ^ (z >> 31)) >> 11) * 0x1.0p-53 - 0.5;
  };
  for (Index i = 0; i < n; ++i) v(i) = Complex(next(), next());
  return v / v.norm();
}

// Sort the Schur form by decreasing modulus of the diagonal with adjacent swaps.
void sort_schur(MatrixXcd& t, MatrixXcd& q) {
  const Index m = t.rows();
  for (Index target = 0; target < m; ++target) {
    Index best = target;
    for (Index j = target + 1; j < m; ++j)
      if (std::abs(t(j, j)) > std::abs(t(best, best))) best = j;
    for (Index j = best; j > target; --j) schur_swap(t, q, j - 1);
  }
}

class KrylovSchur {
 public:
  KrylovSchur(const SparseLu& lu, Index m) : lu_(lu), n_(static_cast<Index>(lu.dim())), m_(m) {
    v_ = MatrixXcd::Zero(n_, m_ + 1);
    h_ = MatrixXcd::Zero(m_ + 1, m_);
    v_.col(0) = start_vector(n_, 0);
  }

  // Extend the decomposition from `from` basis vectors to m.
  void expand(Index from) {
    for (Index j = from; j < m_; ++j) {
      const VectorXcd x = v_.col(j);
      auto y = lu_.solve(std::span<const Complex>(x.data(), static_cast<std::size_t>(n_)));
      VectorXcd w = Eigen::Map<VectorXcd>(y.data(), n_);
      const double wnorm = w.norm();
      orthogonalize(w, j + 1, h_.col(j).head(j + 1));
      const double beta = w.norm();
      if (j + 1 == n_) {
        h_(j + 1, j) = 0.0;
        v_.col(j + 1).setZero();
      } else if (beta <= 1e-12 * wnorm) {
        // invariant subspace: continue with a fresh orthogonal direction
        h_(j + 1, j) = 0.0;
        VectorXcd r = start_vector(n_, static_cast<std::uint64_t>(j + 1));
        VectorXcd scratch = VectorXcd::Zero(j + 1);
        orthogonalize(r, j + 1, scratch);
        v_.col(j + 1) = r / r.norm();
      } else {
        h_(j + 1, j) = beta;
        v_.col(j + 1) = w / beta;
      }
    }
  }

  // Schur form of the Rayleigh quotient sorted by decreasing |theta|.
  void schur(MatrixXcd& t, MatrixXcd& q) const {
    schur_decompose(h_.topRows(m_), t, q);
    sort_schur(t, q);
  }

  Eigen::RowVectorXcd coupling(const MatrixXcd& q) const { return h_.row(m_) * q; }

  void restart(const MatrixXcd& t, const MatrixXcd& q, const Eigen::RowVectorXcd& bq, Index p) {
    const MatrixXcd kept = v_.leftCols(m_) * q.leftCols(p);
    const VectorXcd last = v_.col(m_);
    v_.setZero();
    v_.leftCols(p) = kept;
    v_.col(p) = last;
    h_.setZero();
    h_.topLeftCorner(p, p) = t.topLeftCorner(p, p);
    h_.block(p, 0, 1, p) = bq.leftCols(p);
  }

  VectorXcd ritz_vector(const MatrixXcd& q, const VectorXcd& y) const { return v_.leftCols(m_) * (q * y); }

 private:
  template <class Col>
  void orthogonalize(VectorXcd& w, Index count, Col&& coeffs) {
    for (int pass = 0; pass < 2; ++pass) {
      const VectorXcd c = v_.leftCols(count).adjoint() * w;
      w -= v_.leftCols(count) * c;
      coeffs += c;
    }
  }

  const SparseLu& lu_;
  Index n_, m_;
  MatrixXcd v_;  // n x (m+1) orthonormal basis
  MatrixXcd h_;  // (m+1) x m Rayleigh quotient with coupling row
};

}  // namespace

Spectrum arnoldi_eigs(const SparseOperator& a, const ArnoldiOptions& options) {
  const auto n = static_cast<int>(a.dim());
  const int k = options.k;
  const int m = options.max_subspace > 0 ? options.max_subspace : std::min(std::max(4 * k, k + 2), n);
  if (k < 1) throw DomainError("k must be positive");
  if (!(k < m && m <= n))
    throw DomainError("need k < max_subspace <= dim (k=" + std::to_string(k) + ", max_subspace=" +
                      std::to_string(m) + ", dim=" + std::to_string(n) + ")");
  if (!(options.tol > 0.0)) throw DomainError("tolerance must be positive");

  const SparseLu lu(a, options.shift);
  KrylovSchur ks(lu, m);
  MatrixXcd t, q;
  Eigen::RowVectorXcd bq;
  std::vector<VectorXcd> ys(static_cast<std::size_t>(k));
  Index from = 0;
  int converged = 0;
  for (int restart = 0;; ++restart) {
    ks.expand(from);
    ks.schur(t, q);
    bq = ks.coupling(q);
    const double tnorm = t.cwiseAbs().maxCoeff();
    converged = 0;
    for (int i = 0; i < k; ++i) {
      ys[i] = triangular_eigenvector(t, i);
      const double res = std::abs((bq * ys[i]).value()) / ys[i].norm();
      const double bound = std::max(options.tol * std::abs(t(i, i)), 1e-15 * tnorm);
      if (res <= bound) ++converged;
    }
    if (converged == k) break;
    if (restart >= options.max_restarts)
      throw SolverError("Krylov-Schur did not converge after " + std::to_string(options.max_restarts) +
                        " restarts (" + std::to_string(converged) + " of " + std::to_string(k) + " converged)");
    const Index p = std::min<Index>(k + (m - k) / 2, m - 1);
    ks.restart(t, q, bq, p);
    from = p;
  }

  Spectrum s;
  std::ostringstream prov;
  prov << "arnoldi(shift=" << options.shift.real() << (options.shift.imag() < 0 ? "" : "+") << options.shift.imag()
       << "i, k=" << k << ")";
  s.provenance = prov.str();
  s.threshold = kResolvedRelative * std::max(a.norm1(), std::numeric_limits<double>::min());
  for (int i = 0; i < k; ++i) {
    const Complex lambda = options.shift + 1.0 / t(i, i);
    VectorXcd x = ks.ritz_vector(q, ys[i]);
    x /= x.norm();
    const double res = residual(a, lambda, std::span<const Complex>(x.data(), a.dim()));
    s.eigenvalues.push_back(lambda);
    s.residuals.push_back(res);
    s.resolved.push_back(res <= s.threshold);
  }
  return s;
}

}  // namespace hypo
