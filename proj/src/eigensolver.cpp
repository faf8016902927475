#include "hypo/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace hypo {

namespace {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

constexpr double kUlp = std::numeric_limits<double>::epsilon();

// Rotation G = [[c, s], [-conj(s), c]] with G (x, y)^T = (r, 0)^T.
struct Givens {
  double c;
  Complex s;
};

Givens givens(Complex x, Complex y) {
  if (y == Complex(0.0)) return {1.0, 0.0};
  const double ay = std::abs(y);
  if (x == Complex(0.0)) return {0.0, std::conj(y) / ay};
  const double ax = std::abs(x);
  const double norm = std::hypot(ax, ay);
  return {ax / norm, x * std::conj(y) / (ax * norm)};
}

// Rows i, i+1 of m on columns [c0, c1): left multiplication by G.
void rotate_rows(MatrixXcd& m, Index i, Index c0, Index c1, const Givens& g) {
  for (Index j = c0; j < c1; ++j) {
    const Complex x = m(i, j), y = m(i + 1, j);
    m(i, j) = g.c * x + g.s * y;
    m(i + 1, j) = -std::conj(g.s) * x + g.c * y;
  }
}

// Columns j, j+1 of m on rows [r0, r1): right multiplication by G^H.
void rotate_cols(MatrixXcd& m, Index j, Index r0, Index r1, const Givens& g) {
  for (Index i = r0; i < r1; ++i) {
    const Complex x = m(i, j), y = m(i, j + 1);
    m(i, j) = g.c * x + std::conj(g.s) * y;
    m(i, j + 1) = -g.s * x + g.c * y;
  }
}

// Eigenvalue of the trailing 2x2 block closer to its last diagonal entry.
Complex wilkinson_shift(const MatrixXcd& h, Index iu) {
  const Complex a = h(iu - 1, iu - 1), b = h(iu - 1, iu), c = h(iu, iu - 1), d = h(iu, iu);
  const Complex half = 0.5 * (a - d);
  const Complex disc = std::sqrt(half * half + b * c);
  const Complex e1 = d + half + disc, e2 = d + half - disc;
  return std::abs(e1 - d) <= std::abs(e2 - d) ? e1 : e2;
}

// Diagonal similarity D^-1 A D with powers of two (Parlett-Reinsch).
VectorXcd balance(MatrixXcd& a) {
  const Index n = a.rows();
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(n);
  constexpr double radix = 2.0, sqrdx = radix * radix;
  bool done = false;
  for (int sweep = 0; !done && sweep < 100; ++sweep) {
    done = true;
    for (Index i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (Index j = 0; j < n; ++j)
        if (j != i) {
          c += std::abs(a(j, i));
          r += std::abs(a(i, j));
        }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix, f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        scale(i) *= f;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
  return scale.cast<Complex>();
}

double vector_norm(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

}  // namespace

std::vector<Complex> Spectrum::resolved_eigenvalues() const {
  std::vector<Complex> out;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i)
    if (resolved[i]) out.push_back(eigenvalues[i]);
  return out;
}

MatrixXcd to_dense(const SparseOperator& a) {
  const auto n = static_cast<Index>(a.dim());
  MatrixXcd m = MatrixXcd::Zero(n, n);
  const auto rp = a.row_ptr();
  const auto ci = a.col_index();
  const auto v = a.values();
  for (Index i = 0; i < n; ++i)
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) m(i, static_cast<Index>(ci[k])) = v[k];
  return m;
}

void hessenberg_qr(MatrixXcd& h, MatrixXcd& z, int max_iterations) {
  const Index n = h.rows();
  if (n == 0) return;
  const double hnorm = std::max(h.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  int total = 0, its = 0;
  Index iu = n - 1;
  while (iu > 0) {
    // Find the start of the unreduced block ending at iu.
    Index il = 0;
    for (Index k = iu; k > 0; --k) {
      double scale = std::abs(h(k - 1, k - 1)) + std::abs(h(k, k));
      if (scale == 0.0) scale = hnorm;
      if (std::abs(h(k, k - 1)) <= kUlp * scale) {
        h(k, k - 1) = 0.0;
        il = k;
        break;
      }
    }
    if (il == iu) {
      --iu;
      its = 0;
      continue;
    }
    if (++total > max_iterations)
      throw SolverError("QR iteration did not converge for eigenvalue index " + std::to_string(iu));
    ++its;

    Complex shift;
    if (its % 10 == 0)
      shift = h(iu, iu) + 0.75 * std::abs(h(iu, iu - 1).real()) + 0.75 * std::abs(h(iu, iu - 1).imag());
    else
      shift = wilkinson_shift(h, iu);

    // Implicit single-shift sweep over rows il..iu.
    for (Index k = il; k < iu; ++k) {
      const Givens g = k == il ? givens(h(il, il) - shift, h(il + 1, il)) : givens(h(k, k - 1), h(k + 1, k - 1));
      rotate_rows(h, k, k == il ? il : k - 1, n, g);
      rotate_cols(h, k, 0, std::min(k + 2, iu) + 1, g);
      rotate_cols(z, k, 0, z.rows(), g);
      if (k > il) h(k + 1, k - 1) = 0.0;
    }
  }
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) h(i, j) = 0.0;
}

void schur_decompose(const MatrixXcd& a, MatrixXcd& t, MatrixXcd& z, int iterations_per_eigenvalue) {
  if (a.rows() != a.cols()) throw DomainError("matrix must be square");
  const Index n = a.rows();
  if (n == 0) {
    t = a;
    z = MatrixXcd(0, 0);
    return;
  }
  Eigen::HessenbergDecomposition<MatrixXcd> hd(a);
  t = hd.matrixH();
  z = hd.matrixQ();
  hessenberg_qr(t, z, iterations_per_eigenvalue * static_cast<int>(n));
}

void schur_swap(MatrixXcd& t, MatrixXcd& z, Index j) {
  const Index n = t.rows();
  const Complex t11 = t(j, j), t22 = t(j + 1, j + 1);
  if (t11 == t22) return;
  const Givens g = givens(t(j, j + 1), t22 - t11);
  if (j + 2 < n) rotate_rows(t, j, j + 2, n, g);
  rotate_cols(t, j, 0, j, g);
  t(j, j) = t22;
  t(j + 1, j + 1) = t11;
  rotate_cols(z, j, 0, z.rows(), g);
}

VectorXcd triangular_eigenvector(const MatrixXcd& t, Index k) {
  const Index n = t.rows();
  VectorXcd y = VectorXcd::Zero(n);
  y(k) = 1.0;
  const Complex lambda = t(k, k);
  const double small = std::max(kUlp * t.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  for (Index i = k - 1; i >= 0; --i) {
    Complex s = 0.0;
    for (Index j = i + 1; j <= k; ++j) s += t(i, j) * y(j);
    Complex d = t(i, i) - lambda;
    if (std::abs(d) < small) d = small;
    y(i) = -s / d;
    // rescale to avoid overflow for strongly non-normal blocks
    if (const double m = std::abs(y(i)); m > 1e100) y /= m;
  }
  return y;
}

Spectrum dense_eigs(const SparseOperator& a, const DenseOptions& options) {
  const std::size_t n = a.dim();
  if (n > options.dense_limit)
    throw DomainError("dimension " + std::to_string(n) + " exceeds the dense limit " +
                      std::to_string(options.dense_limit));
  MatrixXcd m = to_dense(a);
  const VectorXcd d = balance(m);
  MatrixXcd t, z;
  schur_decompose(m, t, z, options.iterations_per_eigenvalue);

  Spectrum s;
  s.provenance = "dense";
  s.threshold = kResolvedRelative * std::max(a.norm1(), std::numeric_limits<double>::min());
  std::vector<std::tuple<Complex, std::optional<double>>> pairs;
  for (Index k = 0; k < static_cast<Index>(n); ++k) {
    std::optional<double> res;
    if (options.compute_residuals) {
      VectorXcd v = d.cwiseProduct(z * triangular_eigenvector(t, k));
      v /= v.norm();
      res = residual(a, t(k, k), std::span<const Complex>(v.data(), n));
    }
    pairs.emplace_back(t(k, k), res);
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) {
    const Complex a1 = std::get<0>(x), b1 = std::get<0>(y);
    return a1.real() != b1.real() ? a1.real() < b1.real() : a1.imag() < b1.imag();
  });
  for (const auto& [lambda, res] : pairs) {
    s.eigenvalues.push_back(lambda);
    s.residuals.push_back(res);
    s.resolved.push_back(res.has_value() && *res <= s.threshold);
  }
  return s;
}

double residual(const SparseOperator& a, Complex lambda, std::span<const Complex> v) {
  if (v.size() != a.dim()) throw BasisMismatch("vector length does not match the operator");
  const double nv = vector_norm(v);
  if (nv == 0.0) throw DomainError("residual of the zero vector");
  const auto rp = a.row_ptr();
  const auto ci = a.col_index();
  const auto val = a.values();
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    Complex r = -lambda * v[i];
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) r += val[k] * v[ci[k]];
    s += std::norm(r);
  }
  return std::sqrt(s) / nv;
}

// ---------------------------------------------------------------- sparse LU

struct SparseLu::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>, Eigen::COLAMDOrdering<int>> lu;
};

SparseLu::SparseLu(const SparseOperator& a, Complex shift) : impl_(std::make_unique<Impl>()), dim_(a.dim()) {
  const auto n = static_cast<Index>(a.dim());
  std::vector<Eigen::Triplet<Complex>> t;
  for (const auto& e : a.triplets())
    t.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), e.value);
  if (shift != Complex(0.0))
    for (Index i = 0; i < n; ++i) t.emplace_back(static_cast<int>(i), static_cast<int>(i), -shift);
  Eigen::SparseMatrix<Complex> m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  impl_->lu.analyzePattern(m);
  impl_->lu.factorize(m);
  if (impl_->lu.info() != Eigen::Success)
    throw SolverError("sparse LU failed (matrix singular at the shift?): " + impl_->lu.lastErrorMessage());
}

SparseLu::~SparseLu() = default;
SparseLu::SparseLu(SparseLu&&) noexcept = default;
SparseLu& SparseLu::operator=(SparseLu&&) noexcept = default;

std::vector<Complex> SparseLu::solve(std::span<const Complex> b) const {
  if (b.size() != dim_) throw BasisMismatch("right-hand side has the wrong length");
  const Eigen::Map<const VectorXcd> rhs(b.data(), static_cast<Index>(b.size()));
  VectorXcd x = impl_->lu.solve(rhs);
  if (!x.allFinite()) throw SolverError("sparse LU solve produced non-finite values");
  return {x.data(), x.data() + x.size()};
}

std::vector<Complex> inverse_iteration(const SparseOperator& a, Complex lambda, int iterations) {
  const double scale = std::max(a.norm1(), 1.0);
  const Complex shift = lambda + Complex(1e-10, 1e-10) * scale;
  const SparseLu lu(a, shift);
  std::vector<Complex> v(a.dim());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / std::sqrt(static_cast<double>(i + 1));
  for (int it = 0; it < iterations; ++it) {
    v = lu.solve(v);
    const double nv = vector_norm(v);
    for (auto& z : v) z /= nv;
  }
  return v;
}

// ---------------------------------------------------------------- matching

std::vector<std::size_t> match_multisets(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw DomainError("multisets have different sizes");
  const std::size_t n = a.size();
  // Hungarian algorithm with potentials, 1-based internally.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<bool> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = std::abs(a[i0 - 1] - b[j - 1]) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> perm(n);
  for (std::size_t j = 1; j <= n; ++j)
    if (p[j] != 0) perm[p[j] - 1] = j - 1;
  return perm;
}

double matched_distance(std::span<const Complex> a, std::span<const Complex> b) {
  const auto perm = match_multisets(a, b);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
  return worst;
}

TruncationReport truncation_convergence(std::span<const Complex> small, std::span<const Complex> large,
                                        int cutoff_small, int cutoff_large, double tolerance) {
  TruncationReport r;
  r.cutoff_small = cutoff_small;
  r.cutoff_large = cutoff_large;
  r.tolerance = tolerance;
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < small.size(); ++i)
    for (std::size_t j = 0; j < large.size(); ++j) {
      const double dist = std::abs(small[i] - large[j]);
      if (dist <= tolerance) pairs.emplace_back(dist, i, j);
    }
  std::sort(pairs.begin(), pairs.end());
  std::vector<bool> used_small(small.size()), used_large(large.size());
  for (const auto& [dist, i, j] : pairs) {
    if (used_small[i] || used_large[j]) continue;
    used_small[i] = used_large[j] = true;
    r.max_stable_drift = std::max(r.max_stable_drift, dist);
  }
  for (std::size_t i = 0; i < small.size(); ++i) (used_small[i] ? r.stable : r.drifting).push_back(small[i]);
  return r;
}

}  // namespace hypo
