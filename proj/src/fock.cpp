#include "hypo/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace hypo {

namespace {

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (8 * i)) & 0xffu;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Multi-indices of n_modes entries with entries bounded by caps and the given
// total, in descending lexicographic order.
void enumerate_level(int total, std::span<const int> caps, MultiIndex& current, int mode,
                     std::vector<MultiIndex>& out) {
  const int n = static_cast<int>(caps.size());
  if (mode == n - 1) {
    if (total <= caps[mode]) {
      current[mode] = total;
      out.push_back(current);
    }
    return;
  }
  for (int v = std::min(total, caps[mode]); v >= 0; --v) {
    current[mode] = v;
    enumerate_level(total - v, caps, current, mode + 1, out);
  }
}

void check_mode(const FockBasis& basis, int mode) {
  if (mode < 0 || mode >= basis.n_modes()) {
    throw DomainError("mode " + std::to_string(mode) + " out of range for a basis with " +
                      std::to_string(basis.n_modes()) + " modes");
  }
}

void check_same(const SparseOperator& a, const SparseOperator& b) {
  if (a.basis_tag() != b.basis_tag()) throw BasisMismatch("operators act on different bases");
  if (a.dim() != b.dim()) throw BasisMismatch("operator dimensions differ");
}

// Dense single-mode matrix of q^k d^l restricted to levels 0..max_level.
std::vector<std::vector<double>> single_mode_matrix(int max_level, int q_power, int d_power) {
  const int size = max_level + 1 + q_power + d_power;
  auto identity = [size] {
    std::vector<std::vector<double>> m(size, std::vector<double>(size, 0.0));
    for (int i = 0; i < size; ++i) m[i][i] = 1.0;
    return m;
  };
  auto multiply = [size](const std::vector<std::vector<double>>& x,
                         const std::vector<std::vector<double>>& y) {
    std::vector<std::vector<double>> r(size, std::vector<double>(size, 0.0));
    for (int i = 0; i < size; ++i)
      for (int k = 0; k < size; ++k) {
        if (x[i][k] == 0.0) continue;
        for (int j = 0; j < size; ++j) r[i][j] += x[i][k] * y[k][j];
      }
    return r;
  };
  std::vector<std::vector<double>> q(size, std::vector<double>(size, 0.0));
  std::vector<std::vector<double>> d = q;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int n = 1; n < size; ++n) {
    const double s = std::sqrt(static_cast<double>(n)) * inv_sqrt2;
    q[n - 1][n] = s;  // a
    q[n][n - 1] = s;  // a*
    d[n - 1][n] = s;
    d[n][n - 1] = -s;
  }
  auto result = identity();
  for (int i = 0; i < q_power; ++i) result = multiply(result, q);
  for (int i = 0; i < d_power; ++i) result = multiply(result, d);
  result.resize(max_level + 1);
  for (auto& row : result) row.resize(max_level + 1);
  return result;
}

}  // namespace

// ---------------------------------------------------------------- FockBasis

FockBasis FockBasis::per_mode(std::vector<int> cutoffs) {
  if (cutoffs.empty()) throw DomainError("a basis needs at least one mode");
  for (int k : cutoffs)
    if (k < 1) throw DomainError("per-mode cutoffs must be >= 1");
  FockBasis b;
  b.scheme_ = Scheme::PerMode;
  b.n_modes_ = static_cast<int>(cutoffs.size());
  b.cutoffs_ = std::move(cutoffs);
  b.build();
  return b;
}

FockBasis FockBasis::total_level(int n_modes, int max_level) {
  if (n_modes < 1) throw DomainError("a basis needs at least one mode");
  if (max_level < 0) throw DomainError("total-level cutoff must be >= 0");
  FockBasis b;
  b.scheme_ = Scheme::TotalLevel;
  b.n_modes_ = n_modes;
  b.cutoffs_ = {max_level};
  b.build();
  return b;
}

int FockBasis::max_level(int mode) const {
  if (mode < 0 || mode >= n_modes_) throw DomainError("mode out of range");
  return scheme_ == Scheme::TotalLevel ? cutoffs_[0] : cutoffs_[mode] - 1;
}

int FockBasis::level_cutoff() const {
  if (scheme_ == Scheme::TotalLevel) return cutoffs_[0];
  return *std::max_element(cutoffs_.begin(), cutoffs_.end()) - 1;
}

int FockBasis::total_level(std::size_t flat) const {
  const auto& m = indices_.at(flat);
  return std::accumulate(m.begin(), m.end(), 0);
}

void FockBasis::build() {
  std::vector<int> caps(n_modes_);
  for (int i = 0; i < n_modes_; ++i) caps[i] = max_level(i);
  const int top = scheme_ == Scheme::TotalLevel ? cutoffs_[0]
                                                 : std::accumulate(caps.begin(), caps.end(), 0);
  MultiIndex current(n_modes_, 0);
  for (int level = 0; level <= top; ++level) enumerate_level(level, caps, current, 0, indices_);

  radix_.assign(n_modes_, 1);
  for (int i = 1; i < n_modes_; ++i) radix_[i] = radix_[i - 1] * static_cast<std::uint64_t>(caps[i - 1] + 1);
  lookup_.reserve(indices_.size());
  for (std::size_t i = 0; i < indices_.size(); ++i) lookup_.emplace(key(indices_[i]), i);

  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(h, static_cast<std::uint64_t>(scheme_));
  h = fnv1a(h, static_cast<std::uint64_t>(n_modes_));
  for (int k : cutoffs_) h = fnv1a(h, static_cast<std::uint64_t>(k));
  tag_ = h;
}

std::uint64_t FockBasis::key(std::span<const int> levels) const {
  std::uint64_t k = 0;
  for (int i = 0; i < n_modes_; ++i) k += radix_[i] * static_cast<std::uint64_t>(levels[i]);
  return k;
}

std::optional<std::size_t> FockBasis::find(std::span<const int> levels) const {
  if (static_cast<int>(levels.size()) != n_modes_) return std::nullopt;
  int total = 0;
  for (int i = 0; i < n_modes_; ++i) {
    if (levels[i] < 0 || levels[i] > max_level(i)) return std::nullopt;
    total += levels[i];
  }
  if (scheme_ == Scheme::TotalLevel && total > cutoffs_[0]) return std::nullopt;
  auto it = lookup_.find(key(levels));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::string FockBasis::describe() const {
  std::ostringstream os;
  if (scheme_ == Scheme::TotalLevel) {
    os << "TotalLevel(K=" << cutoffs_[0] << ", modes=" << n_modes_ << ")";
  } else {
    os << "PerMode([";
    for (std::size_t i = 0; i < cutoffs_.size(); ++i) os << (i ? "," : "") << cutoffs_[i];
    os << "])";
  }
  return os.str();
}

// ---------------------------------------------------------------- FockVector

FockVector FockVector::vacuum(const FockBasis& basis) {
  FockVector v = zero(basis);
  v[0] = 1.0;
  return v;
}

FockVector FockVector::unit(const FockBasis& basis, std::span<const int> levels) {
  auto idx = basis.find(levels);
  if (!idx) throw DomainError("multi-index outside the truncated basis");
  FockVector v = zero(basis);
  v[*idx] = 1.0;
  return v;
}

double FockVector::norm() const {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::norm(c);
  return std::sqrt(s);
}

FockVector& FockVector::operator+=(const FockVector& other) {
  if (other.tag_ != tag_ || other.dim() != dim()) throw BasisMismatch("vectors live on different bases");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

FockVector& FockVector::operator-=(const FockVector& other) {
  if (other.tag_ != tag_ || other.dim() != dim()) throw BasisMismatch("vectors live on different bases");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

FockVector& FockVector::operator*=(Complex z) {
  for (auto& c : coeffs_) c *= z;
  return *this;
}

FockVector operator+(FockVector a, const FockVector& b) { return a += b; }
FockVector operator-(FockVector a, const FockVector& b) { return a -= b; }
FockVector operator*(Complex z, FockVector v) { return v *= z; }

Complex inner(const FockVector& u, const FockVector& v) {
  if (u.basis_tag() != v.basis_tag() || u.dim() != v.dim())
    throw BasisMismatch("vectors live on different bases");
  Complex s = 0.0;
  for (std::size_t i = 0; i < u.dim(); ++i) s += std::conj(u[i]) * v[i];
  return s;
}

// ---------------------------------------------------------------- SparseOperator

SparseOperator::SparseOperator(std::size_t dim, std::uint64_t tag)
    : dim_(dim), tag_(tag), row_ptr_(dim + 1, 0) {}

SparseOperator SparseOperator::from_triplets(std::size_t dim, std::uint64_t tag,
                                             std::vector<Triplet> triplets) {
  for (const auto& t : triplets)
    if (t.row >= dim || t.col >= dim) throw DomainError("triplet index out of range");
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& x, const Triplet& y) {
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });
  SparseOperator op(dim, tag);
  std::size_t i = 0;
  while (i < triplets.size()) {
    const std::size_t r = triplets[i].row;
    const std::size_t c = triplets[i].col;
    Complex sum = 0.0;
    while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c) sum += triplets[i++].value;
    if (sum != Complex(0.0)) {
      op.cols_.push_back(c);
      op.values_.push_back(sum);
      ++op.row_ptr_[r + 1];
    }
  }
  for (std::size_t r = 0; r < dim; ++r) op.row_ptr_[r + 1] += op.row_ptr_[r];
  return op;
}

SparseOperator SparseOperator::identity(const FockBasis& basis) {
  std::vector<Triplet> t;
  t.reserve(basis.dim());
  for (std::size_t i = 0; i < basis.dim(); ++i) t.push_back({i, i, 1.0});
  return from_triplets(basis.dim(), basis.tag(), std::move(t));
}

Complex SparseOperator::at(std::size_t row, std::size_t col) const {
  if (row >= dim_ || col >= dim_) throw DomainError("matrix index out of range");
  auto begin = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
  auto end = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
  auto it = std::lower_bound(begin, end, col);
  if (it == end || *it != col) return 0.0;
  return values_[static_cast<std::size_t>(it - cols_.begin())];
}

std::vector<Triplet> SparseOperator::triplets() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) t.push_back({r, cols_[k], values_[k]});
  return t;
}

Complex SparseOperator::trace() const {
  Complex s = 0.0;
  for (std::size_t r = 0; r < dim_; ++r) s += at(r, r);
  return s;
}

double SparseOperator::norm1() const {
  std::vector<double> colsum(dim_, 0.0);
  for (std::size_t k = 0; k < values_.size(); ++k) colsum[cols_[k]] += std::abs(values_[k]);
  return dim_ ? *std::max_element(colsum.begin(), colsum.end()) : 0.0;
}

bool SparseOperator::is_real() const {
  return std::all_of(values_.begin(), values_.end(), [](Complex z) { return z.imag() == 0.0; });
}

SparseOperator add(const SparseOperator& a, const SparseOperator& b) {
  check_same(a, b);
  auto t = a.triplets();
  auto tb = b.triplets();
  t.insert(t.end(), tb.begin(), tb.end());
  return SparseOperator::from_triplets(a.dim(), a.basis_tag(), std::move(t));
}

SparseOperator scale(Complex z, const SparseOperator& a) {
  auto t = a.triplets();
  for (auto& e : t) e.value *= z;
  return SparseOperator::from_triplets(a.dim(), a.basis_tag(), std::move(t));
}

SparseOperator compose(const SparseOperator& a, const SparseOperator& b) {
  check_same(a, b);
  const std::size_t n = a.dim();
  auto arp = a.row_ptr(), acol = a.col_index();
  auto av = a.values();
  auto brp = b.row_ptr(), bcol = b.col_index();
  auto bv = b.values();
  std::vector<Triplet> out;
  std::vector<Complex> acc(n, 0.0);
  std::vector<char> touched(n, 0);
  std::vector<std::size_t> pattern;
  for (std::size_t r = 0; r < n; ++r) {
    pattern.clear();
    for (std::size_t ka = arp[r]; ka < arp[r + 1]; ++ka) {
      const std::size_t mid = acol[ka];
      for (std::size_t kb = brp[mid]; kb < brp[mid + 1]; ++kb) {
        const std::size_t c = bcol[kb];
        if (!touched[c]) {
          touched[c] = 1;
          pattern.push_back(c);
        }
        acc[c] += av[ka] * bv[kb];
      }
    }
    std::sort(pattern.begin(), pattern.end());
    for (std::size_t c : pattern) {
      out.push_back({r, c, acc[c]});
      acc[c] = 0.0;
      touched[c] = 0;
    }
  }
  return SparseOperator::from_triplets(n, a.basis_tag(), std::move(out));
}

SparseOperator adjoint(const SparseOperator& a) {
  auto t = a.triplets();
  for (auto& e : t) {
    std::swap(e.row, e.col);
    e.value = std::conj(e.value);
  }
  return SparseOperator::from_triplets(a.dim(), a.basis_tag(), std::move(t));
}

FockVector apply(const SparseOperator& a, const FockVector& v) {
  if (a.basis_tag() != v.basis_tag() || a.dim() != v.dim())
    throw BasisMismatch("operator and vector live on different bases");
  FockVector out(a.dim(), a.basis_tag());
  auto rp = a.row_ptr();
  auto col = a.col_index();
  auto val = a.values();
  for (std::size_t r = 0; r < a.dim(); ++r) {
    Complex s = 0.0;
    for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) s += val[k] * v[col[k]];
    out[r] = s;
  }
  return out;
}

// ---------------------------------------------------------------- constructors

SparseOperator ladder(const FockBasis& basis, int mode, Ladder kind) {
  check_mode(basis, mode);
  std::vector<Triplet> t;
  for (std::size_t j = 0; j < basis.dim(); ++j) {
    MultiIndex target = basis.index(j);
    const int n = target[mode];
    double coeff = 0.0;
    if (kind == Ladder::Lower) {
      if (n == 0) continue;
      coeff = std::sqrt(static_cast<double>(n));
      target[mode] = n - 1;
    } else {
      coeff = std::sqrt(static_cast<double>(n + 1));
      target[mode] = n + 1;
    }
    if (auto i = basis.find(target)) t.push_back({*i, j, coeff});
  }
  return SparseOperator::from_triplets(basis.dim(), basis.tag(), std::move(t));
}

SparseOperator position_op(const FockBasis& basis, int mode) {
  const double s = 1.0 / std::sqrt(2.0);
  return scale(s, add(ladder(basis, mode, Ladder::Lower), ladder(basis, mode, Ladder::Raise)));
}

SparseOperator derivative_op(const FockBasis& basis, int mode) {
  const double s = 1.0 / std::sqrt(2.0);
  return scale(s, add(ladder(basis, mode, Ladder::Lower), scale(-1.0, ladder(basis, mode, Ladder::Raise))));
}

SparseOperator poly_multiplier(const FockBasis& basis, int mode, std::span<const double> coefficients) {
  check_mode(basis, mode);
  const SparseOperator q = position_op(basis, mode);
  SparseOperator power = SparseOperator::identity(basis);
  SparseOperator result = SparseOperator::zero(basis);
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    if (k > 0) power = compose(power, q);
    if (coefficients[k] != 0.0) result = add(result, scale(coefficients[k], power));
  }
  return result;
}

SparseOperator monomial_op(const FockBasis& basis, std::span<const ModeFactor> factors, Complex coefficient) {
  struct Column {
    std::vector<std::pair<int, double>> entries;  // (target level, value)
  };
  std::vector<int> seen;
  std::vector<std::vector<Column>> columns;
  for (const auto& f : factors) {
    check_mode(basis, f.mode);
    if (f.q_power < 0 || f.d_power < 0) throw DomainError("monomial powers must be non-negative");
    if (std::find(seen.begin(), seen.end(), f.mode) != seen.end())
      throw DomainError("each mode may appear once in a monomial");
    seen.push_back(f.mode);
    const int top = basis.max_level(f.mode);
    auto dense = single_mode_matrix(top, f.q_power, f.d_power);
    std::vector<Column> cols(top + 1);
    for (int j = 0; j <= top; ++j)
      for (int i = 0; i <= top; ++i)
        if (dense[i][j] != 0.0) cols[j].entries.emplace_back(i, dense[i][j]);
    columns.push_back(std::move(cols));
  }

  std::vector<Triplet> t;
  if (coefficient == Complex(0.0)) return SparseOperator::zero(basis);
  MultiIndex target;
  for (std::size_t j = 0; j < basis.dim(); ++j) {
    const MultiIndex& source = basis.index(j);
    target = source;
    // depth-first walk over the Cartesian product of per-mode columns
    auto walk = [&](auto&& self, std::size_t f, Complex value) -> void {
      if (f == factors.size()) {
        if (auto i = basis.find(target)) t.push_back({*i, j, value});
        return;
      }
      const int mode = factors[f].mode;
      for (const auto& [level, v] : columns[f][source[mode]].entries) {
        target[mode] = level;
        self(self, f + 1, value * v);
      }
      target[mode] = source[mode];
    };
    walk(walk, 0, coefficient);
  }
  return SparseOperator::from_triplets(basis.dim(), basis.tag(), std::move(t));
}

}  // namespace hypo
