#include "hypo/diff_operator.hpp"

#include <algorithm>
#include <numeric>

namespace hypo {

namespace {

// All gamma <= alpha componentwise, with the multinomial binomial(alpha, gamma).
void for_each_sub_index(const Exponent& alpha, auto&& fn) {
  Exponent gamma(alpha.size(), 0);
  while (true) {
    Rational binom = 1;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      // binomial(alpha_i, gamma_i), small integers
      long long b = 1;
      for (int k = 1; k <= gamma[i]; ++k) b = b * (alpha[i] - gamma[i] + k) / k;
      binom *= b;
    }
    fn(gamma, binom);
    std::size_t k = 0;
    while (k < alpha.size() && ++gamma[k] > alpha[k]) gamma[k++] = 0;
    if (k == alpha.size()) break;
  }
}

MultiPoly derivative_multi(MultiPoly f, const Exponent& beta) {
  for (std::size_t i = 0; i < beta.size(); ++i)
    for (int k = 0; k < beta[i]; ++k) f = f.derivative(static_cast<int>(i));
  return f;
}

}  // namespace

DiffOperator DiffOperator::multiplication(const MultiPoly& f) {
  DiffOperator op(f.n_vars());
  op.add_term(Exponent(f.n_vars(), 0), f);
  return op;
}

DiffOperator DiffOperator::from_field(const PolyVectorField& x) {
  const int n = x.n_vars();
  DiffOperator op = multiplication(x.zeroth);
  for (int j = 0; j < n; ++j) {
    Exponent e(n, 0);
    e[j] = 1;
    op.add_term(e, x.components[j]);
  }
  return op;
}

int DiffOperator::order() const {
  int d = 0;
  for (const auto& [beta, c] : terms_) d = std::max(d, std::accumulate(beta.begin(), beta.end(), 0));
  return d;
}

void DiffOperator::add_term(const Exponent& beta, const MultiPoly& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(beta);
  if (it == terms_.end()) {
    terms_.emplace(beta, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

DiffOperator& DiffOperator::operator+=(const DiffOperator& o) {
  if (o.n_vars_ != n_vars_) throw DomainError("operators have different variable counts");
  for (const auto& [beta, c] : o.terms_) add_term(beta, c);
  return *this;
}

DiffOperator& DiffOperator::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [beta, p] : terms_) p *= c;
  return *this;
}

MultiPoly DiffOperator::apply(const MultiPoly& f) const {
  MultiPoly r(n_vars_);
  for (const auto& [beta, c] : terms_) r += c * derivative_multi(f, beta);
  return r;
}

DiffOperator DiffOperator::term(const Exponent& beta, const MultiPoly& c) {
  if (static_cast<int>(beta.size()) != c.n_vars()) throw DomainError("derivative order has wrong length");
  DiffOperator op(c.n_vars());
  op.add_term(beta, c);
  return op;
}

DiffOperator compose(const DiffOperator& a, const DiffOperator& b) {
  if (a.n_vars() != b.n_vars()) throw DomainError("operators have different variable counts");
  const std::size_t n = static_cast<std::size_t>(a.n_vars());
  DiffOperator r(a.n_vars());
  // c_a d^alpha o c_b d^beta = sum_gamma C(alpha,gamma) c_a (d^(alpha-gamma) c_b) d^(gamma+beta)
  for (const auto& [alpha, ca] : a.terms())
    for (const auto& [beta, cb] : b.terms())
      for_each_sub_index(alpha, [&](const Exponent& gamma, const Rational& binom) {
        Exponent rest(n), order(n);
        for (std::size_t i = 0; i < n; ++i) {
          rest[i] = alpha[i] - gamma[i];
          order[i] = gamma[i] + beta[i];
        }
        r += DiffOperator::term(order, binom * (ca * derivative_multi(cb, rest)));
      });
  return r;
}

DiffOperator transpose(const DiffOperator& a) {
  const int n = a.n_vars();
  DiffOperator r(n);
  for (const auto& [alpha, c] : a.terms()) {
    const int total = std::accumulate(alpha.begin(), alpha.end(), 0);
    const Rational sign = (total % 2 == 0) ? 1 : -1;
    r += sign * compose(DiffOperator::term(alpha, MultiPoly::constant(n, 1)), DiffOperator::multiplication(c));
  }
  return r;
}

}  // namespace hypo
