#include "hypo/symbolic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace hypo {

namespace {

std::string rational_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  // Exact dyadic fractions from doubles are unreadable; print the value.
  if (denominator(r) > 1000000) {
    std::ostringstream os;
    os.precision(12);
    os << r.convert_to<double>();
    return os.str();
  }
  return numerator(r).str() + "/" + denominator(r).str();
}

std::string default_name(int i) { return "x" + std::to_string(i); }

}  // namespace

Rational to_rational(double v) {
  if (!std::isfinite(v)) throw DomainError("non-finite coefficient");
  return Rational(v);
}

// ---------------------------------------------------------------- MultiPoly

MultiPoly MultiPoly::constant(int n_vars, const Rational& c) {
  MultiPoly p(n_vars);
  p.add_term(Exponent(n_vars, 0), c);
  return p;
}

MultiPoly MultiPoly::variable(int n_vars, int var) {
  if (var < 0 || var >= n_vars) throw DomainError("variable index out of range");
  Exponent e(n_vars, 0);
  e[var] = 1;
  return monomial(n_vars, std::move(e), 1);
}

MultiPoly MultiPoly::monomial(int n_vars, Exponent exps, const Rational& c) {
  if (static_cast<int>(exps.size()) != n_vars) throw DomainError("exponent length mismatch");
  MultiPoly p(n_vars);
  p.add_term(exps, c);
  return p;
}

MultiPoly MultiPoly::univariate(int n_vars, int var, std::span<const double> coefficients) {
  if (var < 0 || var >= n_vars) throw DomainError("variable index out of range");
  MultiPoly p(n_vars);
  Exponent e(n_vars, 0);
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    e[var] = static_cast<int>(k);
    p.add_term(e, to_rational(coefficients[k]));
  }
  return p;
}

int MultiPoly::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
  return d;
}

Rational MultiPoly::coefficient(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

void MultiPoly::add_term(const Exponent& e, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void MultiPoly::check(const MultiPoly& o) const {
  if (o.n_vars_ != n_vars_) throw DomainError("polynomials have different variable counts");
}

MultiPoly MultiPoly::derivative(int var) const {
  if (var < 0 || var >= n_vars_) throw DomainError("variable index out of range");
  MultiPoly d(n_vars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponent f = e;
    --f[var];
    d.add_term(f, c * e[var]);
  }
  return d;
}

double MultiPoly::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_vars_) throw DomainError("evaluation point has wrong dimension");
  double s = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = c.convert_to<double>();
    for (int i = 0; i < n_vars_; ++i)
      for (int k = 0; k < e[i]; ++k) m *= x[i];
    s += m;
  }
  return s;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  check(o);
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  check(o);
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

MultiPoly& MultiPoly::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  a.check(b);
  MultiPoly r(a.n_vars_);
  Exponent e(a.n_vars_);
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      for (int i = 0; i < a.n_vars_; ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  return r;
}

std::string MultiPoly::to_string(std::span<const std::string> names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // highest degree first reads more naturally
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    Rational mag = c < 0 ? Rational(-c) : c;
    os << (first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + "));
    first = false;
    const bool unit = std::all_of(e.begin(), e.end(), [](int k) { return k == 0; });
    if (mag != 1 || unit) os << rational_string(mag);
    bool need_star = (mag != 1 || unit);
    for (int i = 0; i < n_vars_; ++i) {
      if (e[i] == 0) continue;
      os << (need_star ? "*" : "") << (i < static_cast<int>(names.size()) ? names[i] : default_name(i));
      if (e[i] > 1) os << "^" << e[i];
      need_star = true;
    }
  }
  return os.str();
}

MultiPoly compose_univariate(std::span<const double> coefficients, const MultiPoly& argument) {
  MultiPoly r(argument.n_vars());
  for (std::size_t k = coefficients.size(); k-- > 0;) {
    r = r * argument;
    r += MultiPoly::constant(argument.n_vars(), to_rational(coefficients[k]));
  }
  return r;
}

// ---------------------------------------------------------------- fields

PolyVectorField::PolyVectorField(int n_vars) : zeroth(n_vars), components(n_vars, MultiPoly(n_vars)) {}

PolyVectorField::PolyVectorField(MultiPoly z, std::vector<MultiPoly> comps)
    : zeroth(std::move(z)), components(std::move(comps)) {
  if (static_cast<int>(components.size()) != zeroth.n_vars())
    throw DomainError("a vector field needs one component per variable");
  for (const auto& c : components)
    if (c.n_vars() != zeroth.n_vars()) throw DomainError("field components disagree on variable count");
}

bool PolyVectorField::is_zero() const {
  return zeroth.is_zero() && std::all_of(components.begin(), components.end(),
                                         [](const MultiPoly& c) { return c.is_zero(); });
}

MultiPoly PolyVectorField::derive(const MultiPoly& f) const {
  if (f.n_vars() != n_vars()) throw DomainError("variable-count mismatch");
  MultiPoly r(n_vars());
  for (int j = 0; j < n_vars(); ++j)
    if (!components[j].is_zero()) r += components[j] * f.derivative(j);
  return r;
}

std::vector<double> PolyVectorField::first_order_at(std::span<const double> x) const {
  std::vector<double> v(components.size());
  for (std::size_t j = 0; j < components.size(); ++j) v[j] = components[j].evaluate(x);
  return v;
}

PolyVectorField& PolyVectorField::operator+=(const PolyVectorField& o) {
  if (o.n_vars() != n_vars()) throw DomainError("variable-count mismatch");
  zeroth += o.zeroth;
  for (std::size_t j = 0; j < components.size(); ++j) components[j] += o.components[j];
  return *this;
}

PolyVectorField& PolyVectorField::operator*=(const Rational& c) {
  zeroth *= c;
  for (auto& comp : components) comp *= c;
  return *this;
}

std::string PolyVectorField::to_string(std::span<const std::string> names) const {
  std::ostringstream os;
  bool any = false;
  if (!zeroth.is_zero()) {
    os << "(" << zeroth.to_string(names) << ")";
    any = true;
  }
  for (int j = 0; j < n_vars(); ++j) {
    if (components[j].is_zero()) continue;
    os << (any ? " + " : "") << "(" << components[j].to_string(names) << ")*d_"
       << (j < static_cast<int>(names.size()) ? names[j] : default_name(j));
    any = true;
  }
  return any ? os.str() : "0";
}

PolyVectorField coordinate_field(int n_vars, int var, const Rational& scale) {
  PolyVectorField f(n_vars);
  f.components.at(var) = MultiPoly::constant(n_vars, scale);
  return f;
}

PolyVectorField lie_bracket(const PolyVectorField& x, const PolyVectorField& y) {
  if (x.n_vars() != y.n_vars()) throw DomainError("lie_bracket: variable-count mismatch");
  PolyVectorField r(x.n_vars());
  r.zeroth = x.derive(y.zeroth) - y.derive(x.zeroth);
  for (int j = 0; j < x.n_vars(); ++j) r.components[j] = x.derive(y.components[j]) - y.derive(x.components[j]);
  return r;
}

int growth_degree(const MultiPoly& f) { return f.degree(); }

int growth_degree(const PolyVectorField& x) {
  int d = x.zeroth.degree();
  for (const auto& c : x.components) d = std::max(d, c.degree());
  return d;
}

std::optional<Rational> scalar_ratio(const PolyVectorField& a, const PolyVectorField& b) {
  if (a.n_vars() != b.n_vars() || b.is_zero()) return std::nullopt;
  // pick the first nonzero coefficient of b to fix the candidate ratio
  const MultiPoly* pb = &b.zeroth;
  const MultiPoly* pa = &a.zeroth;
  if (pb->is_zero()) {
    for (int j = 0; j < b.n_vars(); ++j)
      if (!b.components[j].is_zero()) {
        pb = &b.components[j];
        pa = &a.components[j];
        break;
      }
  }
  const auto& [exp, coef] = *pb->terms().begin();
  const Rational c = pa->coefficient(exp) / coef;
  if (c == 0) return std::nullopt;
  if (c * b == a) return c;
  return std::nullopt;
}

// ---------------------------------------------------------------- brackets

BracketFamily bracket_closure(const PolyVectorField& x0, const std::vector<PolyVectorField>& xs,
                              int max_rank, bool include_x0) {
  if (max_rank < 1) throw DomainError("bracket rank must be >= 1");
  for (const auto& x : xs)
    if (x.n_vars() != x0.n_vars()) throw DomainError("generators disagree on variable count");

  // Generators in the order X1..Xm, X0 so that mixed brackets read [Xi,X0].
  std::vector<std::pair<PolyVectorField, std::string>> gens;
  for (std::size_t i = 0; i < xs.size(); ++i) gens.emplace_back(xs[i], "X" + std::to_string(i + 1));
  gens.emplace_back(x0, "X0");

  BracketFamily family;
  family.generation = max_rank;
  auto is_new = [&family](const PolyVectorField& f) {
    if (f.is_zero()) return false;
    return std::none_of(family.entries.begin(), family.entries.end(),
                        [&f](const BracketEntry& e) { return scalar_ratio(f, e.field).has_value(); });
  };

  std::vector<BracketEntry> level;
  for (const auto& [field, name] : gens) {
    level.push_back({field, name, 1});
    if (name == "X0" && !include_x0) continue;
    if (is_new(field)) family.entries.push_back({field, name, 1});
  }
  for (int rank = 2; rank <= max_rank; ++rank) {
    std::vector<BracketEntry> next;
    for (const auto& inner : level)
      for (const auto& [field, name] : gens) {
        PolyVectorField b = lie_bracket(inner.field, field);
        if (b.is_zero()) continue;
        BracketEntry entry{std::move(b), "[" + inner.provenance + "," + name + "]", rank};
        if (is_new(entry.field)) family.entries.push_back(entry);
        // Keep every nonzero bracket as a seed: a multiple of a known field can
        // still generate new directions at the next rank.
        const bool seen = std::any_of(next.begin(), next.end(), [&entry](const BracketEntry& e) {
          return scalar_ratio(entry.field, e.field).has_value();
        });
        if (!seen) next.push_back(std::move(entry));
      }
    level = std::move(next);
    if (level.empty()) break;
  }
  return family;
}

namespace {

struct ProvenanceParser {
  const std::string& s;
  std::size_t pos = 0;
  const PolyVectorField& x0;
  const std::vector<PolyVectorField>& xs;

  PolyVectorField parse() {
    if (pos >= s.size()) throw DomainError("unexpected end of provenance string");
    if (s[pos] == '[') {
      ++pos;
      PolyVectorField left = parse();
      expect(',');
      PolyVectorField right = parse();
      expect(']');
      return lie_bracket(left, right);
    }
    expect('X');
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (start == pos) throw DomainError("expected generator index in '" + s + "'");
    const int idx = std::stoi(s.substr(start, pos - start));
    if (idx == 0) return x0;
    if (idx > static_cast<int>(xs.size())) throw DomainError("generator index out of range in '" + s + "'");
    return xs[idx - 1];
  }
  void expect(char c) {
    if (pos >= s.size() || s[pos] != c)
      throw DomainError(std::string("expected '") + c + "' in provenance '" + s + "'");
    ++pos;
  }
};

}  // namespace

PolyVectorField evaluate_provenance(const std::string& provenance, const PolyVectorField& x0,
                                    const std::vector<PolyVectorField>& xs) {
  ProvenanceParser p{provenance, 0, x0, xs};
  PolyVectorField f = p.parse();
  if (p.pos != provenance.size()) throw DomainError("trailing characters in provenance '" + provenance + "'");
  return f;
}

// ---------------------------------------------------------------- non-degeneracy

NondegeneracyReport nondegeneracy_margin(const BracketFamily& family,
                                         const std::vector<std::vector<double>>& samples,
                                         int weight_exponent) {
  if (family.entries.empty()) throw DomainError("non-degeneracy check needs a nonempty family");
  if (samples.empty()) throw DomainError("non-degeneracy check needs sample points");
  const int n = family.entries.front().field.n_vars();

  NondegeneracyReport report;
  report.weight_exponent = weight_exponent;
  report.sigma_min.reserve(samples.size());
  report.note =
      "sampled evidence only; zeroth-order parts are ignored in the margin";
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& x = samples[s];
    if (static_cast<int>(x.size()) != n) throw DomainError("sample point has wrong dimension");
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : family.entries) {
      auto a = e.field.first_order_at(x);
      Eigen::Map<const Eigen::VectorXd> v(a.data(), n);
      gram += v * v.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    double sigma = es.eigenvalues()(0);
    // rank deficiency shows up as round-off around zero
    const double scale = std::max(1.0, gram.trace());
    if (sigma <= 1e-13 * scale) sigma = 0.0;
    report.sigma_min.push_back(sigma);
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    const double weighted = std::pow(1.0 + r2, weight_exponent) * sigma;
    if (weighted < worst) {
      worst = weighted;
      report.worst_sample = s;
    }
  }
  report.margin = worst;
  report.pass = worst > 0.0;
  if (report.pass) report.constant = 1.0 / worst;
  return report;
}

std::vector<std::vector<double>> sample_grid(int n_vars, double half_width, int per_axis) {
  if (n_vars < 1 || per_axis < 1) throw DomainError("sample grid needs positive sizes");
  std::vector<double> axis(per_axis);
  for (int i = 0; i < per_axis; ++i)
    axis[i] = per_axis == 1 ? 0.0 : -half_width + 2.0 * half_width * i / (per_axis - 1);
  std::vector<std::vector<double>> pts;
  std::vector<int> idx(n_vars, 0);
  while (true) {
    std::vector<double> p(n_vars);
    for (int k = 0; k < n_vars; ++k) p[k] = axis[idx[k]];
    pts.push_back(std::move(p));
    int k = 0;
    while (k < n_vars && ++idx[k] == per_axis) idx[k++] = 0;
    if (k == n_vars) break;
  }
  return pts;
}

}  // namespace hypo
