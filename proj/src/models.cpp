#include "hypo/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace hypo {

namespace {

double to_double(const Rational& r) { return r.convert_to<double>(); }

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

std::vector<double> trimmed(std::vector<double> c) {
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  return c;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
  return d;
}

double poly_eval(const std::vector<double>& c, double x) {
  double r = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) r = r * x + c[k];
  return r;
}

int poly_degree(const std::vector<double>& c) { return static_cast<int>(trimmed(c).size()) - 1; }

}  // namespace

// ---------------------------------------------------------------- oscillator

void OscParams::validate() const {
  if (!finite_positive(alpha)) throw DomainError("alpha must be positive");
  if (!std::isfinite(eps) || eps < 0.0) throw DomainError("eps must be non-negative");
  if (!finite_positive(c)) throw DomainError("c must be positive");
  if (physical) {
    const auto& ph = *physical;
    if (!finite_positive(ph.gamma) || !finite_positive(ph.temperature) || !finite_positive(ph.nu))
      throw DomainError("gamma, T and nu must be positive");
    const double expected = 2.0 * std::sqrt(2.0 * ph.temperature) * ph.nu / ph.gamma;
    if (std::abs(expected - alpha) > 1e-12 * std::max(1.0, expected))
      throw DomainError("alpha is inconsistent with the physical parameters");
  }
}

OscParams reduce_params(double gamma, double temperature, double nu, double eps, double c) {
  if (!finite_positive(gamma) || !finite_positive(temperature) || !finite_positive(nu))
    throw DomainError("gamma, T and nu must be positive");
  OscParams p;
  p.alpha = 2.0 * std::sqrt(2.0 * temperature) * nu / gamma;
  p.eps = eps;
  p.c = c;
  p.physical = PhysicalOscillator{gamma, temperature, nu};
  p.validate();
  return p;
}

void GeneratorSpec::validate() const {
  const int n = n_vars();
  if (weights.size() != diffusion.size()) throw DomainError("one weight per diffusion field is required");
  for (const auto& w : weights)
    if (w <= 0) throw DomainError("diffusion weights must be positive");
  auto check = [n](const PolyVectorField& x) {
    if (x.n_vars() != n || static_cast<int>(x.components.size()) != n)
      throw DomainError("field has the wrong number of variables");
  };
  for (const auto& x : diffusion) check(x);
  check(drift);
  if (potential.n_vars() != n) throw DomainError("potential has the wrong number of variables");
}

GeneratorSpec oscillator_spec(const OscParams& p) {
  p.validate();
  constexpr int n = 2;
  const MultiPoly pv = MultiPoly::variable(n, 0);
  const MultiPoly qv = MultiPoly::variable(n, 1);
  const Rational alpha = to_rational(p.alpha);
  const Rational ceps = to_rational(p.c) * to_rational(p.eps);

  GeneratorSpec s;
  s.variables = {"p", "q"};
  s.diffusion = {coordinate_field(n, 0)};
  s.weights = {Rational(1, 2)};
  s.drift = PolyVectorField(n);
  s.drift.components[0] = alpha * qv + ceps * (qv * qv * qv);
  s.drift.components[1] = -(alpha * pv);
  s.potential = Rational(1, 2) * (pv * pv - MultiPoly::constant(n, 1));
  s.notes.push_back("X1 = d_p carries weight 1/2 so that (1/2) X1^T X1 + f = a*a");
  return s;
}

SparseOperator oscillator_matrix(const OscParams& p, const FockBasis& basis) {
  p.validate();
  if (basis.n_modes() != 2) throw BasisMismatch("the oscillator acts on a 2-mode basis");
  const auto a = ladder(basis, 0, Ladder::Lower);
  const auto as = ladder(basis, 0, Ladder::Raise);
  const auto b = ladder(basis, 1, Ladder::Lower);
  const auto bs = ladder(basis, 1, Ladder::Raise);
  SparseOperator l = as * a + p.alpha * (bs * a - as * b);
  if (p.eps != 0.0) {
    const ModeFactor cubic[] = {{0, 0, 1}, {1, 3, 0}};
    l = l + monomial_op(basis, cubic, p.c * p.eps);
  }
  return l;
}

// ---------------------------------------------------------------- chain

std::vector<std::string> ChainParams::variable_names() const {
  std::vector<std::string> names;
  for (int i = 0; i <= n; ++i) names.push_back("p" + std::to_string(i));
  for (int i = 0; i <= n; ++i) names.push_back("q" + std::to_string(i));
  names.push_back("rL");
  names.push_back("rR");
  return names;
}

void ChainParams::validate() const {
  if (n < 0) throw DomainError("chain index N must be non-negative");
  if (!finite_positive(gamma_l) || !finite_positive(gamma_r)) throw DomainError("gamma_L, gamma_R must be positive");
  if (!std::isfinite(lambda_l) || !std::isfinite(lambda_r) || lambda_l == 0.0 || lambda_r == 0.0)
    throw DomainError("lambda_L, lambda_R must be non-zero");
  if (!finite_positive(t_l) || !finite_positive(t_r) || !finite_positive(t_ref))
    throw DomainError("temperatures must be positive");
  for (const auto* v : {&v1, &v2})
    for (double c : *v)
      if (!std::isfinite(c)) throw DomainError("potential coefficients must be finite");
}

namespace {

void check_stability(const ChainParams& p) {
  if (!(p.t_ref > std::max(p.t_l, p.t_r)))
    throw DomainError("stability condition violated: reference temperature must exceed max(T_L, T_R)");
}

}  // namespace

BathCoefficients bath_coefficients(const ChainParams& p) {
  p.validate();
  const double tt = p.t_ref;
  BathCoefficients c{};
  c.b_l = p.gamma_l * (p.t_l - tt) / (p.lambda_l * p.lambda_l * tt * tt);
  c.b_r = p.gamma_r * (p.t_r - tt) / (p.lambda_r * p.lambda_r * tt * tt);
  c.f2_l = p.gamma_l * (p.t_l / tt - 1.0);
  c.f2_r = p.gamma_r * (p.t_r / tt - 1.0);
  return c;
}

MultiPoly hamiltonian_poly(const ChainParams& p) {
  p.validate();
  const int nv = p.n_vars();
  MultiPoly h(nv);
  for (int i = 0; i <= p.n; ++i) {
    const MultiPoly pi = MultiPoly::variable(nv, p.p_index(i));
    h += Rational(1, 2) * (pi * pi);
    h += compose_univariate(p.v1, MultiPoly::variable(nv, p.q_index(i)));
  }
  for (int i = 1; i <= p.n; ++i)
    h += compose_univariate(p.v2, MultiPoly::variable(nv, p.q_index(i)) - MultiPoly::variable(nv, p.q_index(i - 1)));
  return h;
}

MultiPoly gibbs_energy_poly(const ChainParams& p) {
  const int nv = p.n_vars();
  MultiPoly g = hamiltonian_poly(p);
  const MultiPoly rl = MultiPoly::variable(nv, p.rl_index());
  const MultiPoly rr = MultiPoly::variable(nv, p.rr_index());
  const Rational ll = to_rational(p.lambda_l), lr = to_rational(p.lambda_r);
  g += (Rational(1) / (2 * ll * ll)) * (rl * rl) - MultiPoly::variable(nv, p.q_index(0)) * rl;
  g += (Rational(1) / (2 * lr * lr)) * (rr * rr) - MultiPoly::variable(nv, p.q_index(p.n)) * rr;
  return g;
}

double hamiltonian(const ChainParams& p, std::span<const double> point) {
  p.validate();
  const auto np = static_cast<std::size_t>(2 * (p.n + 1));
  if (point.size() != np && point.size() != static_cast<std::size_t>(p.n_vars()))
    throw DomainError("point has the wrong dimension");
  double h = 0.0;
  for (int i = 0; i <= p.n; ++i) {
    const double pi = point[p.p_index(i)];
    h += 0.5 * pi * pi + poly_eval(p.v1, point[p.q_index(i)]);
  }
  for (int i = 1; i <= p.n; ++i) h += poly_eval(p.v2, point[p.q_index(i)] - point[p.q_index(i - 1)]);
  return h;
}

double gibbs_energy(const ChainParams& p, std::span<const double> point) {
  if (point.size() != static_cast<std::size_t>(p.n_vars())) throw DomainError("point has the wrong dimension");
  const double rl = point[p.rl_index()], rr = point[p.rr_index()];
  return hamiltonian(p, point) + rl * rl / (2.0 * p.lambda_l * p.lambda_l) - point[p.q_index(0)] * rl +
         rr * rr / (2.0 * p.lambda_r * p.lambda_r) - point[p.q_index(p.n)] * rr;
}

GeneratorSpec chain_spec(const ChainParams& p) {
  p.validate();
  check_stability(p);
  const int nv = p.n_vars();
  const auto bath = bath_coefficients(p);
  const MultiPoly h = hamiltonian_poly(p);
  auto var = [nv](int i) { return MultiPoly::variable(nv, i); };
  const MultiPoly rl = var(p.rl_index()), rr = var(p.rr_index());
  const MultiPoly q0 = var(p.q_index(0)), qn = var(p.q_index(p.n));
  const Rational ll = to_rational(p.lambda_l), lr = to_rational(p.lambda_r);

  GeneratorSpec s;
  s.variables = p.variable_names();
  // X_{L,R} = lambda sqrt(gamma T) d_r, stored as d_r with weight lambda^2 gamma T.
  s.diffusion = {coordinate_field(nv, p.rl_index()), coordinate_field(nv, p.rr_index())};
  s.weights = {to_rational(p.lambda_l * p.lambda_l * p.gamma_l * p.t_l),
               to_rational(p.lambda_r * p.lambda_r * p.gamma_r * p.t_r)};

  s.drift = PolyVectorField(nv);
  for (int i = 0; i <= p.n; ++i) {
    s.drift.components[p.p_index(i)] += h.derivative(p.q_index(i));
    s.drift.components[p.q_index(i)] -= var(p.p_index(i));
  }
  s.drift.components[p.rl_index()] += to_rational(bath.b_l) * (rl - ll * ll * q0);
  s.drift.components[p.p_index(0)] -= rl;
  s.drift.components[p.rr_index()] += to_rational(bath.b_r) * (rr - lr * lr * qn);
  s.drift.components[p.p_index(p.n)] -= rr;

  const MultiPoly dl = rl - ll * q0, dr = rr - lr * qn;
  s.potential = to_rational(bath.f2_l) * (dl * dl) + to_rational(bath.f2_r) * (dr * dr);
  s.notes.push_back("X_{L,R} stored as d_r with weight lambda^2 gamma T");
  s.notes.push_back("right bath terms use r_R: b_R(r_R - lambda_R^2 q_N) d_rR - r_R d_pN");
  s.notes.push_back("f_{L,R}^2 = gamma (T/T_ref - 1)(r - lambda q)^2, negative under the stability condition");
  return s;
}

SparseOperator chain_matrix(const ChainParams& p, const FockBasis& basis) {
  if (basis.n_modes() != p.n_vars()) throw BasisMismatch("chain basis needs 2(N+1)+2 modes");
  return galerkin_matrix(generator_operator(chain_spec(p)), basis);
}

// ---------------------------------------------------------------- assembly

DiffOperator generator_operator(const GeneratorSpec& spec) {
  spec.validate();
  const int n = spec.n_vars();
  DiffOperator k(n);
  for (std::size_t i = 0; i < spec.diffusion.size(); ++i) {
    const DiffOperator x = DiffOperator::from_field(spec.diffusion[i]);
    k += spec.weights[i] * compose(transpose(x), x);
  }
  k += DiffOperator::from_field(spec.drift);
  k += DiffOperator::multiplication(spec.potential);
  return k;
}

SparseOperator galerkin_matrix(const DiffOperator& op, const FockBasis& basis) {
  if (basis.n_modes() != op.n_vars()) throw BasisMismatch("operator and basis have different variable counts");
  std::vector<Triplet> all;
  std::vector<ModeFactor> factors;
  for (const auto& [beta, coeff] : op.terms()) {
    for (const auto& [e, c] : coeff.terms()) {
      factors.clear();
      for (int i = 0; i < op.n_vars(); ++i)
        if (e[i] != 0 || beta[i] != 0) factors.push_back({i, e[i], beta[i]});
      const auto m = monomial_op(basis, factors, to_double(c));
      auto t = m.triplets();
      all.insert(all.end(), t.begin(), t.end());
    }
  }
  return SparseOperator::from_triplets(basis.dim(), basis.tag(), std::move(all));
}

namespace {

class ComposedBuilder {
 public:
  explicit ComposedBuilder(const FockBasis& basis) : basis_(basis) {}

  SparseOperator multiplier(const MultiPoly& f) {
    SparseOperator r = SparseOperator::zero(basis_);
    for (const auto& [e, c] : f.terms()) {
      SparseOperator m = SparseOperator::identity(basis_);
      for (int i = 0; i < f.n_vars(); ++i)
        for (int k = 0; k < e[i]; ++k) m = m * position(i);
      r = r + to_double(c) * m;
    }
    return r;
  }

  SparseOperator field(const PolyVectorField& x) {
    SparseOperator r = multiplier(x.zeroth);
    for (int j = 0; j < x.n_vars(); ++j)
      if (!x.components[j].is_zero()) r = r + multiplier(x.components[j]) * derivative_op(basis_, j);
    return r;
  }

 private:
  const SparseOperator& position(int mode) {
    auto it = positions_.find(mode);
    if (it == positions_.end()) it = positions_.emplace(mode, position_op(basis_, mode)).first;
    return it->second;
  }

  const FockBasis& basis_;
  std::map<int, SparseOperator> positions_;
};

}  // namespace

SparseOperator assemble_composed(const GeneratorSpec& spec, const FockBasis& basis) {
  spec.validate();
  if (basis.n_modes() != spec.n_vars()) throw BasisMismatch("spec and basis have different variable counts");
  ComposedBuilder build(basis);
  SparseOperator k = build.field(spec.drift) + build.multiplier(spec.potential);
  for (std::size_t i = 0; i < spec.diffusion.size(); ++i) {
    const SparseOperator x = build.field(spec.diffusion[i]);
    k = k + to_double(spec.weights[i]) * (adjoint(x) * x);
  }
  return k;
}

// ---------------------------------------------------------------- assumptions

namespace {

// Log-spaced magnitudes up to 1e3, both signs, plus the origin.
std::vector<double> growth_grid() {
  std::vector<double> xs{0.0};
  constexpr int per_sign = 400;
  for (int i = 0; i < per_sign; ++i) {
    const double x = std::pow(10.0, -3.0 + 6.0 * i / (per_sign - 1));
    xs.push_back(x);
    xs.push_back(-x);
  }
  return xs;
}

// V(x) >= c (1 + x^2)^h - c' with c = half the leading coefficient.
GrowthConstants fit_growth(const std::vector<double>& v, double h, double leading) {
  GrowthConstants g{0.0, 0.0, false};
  if (!(leading > 0.0)) return g;
  g.lower = 0.5 * leading;
  double worst = 0.0;
  for (double x : growth_grid()) worst = std::max(worst, g.lower * std::pow(1.0 + x * x, h) - poly_eval(v, x));
  g.offset = std::max(worst, 0.0) + 1.0;
  g.ok = std::isfinite(g.offset);
  return g;
}

double convexity_minimum(const std::vector<double>& second) {
  const auto c = trimmed(second);
  if (c.empty()) return 0.0;
  const int d = static_cast<int>(c.size()) - 1;
  if (d % 2 == 1 || c.back() < 0.0) return -std::numeric_limits<double>::infinity();
  if (d == 0) return c[0];
  // Critical points of V2'' lie within the Cauchy bound of its derivative.
  const auto third = trimmed(poly_derivative(c));
  double bound = 1.0;
  if (third.size() > 1)
    for (std::size_t k = 0; k + 1 < third.size(); ++k) bound = std::max(bound, 1.0 + std::abs(third[k] / third.back()));
  constexpr int samples = 20001;
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) lo = std::min(lo, poly_eval(c, -bound + 2.0 * bound * i / (samples - 1)));
  return lo;
}

}  // namespace

AssumptionReport check_assumptions(const ChainParams& p) {
  p.validate();
  AssumptionReport r;
  const auto v1 = trimmed(p.v1), v2 = trimmed(p.v2);
  r.degree_v1 = poly_degree(v1);
  r.degree_v2 = poly_degree(v2);
  r.n = r.degree_v1 / 2.0;
  r.m = r.degree_v2 / 2.0;
  const double lead1 = v1.empty() ? 0.0 : v1.back();
  const double lead2 = v2.empty() ? 0.0 : v2.back();

  const bool even1 = r.degree_v1 > 0 && r.degree_v1 % 2 == 0;
  const bool even2 = r.degree_v2 > 0 && r.degree_v2 % 2 == 0;
  r.polynomial_growth = even1 && even2 && lead1 > 0.0 && lead2 > 0.0;
  if (!r.polynomial_growth) r.notes.push_back("potentials need even degree and positive leading coefficient");

  r.convexity_margin = convexity_minimum(poly_derivative(poly_derivative(v2)));
  r.convex_coupling = r.convexity_margin > 0.0;
  if (!r.convex_coupling) r.notes.push_back("V2'' is not bounded below by a positive constant");

  r.ordered_growth = 1.0 < r.n && r.n < r.m;
  if (!r.ordered_growth) r.notes.push_back("growth exponents violate 1 < n < m");

  auto times_x = [](const std::vector<double>& d) {
    std::vector<double> out(d.size() + 1, 0.0);
    for (std::size_t k = 0; k < d.size(); ++k) out[k + 1] = d[k];
    return out;
  };
  r.v1_growth = fit_growth(v1, r.n, lead1);
  r.v1_force = fit_growth(times_x(poly_derivative(v1)), r.n, r.degree_v1 * lead1);
  r.v2_growth = fit_growth(v2, r.m, lead2);
  r.v2_force = fit_growth(times_x(poly_derivative(v2)), r.m, r.degree_v2 * lead2);
  r.asymptotic_growth = r.polynomial_growth && r.v1_growth.ok && r.v1_force.ok && r.v2_growth.ok && r.v2_force.ok;
  r.notes.push_back("growth constants are fitted on a sample grid with |x| <= 1e3");
  return r;
}

}  // namespace hypo
