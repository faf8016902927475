#include "hypo/sde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>

#include <fftw3.h>

namespace hypo {

namespace {

constexpr double kBlowUp = 1e8;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double to_double(const Rational& r) { return static_cast<double>(r); }

std::vector<CompiledPoly> compile(const PolyVectorField& f) {
  std::vector<CompiledPoly> out;
  out.reserve(f.components.size());
  for (const auto& c : f.components) out.emplace_back(c);
  return out;
}

void check_trajectory(const Trajectory& t, double burn_in) {
  if (t.dim <= 0 || t.size() == 0) throw SimulationError("empty trajectory");
  if (!(burn_in >= 0.0 && burn_in < 1.0)) throw DomainError("burn-in fraction must lie in [0, 1)");
}

std::size_t first_kept(const Trajectory& t, double burn_in) {
  return static_cast<std::size_t>(std::floor(burn_in * static_cast<double>(t.size())));
}

std::vector<double> series(const Trajectory& t, const std::function<double(std::span<const double>)>& g,
                           std::size_t begin, std::size_t end) {
  std::vector<double> y;
  y.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) y.push_back(g(t.row(i)));
  return y;
}

// Normalized autocorrelation rho(0..max_lag) of a series, via zero-padded FFT.
std::vector<double> acf(std::vector<double> y, std::size_t max_lag) {
  const std::size_t n = y.size();
  if (n < 2) throw SimulationError("too few samples for an autocorrelation");
  max_lag = std::min(max_lag, n - 1);
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  for (double& v : y) v -= mean;

  std::size_t m = 1;
  while (m < 2 * n) m <<= 1;
  std::vector<double> buf(m, 0.0);
  std::copy(y.begin(), y.end(), buf.begin());
  auto* spec = fftw_alloc_complex(m / 2 + 1);
  // Planning with FFTW_ESTIMATE does not touch the arrays; plan creation is
  // not thread safe, so plans are built under a lock.
  static std::mutex plan_mutex;
  fftw_plan fwd, bwd;
  {
    std::lock_guard lock(plan_mutex);
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(m), buf.data(), spec, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(static_cast<int>(m), spec, buf.data(), FFTW_ESTIMATE);
  }
  fftw_execute(fwd);
  for (std::size_t k = 0; k < m / 2 + 1; ++k) {
    spec[k][0] = spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1];
    spec[k][1] = 0.0;
  }
  fftw_execute(bwd);
  {
    std::lock_guard lock(plan_mutex);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  fftw_free(spec);

  std::vector<double> rho(max_lag + 1);
  const double c0 = buf[0] / static_cast<double>(n);
  if (!(c0 > 0.0)) throw SimulationError("observable has zero variance");
  for (std::size_t k = 0; k <= max_lag; ++k) rho[k] = buf[k] / static_cast<double>(n - k) / c0;
  return rho;
}

// Slope of log(rho) against lag over [lo, hi), least squares weighted by
// rho^2 (the inverse variance of log rho).
std::optional<double> log_slope(const std::vector<double>& rho, std::size_t lo, std::size_t hi, double interval) {
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t k = lo; k < hi && k < rho.size(); ++k) {
    if (!(rho[k] > 0.0)) continue;
    const double w = rho[k] * rho[k];
    const double x = static_cast<double>(k) * interval, y = std::log(rho[k]);
    sw += w;
    sx += w * x;
    sy += w * y;
    sxx += w * x * x;
    sxy += w * x * y;
    ++count;
  }
  if (count < 3) return std::nullopt;
  const double den = sw * sxx - sx * sx;
  if (den == 0.0) return std::nullopt;
  return (sw * sxy - sx * sy) / den;
}

Eigen::MatrixXd quadratic_hessian(const MultiPoly& g) {
  const int n = g.n_vars();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [e, c] : g.terms()) {
    int total = 0;
    std::vector<int> vars;
    for (int i = 0; i < n; ++i) {
      total += e[i];
      for (int k = 0; k < e[i]; ++k) vars.push_back(i);
    }
    if (total != 2) continue;
    const double v = to_double(c);
    if (vars[0] == vars[1]) {
      h(vars[0], vars[0]) += 2.0 * v;
    } else {
      h(vars[0], vars[1]) += v;
      h(vars[1], vars[0]) += v;
    }
  }
  return h;
}

Eigen::MatrixXd metropolis_covariance(const MultiPoly& g, double temperature, std::uint64_t seed) {
  const int n = g.n_vars();
  const CompiledPoly energy(g);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  const double step = 0.5 * std::sqrt(temperature);
  const long long iterations = 4'000'000, burn = iterations / 10;

  std::vector<double> x(n, 0.0), y(n);
  double e = energy(x);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(n, n);
  long long kept = 0;
  for (long long it = 0; it < iterations; ++it) {
    for (int i = 0; i < n; ++i) y[i] = x[i] + step * normal(rng);
    const double ey = energy(y);
    if (ey <= e || uniform(rng) < std::exp(-(ey - e) / temperature)) {
      x.swap(y);
      e = ey;
    }
    if (it < burn) continue;
    const Eigen::Map<const Eigen::VectorXd> v(x.data(), n);
    sum += v;
    outer.noalias() += v * v.transpose();
    ++kept;
  }
  const Eigen::VectorXd mean = sum / static_cast<double>(kept);
  return outer / static_cast<double>(kept) - mean * mean.transpose();
}

}  // namespace

CompiledPoly::CompiledPoly(const MultiPoly& p) {
  for (const auto& [e, c] : p.terms()) {
    Term t{to_double(c), {}};
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i] > 0) t.powers.emplace_back(static_cast<int>(i), e[i]);
    terms_.push_back(std::move(t));
  }
}

double CompiledPoly::operator()(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    double v = t.coefficient;
    for (const auto& [var, k] : t.powers) {
      const double xv = x[var];
      for (int j = 0; j < k; ++j) v *= xv;
    }
    sum += v;
  }
  return sum;
}

void SdeSystem::validate() const {
  const auto n = static_cast<std::size_t>(dim);
  if (dim <= 0) throw DomainError("system dimension must be positive");
  if (names.size() != n || drift.size() != n || damping.size() != n || field.components.size() != n)
    throw DomainError("system components have inconsistent dimensions");
  for (double k : damping)
    if (!(k >= 0.0) || !std::isfinite(k)) throw DomainError("damping rates must be finite and non-negative");
  for (const auto& c : noise) {
    if (c.index < 0 || c.index >= dim) throw DomainError("noise channel index out of range");
    if (!(c.amplitude >= 0.0) || !std::isfinite(c.amplitude))
      throw DomainError("noise amplitudes must be finite and non-negative");
  }
}

SdeSystem oscillator_system(double gamma, double temperature, double nu, double eps) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be positive");
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) throw DomainError("temperature must be non-negative");
  if (!(nu > 0.0) || !std::isfinite(nu)) throw DomainError("nu must be positive");
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw DomainError("eps must be non-negative");

  const MultiPoly p = MultiPoly::variable(2, 0), q = MultiPoly::variable(2, 1);
  const Rational g = to_rational(gamma), n = to_rational(nu), e = to_rational(eps);
  SdeSystem s;
  s.dim = 2;
  s.names = {"p", "q"};
  s.field = PolyVectorField(2);
  s.field.components[0] = -(n * n) * q - e * (q * q * q) - g * p;
  s.field.components[1] = p;
  s.drift = compile(s.field);
  s.damping = {gamma, 0.0};
  s.noise = {{0, std::sqrt(2.0 * gamma * temperature)}};
  s.energy = CompiledPoly(Rational(1, 2) * (p * p) + (n * n / 2) * (q * q) + (e / 4) * (q * q * q * q));
  return s;
}

SdeSystem chain_system(const ChainParams& p) {
  p.validate();
  const int nv = p.n_vars();
  const MultiPoly h = hamiltonian_poly(p);
  auto var = [nv](int i) { return MultiPoly::variable(nv, i); };
  const Rational gl = to_rational(p.gamma_l), gr = to_rational(p.gamma_r);
  const Rational ll = to_rational(p.lambda_l), lr = to_rational(p.lambda_r);

  SdeSystem s;
  s.dim = nv;
  s.names = p.variable_names();
  s.field = PolyVectorField(nv);
  for (int i = 0; i <= p.n; ++i) {
    s.field.components[p.p_index(i)] = -h.derivative(p.q_index(i));
    s.field.components[p.q_index(i)] = var(p.p_index(i));
  }
  s.field.components[p.p_index(0)] += var(p.rl_index());
  s.field.components[p.p_index(p.n)] += var(p.rr_index());
  s.field.components[p.rl_index()] = -gl * var(p.rl_index()) + (ll * ll * gl) * var(p.q_index(0));
  s.field.components[p.rr_index()] = -gr * var(p.rr_index()) + (lr * lr * gr) * var(p.q_index(p.n));
  s.drift = compile(s.field);
  s.damping.assign(nv, 0.0);
  s.damping[p.rl_index()] = p.gamma_l;
  s.damping[p.rr_index()] = p.gamma_r;
  s.noise = {{p.rl_index(), std::abs(p.lambda_l) * std::sqrt(2.0 * p.gamma_l * p.t_l)},
             {p.rr_index(), std::abs(p.lambda_r) * std::sqrt(2.0 * p.gamma_r * p.t_r)}};
  s.energy = CompiledPoly(h);
  return s;
}

SdeSystem ou_system(double kappa, double sigma) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be positive");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be non-negative");
  const MultiPoly x = MultiPoly::variable(1, 0);
  SdeSystem s;
  s.dim = 1;
  s.names = {"x"};
  s.field = PolyVectorField(1);
  s.field.components[0] = -to_rational(kappa) * x;
  s.drift = compile(s.field);
  s.damping = {kappa};
  s.noise = {{0, sigma}};
  s.energy = CompiledPoly(Rational(1, 2) * (x * x));
  return s;
}

double counter_normal(std::uint64_t seed, std::uint64_t channel, std::uint64_t step) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ (channel * 0xD6E8FEB86659FD93ULL));
  h = splitmix64(h ^ step);
  const std::uint64_t h2 = splitmix64(h ^ 0x94D049BB133111EBULL);
  const double u1 = (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = static_cast<double>(h2 >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Trajectory integrate(const SdeSystem& system, const IntegrateOptions& options) {
  system.validate();
  if (!(options.dt > 0.0) || !std::isfinite(options.dt)) throw DomainError("dt must be positive");
  if (options.steps < 0) throw DomainError("steps must be non-negative");
  if (options.stride < 1) throw DomainError("stride must be at least 1");
  if (std::abs(options.noise_sign) != 1.0) throw DomainError("noise sign must be +1 or -1");
  const int n = system.dim;
  if (!options.initial.empty() && options.initial.size() != static_cast<std::size_t>(n))
    throw DomainError("initial state has the wrong dimension");

  std::vector<double> x = options.initial.empty() ? std::vector<double>(n, 0.0) : options.initial;
  const double dt = options.dt, sdt = std::sqrt(dt);
  const bool semi = options.scheme == Scheme::SemiImplicitOu;

  // Per coordinate: noise channels, and the exact OU coefficients when damped.
  std::vector<std::vector<std::pair<std::uint64_t, double>>> channels(n);
  for (std::size_t c = 0; c < system.noise.size(); ++c)
    channels[system.noise[c].index].emplace_back(c, options.noise_sign * system.noise[c].amplitude);
  std::vector<double> decay(n, 1.0), gain(n, dt), spread(n, sdt);
  std::vector<int> damped, explicit_order;
  for (int i = 0; i < n; ++i) {
    const double k = system.damping[i];
    if (semi && k > 0.0) {
      decay[i] = std::exp(-k * dt);
      gain[i] = -std::expm1(-k * dt) / k;
      spread[i] = std::sqrt(-std::expm1(-2.0 * k * dt) / (2.0 * k));
      damped.push_back(i);
    } else {
      explicit_order.push_back(i);
    }
  }

  Trajectory t;
  t.dim = n;
  t.dt = dt;
  t.steps = options.steps;
  t.seed = options.seed;
  t.stride = options.stride;
  t.scheme = options.scheme;
  t.samples.reserve(static_cast<std::size_t>(options.steps / options.stride + 1) * n);
  t.samples.insert(t.samples.end(), x.begin(), x.end());

  auto noise = [&](int i, long long step) {
    double w = 0.0;
    for (const auto& [c, a] : channels[i])
      if (a != 0.0) w += a * counter_normal(options.seed, c, static_cast<std::uint64_t>(step));
    return w;
  };

  std::vector<double> drift(n);
  for (long long step = 1; step <= options.steps; ++step) {
    if (semi) {
      for (int i : damped) {
        const double rest = system.drift[i](x) + system.damping[i] * x[i];
        x[i] = x[i] * decay[i] + rest * gain[i] + spread[i] * noise(i, step);
      }
      for (int i : explicit_order) x[i] += system.drift[i](x) * dt + sdt * noise(i, step);
    } else {
      for (int i = 0; i < n; ++i) drift[i] = system.drift[i](x);
      for (int i = 0; i < n; ++i) x[i] += drift[i] * dt + sdt * noise(i, step);
    }
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(x[i]) || std::abs(x[i]) > kBlowUp) {
        std::ostringstream msg;
        msg << "trajectory blew up at step " << step << " (" << system.names[i] << " = " << x[i] << ")";
        throw SimulationError(msg.str());
      }
    }
    if (step % options.stride == 0) t.samples.insert(t.samples.end(), x.begin(), x.end());
  }
  return t;
}

Estimate time_average(const Trajectory& t, const std::function<double(std::span<const double>)>& g,
                      double burn_in, int batches) {
  check_trajectory(t, burn_in);
  if (batches < 2) throw DomainError("need at least two batches");
  const std::size_t begin = first_kept(t, burn_in);
  const std::size_t kept = t.size() - begin;
  if (kept < 2 * static_cast<std::size_t>(batches)) throw SimulationError("too few samples for batch means");
  const std::size_t per = kept / static_cast<std::size_t>(batches);
  std::vector<double> means(batches, 0.0);
  for (int b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < per; ++i) s += g(t.row(begin + b * per + i));
    means[b] = s / static_cast<double>(per);
  }
  Estimate e;
  for (double m : means) e.mean += m;
  e.mean /= batches;
  double var = 0.0;
  for (double m : means) var += (m - e.mean) * (m - e.mean);
  var /= (batches - 1);
  e.error = std::sqrt(var / batches);
  return e;
}

std::map<std::string, Estimate> stationary_moments(const SdeSystem& system, const Trajectory& t, double burn_in,
                                                   int batches) {
  if (system.dim != t.dim) throw DomainError("trajectory does not match the system");
  std::map<std::string, Estimate> out;
  for (int i = 0; i < t.dim; ++i) {
    out[system.names[i] + "^2"] = time_average(t, [i](auto x) { return x[i] * x[i]; }, burn_in, batches);
    out[system.names[i] + "^4"] = time_average(t, [i](auto x) { return x[i] * x[i] * x[i] * x[i]; }, burn_in, batches);
    for (int j = i + 1; j < t.dim; ++j)
      out[system.names[i] + "*" + system.names[j]] =
          time_average(t, [i, j](auto x) { return x[i] * x[j]; }, burn_in, batches);
  }
  if (system.energy) {
    const CompiledPoly& h = *system.energy;
    out["H"] = time_average(t, [&h](auto x) { return h(x); }, burn_in, batches);
  }
  return out;
}

std::vector<double> autocorrelation(const Trajectory& t, const std::function<double(std::span<const double>)>& g,
                                    double burn_in, std::size_t max_lag) {
  check_trajectory(t, burn_in);
  return acf(series(t, g, first_kept(t, burn_in), t.size()), max_lag);
}

DecayEstimate decay_rate(const Trajectory& t, const std::function<double(std::span<const double>)>& g,
                         double burn_in) {
  check_trajectory(t, burn_in);
  const std::vector<double> y = series(t, g, first_kept(t, burn_in), t.size());
  const std::size_t max_lag = y.size() / 4;
  const std::vector<double> rho = acf(y, max_lag);

  std::size_t lo = 0;
  while (lo < rho.size() && rho[lo] > 0.5) ++lo;
  std::size_t hi = lo;
  while (hi < rho.size() && rho[hi] > 0.05) ++hi;
  if (hi >= rho.size()) throw SimulationError("autocorrelation does not decay below 0.05 within the trajectory");
  const double interval = t.sample_interval();
  const auto slope = log_slope(rho, lo, hi, interval);
  if (!slope) throw SimulationError("fit window holds fewer than three positive lags; reduce the stride");

  DecayEstimate d;
  d.rate = -*slope;
  d.window_start = static_cast<double>(lo) * interval;
  d.window_end = static_cast<double>(hi) * interval;
  d.window_points = hi - lo;

  const std::size_t seg = y.size() / 4;
  std::vector<double> rates;
  for (int s = 0; s < 4; ++s) {
    std::vector<double> part(y.begin() + s * seg, y.begin() + (s + 1) * seg);
    if (part.size() <= hi) continue;
    const auto r = log_slope(acf(std::move(part), hi), lo, hi, interval);
    if (r) rates.push_back(-*r);
  }
  if (rates.size() >= 2) {
    double mean = 0.0, var = 0.0;
    for (double r : rates) mean += r;
    mean /= static_cast<double>(rates.size());
    for (double r : rates) var += (r - mean) * (r - mean);
    var /= static_cast<double>(rates.size() - 1);
    d.band = std::sqrt(var / static_cast<double>(rates.size()));
  }
  return d;
}

GibbsReport gibbs_check_chain(const ChainParams& p, const Trajectory& t, double burn_in, std::uint64_t reference_seed) {
  p.validate();
  if (p.t_l != p.t_r) throw DomainError("no Gibbs reference when the bath temperatures differ");
  if (t.dim != p.n_vars()) throw DomainError("trajectory does not match the chain");
  check_trajectory(t, burn_in);
  const int n = t.dim;
  const double temperature = p.t_l;
  if (!(temperature > 0.0)) throw DomainError("Gibbs reference needs a positive temperature");

  GibbsReport r;
  r.names = p.variable_names();

  std::vector<Estimate> means(n);
  for (int i = 0; i < n; ++i) means[i] = time_average(t, [i](auto x) { return x[i]; }, burn_in);
  r.sampled.resize(n, n);
  r.errors.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double mi = means[i].mean, mj = means[j].mean;
      const Estimate e = time_average(t, [=](auto x) { return (x[i] - mi) * (x[j] - mj); }, burn_in);
      r.sampled(i, j) = r.sampled(j, i) = e.mean;
      r.errors(i, j) = r.errors(j, i) = e.error;
    }

  const MultiPoly g = gibbs_energy_poly(p);
  if (g.degree() <= 2) {
    const Eigen::MatrixXd hess = quadratic_hessian(g);
    Eigen::LLT<Eigen::MatrixXd> llt(hess);
    if (llt.info() != Eigen::Success) throw DomainError("G is not a positive definite quadratic form");
    r.reference = temperature * llt.solve(Eigen::MatrixXd::Identity(n, n));
    r.oracle = "gaussian";
  } else {
    r.reference = metropolis_covariance(g, temperature, reference_seed);
    r.oracle = "metropolis";
  }
  for (int i = 0; i < n; ++i)
    r.max_diagonal_relative_error =
        std::max(r.max_diagonal_relative_error, std::abs(r.sampled(i, i) - r.reference(i, i)) / r.reference(i, i));
  return r;
}

}  // namespace hypo
