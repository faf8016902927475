#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <gtest/gtest.h>

#include "hypo/sde.hpp"

using namespace hypo;

namespace {

// <q^2> under exp(-(nu^2 q^2/2 + eps q^4/4)/T) by one-dimensional quadrature.
double quartic_second_moment(double nu, double eps, double temperature) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto weight = [&](double q) { return std::exp(-(nu * nu * q * q / 2 + eps * q * q * q * q / 4) / temperature); };
  const double z = integrator.integrate(weight);
  const double m2 = integrator.integrate([&](double q) { return q * q * weight(q); });
  return m2 / z;
}

double combined_sigma(const Estimate& a, const Estimate& b) { return std::hypot(a.error, b.error); }

Trajectory run(const SdeSystem& s, long long steps, std::uint64_t seed, double dt = 1e-3, int stride = 10) {
  IntegrateOptions o;
  o.steps = steps;
  o.seed = seed;
  o.dt = dt;
  o.stride = stride;
  return integrate(s, o);
}

}  // namespace

TEST(Systems, OscillatorConstruction) {
  const auto cold = oscillator_system(1.0, 0.0, 1.0, 0.0);
  for (const auto& c : cold.noise) EXPECT_EQ(c.amplitude, 0.0);
  const auto s = oscillator_system(1.0, 1.0, 1.0, 0.0);
  EXPECT_EQ(s.dim, 2);
  EXPECT_EQ(s.names, (std::vector<std::string>{"p", "q"}));
  const double x[] = {0.0, 1.0};
  EXPECT_DOUBLE_EQ(s.drift[0](x), -1.0);
  EXPECT_DOUBLE_EQ(s.drift[1](x), 0.0);
  ASSERT_EQ(s.noise.size(), 1u);
  EXPECT_DOUBLE_EQ(s.noise[0].amplitude, std::sqrt(2.0));
  EXPECT_THROW(oscillator_system(0.0, 1.0, 1.0, 0.0), DomainError);
  EXPECT_THROW(oscillator_system(1.0, -1.0, 1.0, 0.0), DomainError);
}

TEST(Systems, ChainConstruction) {
  ChainParams p;
  p.t_l = 1.0;
  p.t_r = 2.0;
  p.lambda_r = 0.5;
  const auto s = chain_system(p);
  EXPECT_EQ(s.dim, 6);
  ASSERT_EQ(s.noise.size(), 2u);
  EXPECT_EQ(s.noise[0].index, p.rl_index());
  EXPECT_DOUBLE_EQ(s.noise[0].amplitude, std::sqrt(2.0));
  EXPECT_EQ(s.noise[1].index, p.rr_index());
  EXPECT_DOUBLE_EQ(s.noise[1].amplitude, 0.5 * 2.0);
}

TEST(CounterNormal, DeterministicAndDistinct) {
  EXPECT_EQ(counter_normal(1, 0, 5), counter_normal(1, 0, 5));
  EXPECT_NE(counter_normal(1, 0, 5), counter_normal(1, 1, 5));
  EXPECT_NE(counter_normal(1, 0, 5), counter_normal(2, 0, 5));
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = counter_normal(9, 3, i);
    s += z;
    s2 += z * z;
  }
  EXPECT_LT(std::abs(s / n), 0.01);
  EXPECT_LT(std::abs(s2 / n - 1), 0.01);
}

TEST(Integrate, SameSeedIsBitIdentical) {
  const auto s = oscillator_system(1.0, 1.0, 1.0, 0.3);
  const auto a = run(s, 20000, 5), b = run(s, 20000, 5), c = run(s, 20000, 6);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_NE(a.samples, c.samples);
  EXPECT_EQ(a.size(), 2001u);
}

TEST(Integrate, ZeroNoiseEnergyDecreases) {
  for (const Scheme scheme : {Scheme::SemiImplicitOu, Scheme::EulerMaruyama}) {
    const auto s = oscillator_system(0.5, 0.0, 1.3, 0.0);
    IntegrateOptions o;
    o.steps = 20000;
    o.stride = 1;
    o.dt = 1e-3;
    o.scheme = scheme;
    o.initial = {1.0, -0.5};
    const auto t = integrate(s, o);
    double previous = INFINITY;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto x = t.row(i);
      const double e = x[0] * x[0] / 2 + 1.3 * 1.3 * x[1] * x[1] / 2;
      // Explicit steps of the undamped rotation gain at most a factor 1 + (omega dt)^2.
      EXPECT_LE(e, previous * (1 + 2 * 1.3 * 1.3 * o.dt * o.dt));
      previous = e;
    }
    EXPECT_LT(previous, 0.01);
  }
}

TEST(Integrate, BlowUpIsReported) {
  SdeSystem s;
  s.dim = 1;
  s.names = {"x"};
  const MultiPoly x = MultiPoly::variable(1, 0);
  s.field = PolyVectorField(MultiPoly(1), {x * x * x});
  s.drift = {CompiledPoly(x * x * x)};
  s.damping = {0.0};
  IntegrateOptions o;
  o.steps = 10000;
  o.initial = {1.0};
  EXPECT_THROW(integrate(s, o), SimulationError);
}

TEST(Integrate, Preconditions) {
  const auto s = ou_system(1.0, 1.0);
  IntegrateOptions o;
  o.dt = 0.0;
  EXPECT_THROW(integrate(s, o), DomainError);
  o.dt = 1e-3;
  o.initial = {1.0, 2.0};
  EXPECT_THROW(integrate(s, o), DomainError);
}

TEST(OrnsteinUhlenbeck, StationaryVariance) {
  const auto t = run(ou_system(1.0, std::sqrt(2.0)), 10'000'000, 11);
  const auto m = stationary_moments(ou_system(1.0, std::sqrt(2.0)), t);
  EXPECT_NEAR(m.at("x^2").mean, 1.0, 0.02);
}

TEST(OrnsteinUhlenbeck, DecayRate) {
  const auto t = run(ou_system(1.0, std::sqrt(2.0)), 10'000'000, 12);
  const auto d = decay_rate(t, [](std::span<const double> x) { return x[0]; });
  EXPECT_NEAR(d.rate, 1.0, 0.1);
  EXPECT_GT(d.band, 0.0);
  EXPECT_GT(d.window_end, d.window_start);
}

TEST(OrnsteinUhlenbeck, AutocorrelationStartsAtOne) {
  const auto t = run(ou_system(1.0, std::sqrt(2.0)), 200000, 13);
  const auto rho = autocorrelation(t, [](std::span<const double> x) { return x[0]; }, 0.1, 50);
  ASSERT_EQ(rho.size(), 51u);
  EXPECT_NEAR(rho[0], 1.0, 1e-12);
  EXPECT_LT(rho[50], rho[0]);
}

TEST(Moments, HarmonicGibbsValues) {
  const auto s = oscillator_system(1.0, 2.0, std::sqrt(2.0), 0.0);
  const auto t = run(s, 5'000'000, 21);
  const auto m = stationary_moments(s, t);
  EXPECT_NEAR(m.at("p^2").mean, 2.0, std::max(4 * m.at("p^2").error, 0.1));
  EXPECT_NEAR(m.at("q^2").mean, 1.0, std::max(4 * m.at("q^2").error, 0.05));
  EXPECT_NEAR(m.at("p*q").mean, 0.0, 4 * m.at("p*q").error + 1e-3);
}

TEST(Moments, AnharmonicMatchesQuadrature) {
  const double eps = 0.25;
  const auto s = oscillator_system(1.0, 1.0, 1.0, eps);
  const auto t = run(s, 5'000'000, 22);
  const double oracle = quartic_second_moment(1.0, eps, 1.0);
  EXPECT_NEAR(stationary_moments(s, t).at("q^2").mean, oracle, 0.05 * oracle);
}

TEST(Moments, ColdRelaxationEnergyVanishes) {
  const auto s = oscillator_system(1.0, 0.0, 1.0, 0.0);
  IntegrateOptions o;
  o.steps = 40000;
  o.initial = {1.0, 1.0};
  EXPECT_LT(stationary_moments(s, integrate(s, o), 0.5).at("H").mean, 1e-6);
}

TEST(Moments, EnergyBalance) {
  // Dissipated power gamma <p^2> equals the injected power gamma T.
  const double gamma = 2.0, temperature = 1.5;
  const auto s = oscillator_system(gamma, temperature, 1.0, 0.0);
  const auto m = stationary_moments(s, run(s, 3'000'000, 23));
  EXPECT_NEAR(gamma * m.at("p^2").mean, gamma * temperature, 4 * gamma * m.at("p^2").error);
}

TEST(Moments, NoiseSignAndSeedInvariance) {
  const auto s = oscillator_system(1.0, 1.0, 1.0, 0.25);
  IntegrateOptions o;
  o.steps = 2'000'000;
  o.seed = 31;
  const auto a = stationary_moments(s, integrate(s, o));
  o.noise_sign = -1.0;
  const auto b = stationary_moments(s, integrate(s, o));
  o.noise_sign = 1.0;
  o.seed = 32;
  const auto c = stationary_moments(s, integrate(s, o));
  for (const char* key : {"p^2", "q^2", "q^4"}) {
    EXPECT_NEAR(a.at(key).mean, b.at(key).mean, 4 * combined_sigma(a.at(key), b.at(key))) << key;
    EXPECT_NEAR(a.at(key).mean, c.at(key).mean, 4 * combined_sigma(a.at(key), c.at(key))) << key;
  }
}

TEST(Moments, TimeStepConvergence) {
  const auto s = oscillator_system(1.0, 1.0, 1.0, 0.0);
  const auto a = stationary_moments(s, run(s, 2'000'000, 41, 2e-3, 5));
  const auto b = stationary_moments(s, run(s, 4'000'000, 42, 1e-3, 10));
  for (const char* key : {"p^2", "q^2"})
    EXPECT_NEAR(a.at(key).mean, b.at(key).mean, 4 * combined_sigma(a.at(key), b.at(key))) << key;
}

TEST(Moments, InsufficientSamples) {
  const auto s = ou_system(1.0, 1.0);
  const auto t = run(s, 100, 1);
  EXPECT_THROW(stationary_moments(s, t), SimulationError);
  EXPECT_THROW(time_average(t, [](std::span<const double> x) { return x[0]; }, 1.0), DomainError);
}

TEST(DecayRate, PhysicalOscillatorMatchesDriftEigenvalue) {
  // Drift matrix [[-3, -2], [1, 0]] has eigenvalues -1 and -2.
  const auto s = oscillator_system(3.0, 1.0, std::sqrt(2.0), 0.0);
  const auto t = run(s, 4'000'000, 51);
  EXPECT_NEAR(decay_rate(t, [](std::span<const double> x) { return x[1]; }).rate, 1.0, 0.15);
}

TEST(DecayRate, ChainRateIsStableAcrossTimeSteps) {
  ChainParams p;
  const auto s = chain_system(p);
  auto q0 = [&](std::span<const double> x) { return x[p.q_index(0)]; };
  const auto a = decay_rate(run(s, 2'000'000, 61, 2e-3, 5), q0);
  const auto b = decay_rate(run(s, 4'000'000, 62, 1e-3, 10), q0);
  EXPECT_GT(a.rate, 0.0);
  EXPECT_NEAR(a.rate, b.rate, 4 * std::hypot(a.band, b.band) + 0.05 * b.rate);
}

TEST(DecayRate, ConstantObservableIsRejected) {
  const auto t = run(ou_system(1.0, 1.0), 10000, 1);
  EXPECT_THROW(decay_rate(t, [](std::span<const double>) { return 1.0; }), SimulationError);
}

TEST(Gibbs, HarmonicChainMatchesGaussianCovariance) {
  ChainParams p;
  const auto s = chain_system(p);
  const auto t = run(s, 10'000'000, 71);
  const auto r = gibbs_check_chain(p, t);
  EXPECT_EQ(r.oracle, "gaussian");
  EXPECT_LT(r.max_diagonal_relative_error, 0.05);
  // p_0 and p_1 are uncoupled in G.
  EXPECT_NEAR(r.sampled(p.p_index(0), p.p_index(1)), 0.0, 4 * r.errors(p.p_index(0), p.p_index(1)) + 1e-3);
}

TEST(Gibbs, AnharmonicUsesMetropolisReference) {
  ChainParams p;
  p.v1 = {0.0, 0.0, 0.5, 0.0, 0.25};
  const auto s = chain_system(p);
  const auto r = gibbs_check_chain(p, run(s, 1'000'000, 72));
  EXPECT_EQ(r.oracle, "metropolis");
  EXPECT_LT(r.max_diagonal_relative_error, 0.15);
}

TEST(Gibbs, UnequalTemperaturesRefused) {
  ChainParams p;
  p.t_r = 1.5;
  const auto t = run(chain_system(p), 1000, 1);
  EXPECT_THROW(gibbs_check_chain(p, t), DomainError);
}
