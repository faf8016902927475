#pragma once

// Langevin dynamics for the oscillator and the heat-conduction chain:
// integrators with counter-based noise, stationary moments with batch-means
// error bars, autocorrelation decay rates and equilibrium checks.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hypo/models.hpp"

namespace hypo {

/// Polynomial compiled to double-precision monomials for fast evaluation.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  explicit CompiledPoly(const MultiPoly& p);
  double operator()(std::span<const double> x) const;

 private:
  struct Term {
    double coefficient;
    std::vector<std::pair<int, int>> powers;  // (variable, exponent)
  };
  std::vector<Term> terms_;
};

struct NoiseChannel {
  int index;         // coordinate driven by this Wiener process
  double amplitude;  // >= 0
};

struct SdeSystem {
  int dim = 0;
  std::vector<std::string> names;
  PolyVectorField field;             // drift as a vector field
  std::vector<CompiledPoly> drift;   // compiled components of `field`
  std::vector<double> damping;       // kappa_i of a linear -kappa_i x_i term (0 if none)
  std::vector<NoiseChannel> noise;
  std::optional<CompiledPoly> energy;

  void validate() const;
};

/// dp = (-nu^2 q - eps q^3 - gamma p) dt + sqrt(2 gamma T) dw, dq = p dt.
SdeSystem oscillator_system(double gamma, double temperature, double nu, double eps);
/// Chain with baths r_L, r_R; noise amplitudes |lambda| sqrt(2 gamma T) on r_{L,R}.
SdeSystem chain_system(const ChainParams& p);
/// dx = -kappa x dt + sigma dw.
SdeSystem ou_system(double kappa, double sigma);

enum class Scheme { EulerMaruyama, SemiImplicitOu };

struct IntegrateOptions {
  double dt = 1e-3;
  long long steps = 100000;
  std::uint64_t seed = 1;
  int stride = 10;
  Scheme scheme = Scheme::SemiImplicitOu;
  double noise_sign = 1.0;
  std::vector<double> initial;  // zeros when empty
};

struct Trajectory {
  int dim = 0;
  double dt = 0.0;
  long long steps = 0;
  std::uint64_t seed = 0;
  int stride = 1;
  Scheme scheme = Scheme::SemiImplicitOu;
  std::vector<double> samples;  // row-major, one row per stored step (including step 0)

  std::size_t size() const { return dim ? samples.size() / static_cast<std::size_t>(dim) : 0; }
  std::span<const double> row(std::size_t i) const {
    return {samples.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  double sample_interval() const { return dt * stride; }
};

/// Standard normal variate for (seed, channel, step).
double counter_normal(std::uint64_t seed, std::uint64_t channel, std::uint64_t step);

/// The semi-implicit scheme advances damped coordinates by an exact
/// Ornstein-Uhlenbeck step, then the remaining coordinates explicitly in index
/// order using the values already updated.  Throws SimulationError when a
/// coordinate exceeds 1e8 or becomes non-finite.
Trajectory integrate(const SdeSystem& system, const IntegrateOptions& options);

struct Estimate {
  double mean = 0.0;
  double error = 0.0;  // batch-means standard error
};

/// Batch-means estimate of the time average of g over stored samples after
/// the first `burn_in` fraction.
Estimate time_average(const Trajectory& t, const std::function<double(std::span<const double>)>& g,
                      double burn_in = 0.1, int batches = 32);

/// Second and fourth moments per coordinate ("p^2", "q^4"), cross moments
/// ("p*q") and the energy ("H") when the system has one.
std::map<std::string, Estimate> stationary_moments(const SdeSystem& system, const Trajectory& t,
                                                   double burn_in = 0.1, int batches = 32);

struct DecayEstimate {
  double rate = 0.0;
  double band = 0.0;          // standard error of the rate over four trajectory segments
  double window_start = 0.0;  // time lag
  double window_end = 0.0;
  std::size_t window_points = 0;
};

/// Exponential decay rate of the autocorrelation of g, fitted on log(rho)
/// between the first crossings of 0.5 and 0.05 with weights rho^2.
DecayEstimate decay_rate(const Trajectory& t, const std::function<double(std::span<const double>)>& g,
                         double burn_in = 0.1);
/// Autocorrelation function of g up to `max_lag` stored samples.
std::vector<double> autocorrelation(const Trajectory& t, const std::function<double(std::span<const double>)>& g,
                                    double burn_in, std::size_t max_lag);

struct GibbsReport {
  std::vector<std::string> names;
  Eigen::MatrixXd sampled;    // sample covariance
  Eigen::MatrixXd reference;  // covariance of exp(-G/T)
  Eigen::MatrixXd errors;     // batch-means standard errors of the sampled entries
  double max_diagonal_relative_error = 0.0;
  std::string oracle;  // "gaussian" or "metropolis"
};

/// Compares the sampled covariance with that of exp(-G/T); needs T_L = T_R.
GibbsReport gibbs_check_chain(const ChainParams& p, const Trajectory& t, double burn_in = 0.1,
                              std::uint64_t reference_seed = 7);

}  // namespace hypo
