#pragma once

// Weighted Sobolev norms ||Lambda^alpha Lambdabar^beta u|| on periodic grids,
// with Lambda = (1 - Laplacian)^(1/2) applied as a Fourier multiplier and
// Lambdabar = (1 + |x|^2)^(1/2) as a pointwise weight.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hypo/common.hpp"
#include "hypo/models.hpp"

namespace hypo {

/// Samples on [-L, L)^n, axis spacing 2L/N, last axis fastest.
class GridFunction {
 public:
  GridFunction(std::vector<int> counts, double half_width);
  GridFunction(std::vector<int> counts, double half_width, std::vector<Complex> values);

  int n_dims() const { return static_cast<int>(counts_.size()); }
  const std::vector<int>& counts() const { return counts_; }
  double half_width() const { return half_width_; }
  std::size_t size() const { return values_.size(); }
  double spacing(int axis) const { return 2.0 * half_width_ / counts_[axis]; }
  double cell_volume() const;
  /// Coordinates of a flat sample index.
  std::vector<double> point(std::size_t flat) const;
  bool same_grid(const GridFunction& o) const { return counts_ == o.counts_ && half_width_ == o.half_width_; }

  std::span<const Complex> values() const { return values_; }
  std::span<Complex> values() { return values_; }
  Complex& operator[](std::size_t i) { return values_[i]; }
  const Complex& operator[](std::size_t i) const { return values_[i]; }

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator*=(Complex z);

 private:
  std::vector<int> counts_;
  double half_width_;
  std::vector<Complex> values_;
};

/// Fill a grid function by sampling f at every grid point.
template <class F>
GridFunction sample(std::vector<int> counts, double half_width, F&& f) {
  GridFunction g(std::move(counts), half_width);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = f(g.point(i));
  return g;
}

/// Multiply the discrete Fourier coefficients by (1 + |k|^2)^(alpha/2).
GridFunction lambda_apply(const GridFunction& u, double alpha);
/// Multiply pointwise by (1 + |x|^2)^(beta/2).
GridFunction lambdabar_apply(const GridFunction& u, double beta);
/// Spectral derivative along one axis.
GridFunction spectral_derivative(const GridFunction& u, int axis);

/// sum conj(f) g h^n.
Complex grid_inner(const GridFunction& f, const GridFunction& g);
/// ||Lambda^alpha Lambdabar^beta u|| with quadrature weight h^(n/2).
double weighted_norm(const GridFunction& u, double alpha, double beta);
/// <Lambda^alpha Lambdabar^beta f, Lambda^alpha Lambdabar^beta g>.
Complex weighted_inner(const GridFunction& f, const GridFunction& g, double alpha, double beta);

struct PolarizationReport {
  double inner_abs = 0.0;      // |<f, g>_{alpha,beta}|
  double bound_product = 0.0;  // ||f||_{alpha',beta'} ||g||_{alpha'',beta''}
  double ratio = 0.0;          // inner_abs / bound_product
};

/// Requires alpha' + alpha'' = 2 alpha and beta' + beta'' = 2 beta.
PolarizationReport polarization_check(const GridFunction& f, const GridFunction& g, double alpha, double beta,
                                      double alpha1, double beta1, double alpha2, double beta2);

/// K u for K = sum_i w_i X_i^T X_i + X0 + f with spectral derivatives; axis i
/// carries variable i.
GridFunction apply_generator(const GeneratorSpec& spec, const GridFunction& u);

/// Normalized Hermite function psi_n(x).
double hermite_function(int n, double x);

struct EnsembleSpec {
  int hermite_max_level = 5;  // psi_{n1} x psi_{n2} with n1 + n2 <= level
  int wave_packets = 43;
  double center_range = 8.0;
  double momentum_range = 3.0;
  double width_min = 0.7, width_max = 1.5;
  std::uint64_t seed = 20240601;
};

struct EnsembleMember {
  std::string label;
  GridFunction u;
};

/// Hermite products (including the ground state) and seeded random Gaussian
/// wave packets; the defaults yield 64 members.
std::vector<EnsembleMember> default_ensemble(const std::vector<int>& counts, double half_width,
                                             const EnsembleSpec& spec = {});

/// Fraction of the squared norm within `cells` cells of the box boundary.
double boundary_mass_fraction(const GridFunction& u, int cells = 2);

struct ProbeSettings {
  double delta = 0.1;
  double eps = 0.1;
  std::vector<double> ys{0.0, 10.0, -10.0, 50.0, -50.0};
  double leakage_threshold = 1e-8;
  Complex scaling_factor{3.25, -1.5};
};

/// R(u, y) = ||u||_{delta,delta} / (||u||_{0,eps} + ||(K + iy) u||).
struct NormReport {
  double y = 0.0;
  std::vector<double> ratios;  // per ensemble member
  double max_ratio = 0.0;
  std::size_t argmax = 0;
  double min_ratio = 0.0;
  double mean_ratio = 0.0;
  double max_scaling_defect = 0.0;  // max |R(cu,y) - R(u,y)| / R(u,y)
};

struct ProbeResult {
  std::vector<NormReport> per_y;
  std::vector<std::string> labels;
  std::vector<double> norm_dd, norm_0e, norm_ku;  // per member
  double spread = 0.0;  // max over y of max_ratio divided by the min over y
  double max_scaling_defect = 0.0;
  double max_boundary_mass = 0.0;
  std::vector<std::string> notes;
};

ProbeResult hypoellipticity_probe(const GeneratorSpec& spec, const std::vector<EnsembleMember>& ensemble,
                                  const ProbeSettings& settings);

}  // namespace hypo
