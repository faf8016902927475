#pragma once

// Spectral enclosures {Re z >= 0, |Im z| <= C (1 + Re z)^nu} and
// {x + iy : x >= |y|^tau - c}.

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hypo/common.hpp"
#include "hypo/eigensolver.hpp"

namespace hypo {

constexpr double kCuspRealTolerance = 1e-8;

struct CuspFit {
  double nu = 1.0;
  double C = 0.0;
  double tol = kCuspRealTolerance;
  std::size_t included = 0;
  std::vector<Complex> violations;  // points with Re < -tol
};

/// C = max |Im z| / (1 + Re z)^nu over points with Re z >= -tol.
CuspFit fit_constant(std::span<const Complex> points, double nu, double tol = kCuspRealTolerance);

/// True when z lies in the fitted region (relative slack for round-off).
bool contains(const CuspFit& fit, Complex z, double slack = 1e-12);

struct NuScan {
  std::vector<CuspFit> fits;         // one per grid value, in grid order
  std::optional<double> smallest_nu;  // smallest nu with C <= ceiling
  bool monotone = true;               // C non-increasing in nu
};

NuScan scan_nu(std::span<const Complex> points, std::span<const double> nu_grid, double ceiling,
               double tol = kCuspRealTolerance);

struct Polyline {
  std::vector<std::pair<double, double>> upper;  // (x, +C(1+x)^nu)
  std::vector<std::pair<double, double>> lower;  // (x, -C(1+x)^nu)
};

Polyline region_boundary(const CuspFit& fit, double re_min, double re_max, int samples);

struct TauFit {
  double tau = 1.0;
  double c = 0.0;  // smallest offset with x >= |y|^tau - c for all included points
  std::size_t included = 0;
  std::vector<Complex> violations;
};

/// Fitted independently of the nu form; points with Re < -tol are excluded.
TauFit fit_tau(std::span<const Complex> points, double tau, double tol = kCuspRealTolerance);

/// Eigenvalues flagged as resolved.
std::vector<Complex> resolved_points(const Spectrum& spectrum);

}  // namespace hypo
