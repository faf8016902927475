#include "hypo/cusp.hpp"

#include <algorithm>
#include <cmath>

namespace hypo {

namespace {

void check_points(std::span<const Complex> points) {
  if (points.empty()) throw DomainError("no points to fit");
  for (const auto& z : points)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("points must be finite");
}

}  // namespace

CuspFit fit_constant(std::span<const Complex> points, double nu, double tol) {
  if (!(nu > 0.0 && nu <= 1.0)) throw DomainError("nu must lie in (0, 1]");
  check_points(points);
  CuspFit fit;
  fit.nu = nu;
  fit.tol = tol;
  for (const auto& z : points) {
    if (z.real() < -tol) {
      fit.violations.push_back(z);
      continue;
    }
    ++fit.included;
    fit.C = std::max(fit.C, std::abs(z.imag()) / std::pow(1.0 + z.real(), nu));
  }
  if (fit.included == 0) throw FitError("every point violates Re z >= 0");
  return fit;
}

bool contains(const CuspFit& fit, Complex z, double slack) {
  if (z.real() < -fit.tol) return false;
  return std::abs(z.imag()) <= fit.C * std::pow(1.0 + z.real(), fit.nu) * (1.0 + slack);
}

NuScan scan_nu(std::span<const Complex> points, std::span<const double> nu_grid, double ceiling, double tol) {
  if (nu_grid.empty()) throw DomainError("empty nu grid");
  NuScan scan;
  for (double nu : nu_grid) {
    scan.fits.push_back(fit_constant(points, nu, tol));
    if (scan.fits.back().C <= ceiling && (!scan.smallest_nu || nu < *scan.smallest_nu)) scan.smallest_nu = nu;
  }
  std::vector<std::size_t> order(nu_grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nu_grid[a] < nu_grid[b]; });
  for (std::size_t i = 1; i < order.size(); ++i)
    if (scan.fits[order[i]].C > scan.fits[order[i - 1]].C * (1.0 + 1e-12)) scan.monotone = false;
  return scan;
}

Polyline region_boundary(const CuspFit& fit, double re_min, double re_max, int samples) {
  if (samples < 1) throw DomainError("need at least one sample");
  if (!(re_max >= re_min) || re_min <= -1.0) throw DomainError("invalid real range");
  Polyline line;
  for (int i = 0; i < samples; ++i) {
    const double x = samples == 1 ? re_min : re_min + (re_max - re_min) * i / (samples - 1);
    const double y = fit.C * std::pow(1.0 + x, fit.nu);
    line.upper.emplace_back(x, y);
    line.lower.emplace_back(x, -y);
  }
  return line;
}

TauFit fit_tau(std::span<const Complex> points, double tau, double tol) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("tau must be positive");
  check_points(points);
  TauFit fit;
  fit.tau = tau;
  for (const auto& z : points) {
    if (z.real() < -tol) {
      fit.violations.push_back(z);
      continue;
    }
    ++fit.included;
    fit.c = std::max(fit.c, std::pow(std::abs(z.imag()), tau) - z.real());
  }
  if (fit.included == 0) throw FitError("every point violates Re z >= 0");
  return fit;
}

std::vector<Complex> resolved_points(const Spectrum& spectrum) { return spectrum.resolved_eigenvalues(); }

}  // namespace hypo
