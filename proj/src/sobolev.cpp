#include "hypo/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>

#include <fftw3.h>

namespace hypo {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// FFTW plans cached per grid shape; transforms run under a lock because the
// plans share one aligned buffer.
class FftCache {
 public:
  static FftCache& instance() {
    static FftCache cache;
    return cache;
  }

  // In-place unnormalized DFT (sign = FFTW_FORWARD or FFTW_BACKWARD).
  void transform(const std::vector<int>& counts, std::span<Complex> data, int sign) {
    std::lock_guard lock(mutex_);
    Plan& p = plan(counts);
    std::copy(data.begin(), data.end(), reinterpret_cast<Complex*>(p.buffer));
    fftw_execute(sign == FFTW_FORWARD ? p.forward : p.backward);
    std::copy_n(reinterpret_cast<const Complex*>(p.buffer), data.size(), data.begin());
  }

 private:
  struct Plan {
    fftw_complex* buffer = nullptr;
    fftw_plan forward = nullptr, backward = nullptr;
    ~Plan() {
      if (forward) fftw_destroy_plan(forward);
      if (backward) fftw_destroy_plan(backward);
      if (buffer) fftw_free(buffer);
    }
  };

  Plan& plan(const std::vector<int>& counts) {
    auto it = plans_.find(counts);
    if (it != plans_.end()) return *it->second;
    auto p = std::make_unique<Plan>();
    std::size_t total = 1;
    for (int c : counts) total *= static_cast<std::size_t>(c);
    p->buffer = fftw_alloc_complex(total);
    const int rank = static_cast<int>(counts.size());
    p->forward = fftw_plan_dft(rank, counts.data(), p->buffer, p->buffer, FFTW_FORWARD, FFTW_ESTIMATE);
    p->backward = fftw_plan_dft(rank, counts.data(), p->buffer, p->buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!p->forward || !p->backward) throw ProbeError("FFTW planning failed");
    return *plans_.emplace(counts, std::move(p)).first->second;
  }

  std::mutex mutex_;
  std::map<std::vector<int>, std::unique_ptr<Plan>> plans_;
};

// Wavenumber of FFT index j on an axis with n samples and half-width L.
double wavenumber(int j, int n, double half_width) {
  const int m = j < n / 2 ? j : j - n;
  return std::numbers::pi * m / half_width;
}

// Apply a Fourier multiplier given as a function of the wavevector.
template <class F>
GridFunction fourier_multiply(const GridFunction& u, F&& symbol) {
  GridFunction r = u;
  auto& fft = FftCache::instance();
  fft.transform(u.counts(), r.values(), FFTW_FORWARD);
  const int nd = u.n_dims();
  std::vector<int> idx(nd, 0);
  std::vector<double> k(nd);
  const double inv = 1.0 / static_cast<double>(u.size());
  for (std::size_t flat = 0; flat < r.size(); ++flat) {
    for (int a = 0; a < nd; ++a) k[a] = wavenumber(idx[a], u.counts()[a], u.half_width());
    r[flat] *= symbol(k) * inv;
    for (int a = nd - 1; a >= 0; --a) {
      if (++idx[a] < u.counts()[a]) break;
      idx[a] = 0;
    }
  }
  fft.transform(u.counts(), r.values(), FFTW_BACKWARD);
  return r;
}

// Polynomial evaluated at every grid point.
std::vector<double> on_grid(const MultiPoly& f, const GridFunction& g) {
  std::vector<std::pair<double, Exponent>> terms;
  for (const auto& [e, c] : f.terms()) terms.emplace_back(c.convert_to<double>(), e);
  std::vector<double> out(g.size(), 0.0);
  if (terms.empty()) return out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = g.point(i);
    double s = 0.0;
    for (const auto& [c, e] : terms) {
      double m = c;
      for (std::size_t v = 0; v < e.size(); ++v)
        for (int p = 0; p < e[v]; ++p) m *= x[v];
      s += m;
    }
    out[i] = s;
  }
  return out;
}

GridFunction pointwise(const std::vector<double>& w, const GridFunction& u) {
  GridFunction r = u;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] *= w[i];
  return r;
}

GridFunction apply_field(const PolyVectorField& x, const GridFunction& u) {
  GridFunction r = pointwise(on_grid(x.zeroth, u), u);
  for (int j = 0; j < x.n_vars(); ++j) {
    if (x.components[j].is_zero()) continue;
    r += pointwise(on_grid(x.components[j], u), spectral_derivative(u, j));
  }
  return r;
}

// X^T v = G0 v - sum_j d_j (G_j v)
GridFunction apply_field_transpose(const PolyVectorField& x, const GridFunction& v) {
  GridFunction r = pointwise(on_grid(x.zeroth, v), v);
  for (int j = 0; j < x.n_vars(); ++j) {
    if (x.components[j].is_zero()) continue;
    GridFunction d = spectral_derivative(pointwise(on_grid(x.components[j], v), v), j);
    d *= -1.0;
    r += d;
  }
  return r;
}

double plain_norm(const GridFunction& u) {
  double s = 0.0;
  for (const auto& z : u.values()) s += std::norm(z);
  return std::sqrt(s * u.cell_volume());
}

}  // namespace

// ---------------------------------------------------------------- grid

GridFunction::GridFunction(std::vector<int> counts, double half_width)
    : counts_(std::move(counts)), half_width_(half_width) {
  if (counts_.empty()) throw DomainError("grid needs at least one axis");
  std::size_t total = 1;
  for (int c : counts_) {
    if (!is_power_of_two(c)) throw DomainError("grid sample counts must be powers of two");
    total *= static_cast<std::size_t>(c);
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) throw DomainError("box half-width must be positive");
  values_.assign(total, Complex(0.0));
}

GridFunction::GridFunction(std::vector<int> counts, double half_width, std::vector<Complex> values)
    : GridFunction(std::move(counts), half_width) {
  if (values.size() != values_.size()) throw DomainError("value count does not match the grid");
  for (const auto& z : values)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("grid values must be finite");
  values_ = std::move(values);
}

double GridFunction::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < n_dims(); ++a) v *= spacing(a);
  return v;
}

std::vector<double> GridFunction::point(std::size_t flat) const {
  std::vector<double> x(counts_.size());
  for (int a = n_dims() - 1; a >= 0; --a) {
    const auto n = static_cast<std::size_t>(counts_[a]);
    x[a] = -half_width_ + spacing(a) * static_cast<double>(flat % n);
    flat /= n;
  }
  return x;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  if (!same_grid(o)) throw DomainError("grid functions live on different grids");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(Complex z) {
  for (auto& v : values_) v *= z;
  return *this;
}

// ---------------------------------------------------------------- operators

GridFunction lambda_apply(const GridFunction& u, double alpha) {
  if (alpha == 0.0) return u;
  return fourier_multiply(u, [alpha](const std::vector<double>& k) {
    double k2 = 0.0;
    for (double c : k) k2 += c * c;
    return Complex(std::pow(1.0 + k2, alpha / 2.0));
  });
}

GridFunction lambdabar_apply(const GridFunction& u, double beta) {
  if (beta == 0.0) return u;
  GridFunction r = u;
  for (std::size_t i = 0; i < r.size(); ++i) {
    double x2 = 0.0;
    for (double c : r.point(i)) x2 += c * c;
    r[i] *= std::pow(1.0 + x2, beta / 2.0);
  }
  return r;
}

GridFunction spectral_derivative(const GridFunction& u, int axis) {
  if (axis < 0 || axis >= u.n_dims()) throw DomainError("axis out of range");
  const double nyquist = wavenumber(u.counts()[axis] / 2, u.counts()[axis], u.half_width());
  return fourier_multiply(u, [axis, nyquist](const std::vector<double>& k) {
    // the Nyquist mode has no consistent odd derivative
    return k[axis] == nyquist ? Complex(0.0) : Complex(0.0, k[axis]);
  });
}

Complex grid_inner(const GridFunction& f, const GridFunction& g) {
  if (!f.same_grid(g)) throw DomainError("grid functions live on different grids");
  Complex s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::conj(f[i]) * g[i];
  return s * f.cell_volume();
}

double weighted_norm(const GridFunction& u, double alpha, double beta) {
  return plain_norm(lambda_apply(lambdabar_apply(u, beta), alpha));
}

Complex weighted_inner(const GridFunction& f, const GridFunction& g, double alpha, double beta) {
  return grid_inner(lambda_apply(lambdabar_apply(f, beta), alpha), lambda_apply(lambdabar_apply(g, beta), alpha));
}

PolarizationReport polarization_check(const GridFunction& f, const GridFunction& g, double alpha, double beta,
                                      double alpha1, double beta1, double alpha2, double beta2) {
  const double scale = 1.0 + std::abs(alpha) + std::abs(beta);
  if (std::abs(alpha1 + alpha2 - 2.0 * alpha) > 1e-12 * scale ||
      std::abs(beta1 + beta2 - 2.0 * beta) > 1e-12 * scale)
    throw DomainError("split must satisfy alpha' + alpha'' = 2 alpha and beta' + beta'' = 2 beta");
  PolarizationReport r;
  r.inner_abs = std::abs(weighted_inner(f, g, alpha, beta));
  r.bound_product = weighted_norm(f, alpha1, beta1) * weighted_norm(g, alpha2, beta2);
  r.ratio = r.bound_product > 0.0 ? r.inner_abs / r.bound_product : 0.0;
  return r;
}

GridFunction apply_generator(const GeneratorSpec& spec, const GridFunction& u) {
  spec.validate();
  if (spec.n_vars() != u.n_dims()) throw DomainError("generator and grid have different dimensions");
  GridFunction r = apply_field(spec.drift, u);
  r += pointwise(on_grid(spec.potential, u), u);
  for (std::size_t i = 0; i < spec.diffusion.size(); ++i) {
    GridFunction t = apply_field_transpose(spec.diffusion[i], apply_field(spec.diffusion[i], u));
    t *= spec.weights[i].convert_to<double>();
    r += t;
  }
  return r;
}

// ---------------------------------------------------------------- ensemble

double hermite_function(int n, double x) {
  if (n < 0) throw DomainError("Hermite index must be non-negative");
  const double g = std::exp(-0.5 * x * x) / std::pow(std::numbers::pi, 0.25);
  double prev = 0.0, cur = g;
  for (int k = 0; k < n; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * x * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<EnsembleMember> default_ensemble(const std::vector<int>& counts, double half_width,
                                             const EnsembleSpec& spec) {
  const int nd = static_cast<int>(counts.size());
  std::vector<EnsembleMember> out;
  // Hermite products with total level <= hermite_max_level.
  std::vector<int> level(nd, 0);
  while (true) {
    int total = 0;
    for (int l : level) total += l;
    if (total <= spec.hermite_max_level) {
      std::string label = "hermite(";
      for (int a = 0; a < nd; ++a) label += (a ? "," : "") + std::to_string(level[a]);
      label += ")";
      out.push_back({label, sample(counts, half_width, [&](const std::vector<double>& x) {
                       double v = 1.0;
                       for (int a = 0; a < nd; ++a) v *= hermite_function(level[a], x[a]);
                       return Complex(v);
                     })});
    }
    int a = nd - 1;
    while (a >= 0 && ++level[a] > spec.hermite_max_level) level[a--] = 0;
    if (a < 0) break;
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  for (int i = 0; i < spec.wave_packets; ++i) {
    std::vector<double> c(nd), k(nd);
    for (int a = 0; a < nd; ++a) c[a] = uniform(-spec.center_range, spec.center_range);
    for (int a = 0; a < nd; ++a) k[a] = uniform(-spec.momentum_range, spec.momentum_range);
    const double width = uniform(spec.width_min, spec.width_max);
    const double phase = uniform(0.0, 2.0 * std::numbers::pi);
    GridFunction u = sample(counts, half_width, [&](const std::vector<double>& x) {
      double r2 = 0.0, kx = 0.0;
      for (int a = 0; a < nd; ++a) {
        r2 += (x[a] - c[a]) * (x[a] - c[a]);
        kx += k[a] * x[a];
      }
      return std::exp(-r2 / (2.0 * width * width)) * std::polar(1.0, kx + phase);
    });
    u *= 1.0 / plain_norm(u);
    out.push_back({"packet" + std::to_string(i), std::move(u)});
  }
  return out;
}

double boundary_mass_fraction(const GridFunction& u, int cells) {
  double edge = 0.0, total = 0.0;
  const int nd = u.n_dims();
  std::vector<int> idx(nd, 0);
  for (std::size_t flat = 0; flat < u.size(); ++flat) {
    const double m = std::norm(u[flat]);
    total += m;
    bool near = false;
    for (int a = 0; a < nd; ++a)
      if (idx[a] < cells || idx[a] >= u.counts()[a] - cells) near = true;
    if (near) edge += m;
    for (int a = nd - 1; a >= 0; --a) {
      if (++idx[a] < u.counts()[a]) break;
      idx[a] = 0;
    }
  }
  return total > 0.0 ? edge / total : 0.0;
}

ProbeResult hypoellipticity_probe(const GeneratorSpec& spec, const std::vector<EnsembleMember>& ensemble,
                                  const ProbeSettings& settings) {
  if (ensemble.empty()) throw ProbeError("empty ensemble");
  if (settings.ys.empty()) throw DomainError("no y values");
  ProbeResult res;
  for (const auto& y : settings.ys) {
    NormReport r;
    r.y = y;
    res.per_y.push_back(r);
  }

  struct Norms {
    double dd, oe;
    GridFunction ku;
  };
  auto norms = [&](const GridFunction& u) {
    return Norms{weighted_norm(u, settings.delta, settings.delta), weighted_norm(u, 0.0, settings.eps),
                 apply_generator(spec, u)};
  };
  auto ratio = [](const Norms& n, const GridFunction& u, double y) {
    GridFunction ky = u;
    ky *= Complex(0.0, y);
    ky += n.ku;
    return n.dd / (n.oe + plain_norm(ky));
  };

  for (const auto& member : ensemble) {
    const double leak = boundary_mass_fraction(member.u);
    res.max_boundary_mass = std::max(res.max_boundary_mass, leak);
    if (leak > settings.leakage_threshold)
      throw ProbeError("support leakage for member " + member.label + ": boundary mass fraction " +
                       std::to_string(leak));
    const Norms n = norms(member.u);
    GridFunction scaled = member.u;
    scaled *= settings.scaling_factor;
    const Norms ns = norms(scaled);
    res.labels.push_back(member.label);
    res.norm_dd.push_back(n.dd);
    res.norm_0e.push_back(n.oe);
    res.norm_ku.push_back(plain_norm(n.ku));
    for (auto& r : res.per_y) {
      const double rv = ratio(n, member.u, r.y);
      const double rs = ratio(ns, scaled, r.y);
      r.ratios.push_back(rv);
      r.max_scaling_defect = std::max(r.max_scaling_defect, std::abs(rs - rv) / rv);
    }
  }

  double hi = 0.0, lo = std::numeric_limits<double>::infinity();
  for (auto& r : res.per_y) {
    const auto it = std::max_element(r.ratios.begin(), r.ratios.end());
    r.max_ratio = *it;
    r.argmax = static_cast<std::size_t>(it - r.ratios.begin());
    r.min_ratio = *std::min_element(r.ratios.begin(), r.ratios.end());
    double s = 0.0;
    for (double v : r.ratios) s += v;
    r.mean_ratio = s / static_cast<double>(r.ratios.size());
    hi = std::max(hi, r.max_ratio);
    lo = std::min(lo, r.max_ratio);
    res.max_scaling_defect = std::max(res.max_scaling_defect, r.max_scaling_defect);
  }
  res.spread = hi / lo;
  res.notes.push_back("evidence only: the ensemble samples finitely many test functions");
  res.notes.push_back("norms are computed on a periodic box; boundary leakage is bounded, not eliminated");
  return res;
}

}  // namespace hypo
