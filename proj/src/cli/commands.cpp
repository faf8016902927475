#include <algorithm>
#include <cmath>
#include <sstream>

#include "hypo/cli.hpp"
#include "hypo/cusp.hpp"
#include "hypo/eigensolver.hpp"
#include "hypo/exact_spectrum.hpp"
#include "hypo/models.hpp"
#include "hypo/sde.hpp"
#include "hypo/sobolev.hpp"
#include "hypo/symbolic.hpp"

namespace hypo::cli {

using nlohmann::json;

namespace {

json cjson(Complex z) { return json::array({z.real(), z.imag()}); }

json cjson(const std::vector<Complex>& zs) {
  json arr = json::array();
  for (const auto& z : zs) arr.push_back(cjson(z));
  return arr;
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string out;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ',';
    out += c;
    first = false;
  }
  return out + '\n';
}

std::string f(double v) { return format_double(v); }

OscParams osc_params(const RunConfig& c) {
  OscParams p;
  p.alpha = c.number("alpha");
  p.eps = c.number("eps");
  p.c = c.number("c");
  return p;
}

ChainParams chain_params(const RunConfig& c) {
  ChainParams p;
  p.n = c.integer("chain.n");
  p.gamma_l = c.number("chain.gamma_l");
  p.gamma_r = c.number("chain.gamma_r");
  p.lambda_l = c.number("chain.lambda_l");
  p.lambda_r = c.number("chain.lambda_r");
  p.t_l = c.number("chain.t_l");
  p.t_r = c.number("chain.t_r");
  p.t_ref = c.number("chain.t_ref");
  p.v1 = c.numbers("chain.v1");
  p.v2 = c.numbers("chain.v2");
  return p;
}

bool is_chain(const RunConfig& c) { return c.text("model") == "chain"; }

int n_modes(const RunConfig& c) { return is_chain(c) ? chain_params(c).n_vars() : 2; }

FockBasis make_basis(const RunConfig& c, int extra = 0) {
  const int modes = n_modes(c);
  if (c.text("basis.scheme") == "total") return FockBasis::total_level(modes, c.integer("basis.cutoff") + extra);
  std::vector<double> given = c.numbers("basis.cutoffs");
  std::vector<int> cutoffs;
  if (given.empty()) {
    cutoffs.assign(modes, c.integer("basis.cutoff") + 1 + extra);
  } else {
    for (double v : given) cutoffs.push_back(static_cast<int>(v) + extra);
  }
  return FockBasis::per_mode(cutoffs);
}

SparseOperator model_matrix(const RunConfig& c, const FockBasis& basis) {
  return is_chain(c) ? chain_matrix(chain_params(c), basis) : oscillator_matrix(osc_params(c), basis);
}

Spectrum solve(const RunConfig& c, const SparseOperator& a) {
  std::string method = c.text("solver.method");
  const auto limit = static_cast<std::size_t>(c.integer("solver.dense_limit"));
  if (method == "auto") method = a.dim() <= limit ? "dense" : "arnoldi";
  if (method == "dense") {
    DenseOptions o;
    o.dense_limit = std::max(limit, a.dim());
    return dense_eigs(a, o);
  }
  const auto shift = c.numbers("solver.shift");
  ArnoldiOptions o;
  o.shift = Complex(shift[0], shift[1]);
  o.k = c.integer("solver.k");
  o.max_subspace = c.integer("solver.max_subspace");
  o.tol = c.number("solver.tol");
  return arnoldi_eigs(a, o);
}

int mmax_of(const RunConfig& c) {
  const int m = c.integer("mmax");
  return m < 0 ? c.integer("nmax") : m;
}

double cone_slope(double alpha) {
  const double d = 4.0 * alpha * alpha - 1.0;
  return d > 0.0 ? std::sqrt(d) : 0.0;
}

std::vector<Complex> spectrum_points(const RunConfig& c, std::string& source) {
  const std::string input = c.text("cusp.input");
  if (!input.empty()) {
    source = input;
    return read_spectrum_csv(input);
  }
  const FockBasis basis = make_basis(c);
  const Spectrum s = solve(c, model_matrix(c, basis));
  source = "computed: " + s.provenance + ", dim " + std::to_string(basis.dim());
  return s.resolved_eigenvalues();
}

struct GridPoint {
  int n, m;
  Complex lambda0, delta, value;
};

std::vector<GridPoint> perturbed_grid(double alpha, double ceps, int nmax, int mmax) {
  std::vector<GridPoint> out;
  const FockBasis basis = FockBasis::total_level(2, nmax + mmax + 4);
  for (int n = 0; n <= nmax; ++n)
    for (int m = 0; m <= mmax; ++m) {
      GridPoint g{n, m, exact_eigenvalue(n, m, alpha), 0.0, 0.0};
      if (ceps != 0.0) g.delta = delta_nm(n, m, alpha, basis).delta;
      g.value = g.lambda0 + ceps * g.delta;
      out.push_back(g);
    }
  return out;
}

CommandOutput grid_figure(int figure, const std::vector<GridPoint>& grid, double alpha, double ceps) {
  CommandOutput out;
  out.stem = "figure" + std::to_string(figure);
  double x_max = 0.0;
  for (const auto& g : grid) x_max = std::max(x_max, g.value.real());
  if (x_max <= 0.0) x_max = 1.0;
  const double slope = cone_slope(alpha);

  out.csv = csv_row({"kind", "n", "m", "re", "im"});
  json points = json::array();
  for (const auto& g : grid) {
    out.csv += csv_row({"point", std::to_string(g.n), std::to_string(g.m), f(g.value.real()), f(g.value.imag())});
    points.push_back({{"n", g.n}, {"m", g.m}, {"value", cjson(g.value)}});
  }
  out.csv += csv_row({"ray_upper", "", "", f(x_max), f(slope * x_max)});
  out.csv += csv_row({"ray_lower", "", "", f(x_max), f(-slope * x_max)});
  out.results = {{"alpha", alpha},
                  {"ceps", ceps},
                  {"points", points},
                  {"rays", json::array({{{"origin", cjson(0.0)}, {"end", cjson(Complex(x_max, slope * x_max))}},
                                        {{"origin", cjson(0.0)}, {"end", cjson(Complex(x_max, -slope * x_max))}}})},
                  {"cone_slope", slope}};
  std::ostringstream s;
  s << "figure " << figure << ": " << grid.size() << " points, 2 rays with slope +-" << slope << "\n";
  out.summary = s.str();
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void check_choice(const RunConfig& c, const std::string& key, std::initializer_list<const char*> allowed) {
  const std::string v = c.text(key);
  for (const char* a : allowed)
    if (v == a) return;
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
  throw ConfigError("key '" + key + "' must be one of: " + list);
}

}  // namespace

void validate_for(const std::string& command, const RunConfig& c) {
  check_choice(c, "model", {"oscillator", "chain"});
  check_choice(c, "basis.scheme", {"total", "per_mode"});
  check_choice(c, "solver.method", {"auto", "dense", "arnoldi"});
  check_choice(c, "output.emit", {"csv", "json"});
  check_choice(c, "sde.scheme", {"semi_implicit_ou", "euler_maruyama"});
  require(c.integer("nmax") >= 0, "nmax must be non-negative");
  require(c.integer("basis.cutoff") >= 0, "basis.cutoff must be non-negative");
  require(c.numbers("solver.shift").size() == 2, "solver.shift must hold [re, im]");
  require(c.integer("solver.k") >= 1, "solver.k must be positive");
  require(c.integer("solver.convergence_step") >= 0, "solver.convergence_step must be non-negative");
  require(c.integer("solver.dense_limit") >= 1, "solver.dense_limit must be positive");

  try {
    const bool needs_model = command == "spectrum" || command == "cusp-fit" || command == "figure1" ||
                             command == "hormander" || command == "sobolev-probe";
    if (needs_model || command == "exact" || command == "perturb" || command == "figure2" || command == "figure3") {
      if (is_chain(c) && needs_model) {
        chain_spec(chain_params(c));
      } else {
        osc_params(c).validate();
      }
    }
    if (needs_model && !is_chain(c) && c.text("basis.scheme") == "per_mode" && !c.numbers("basis.cutoffs").empty())
      require(c.numbers("basis.cutoffs").size() == 2, "the oscillator needs two per-mode cutoffs");
    if ((command == "exact" || command == "perturb" || command == "figure2" || command == "figure3") && is_chain(c))
      throw ConfigError(command + " applies to the oscillator model only");
    if (command == "sobolev-probe") {
      require(!is_chain(c), "sobolev-probe applies to the oscillator model only");
      const int n = c.integer("probe.grid");
      require(n >= 4 && (n & (n - 1)) == 0, "probe.grid must be a power of two >= 4");
      require(c.number("probe.half_width") > 0.0, "probe.half_width must be positive");
      require(!c.numbers("probe.ys").empty(), "probe.ys must not be empty");
    }
    if (command == "cusp-fit" || command == "figure1") {
      const double nu = c.number("cusp.nu");
      require(nu > 0.0 && nu <= 1.0, "cusp.nu must lie in (0, 1]");
      require(c.integer("cusp.samples") >= 1, "cusp.samples must be positive");
      require(!c.numbers("cusp.nu_grid").empty(), "cusp.nu_grid must not be empty");
    }
    if (command == "hormander") require(c.integer("hormander.max_rank") >= 1, "hormander.max_rank must be positive");
    if (command == "simulate") {
      require(c.number("sde.dt") > 0.0, "sde.dt must be positive");
      require(c.integer("sde.steps") >= 0, "sde.steps must be non-negative");
      require(c.integer("sde.stride") >= 1, "sde.stride must be positive");
      const double b = c.number("sde.burn_in");
      require(b >= 0.0 && b < 1.0, "sde.burn_in must lie in [0, 1)");
      require(std::abs(c.number("sde.noise_sign")) == 1.0, "sde.noise_sign must be +1 or -1");
      c.unsigned_integer("sde.seed");
      if (is_chain(c))
        chain_params(c).validate();
      else
        oscillator_system(c.number("sde.gamma"), c.number("sde.temperature"), c.number("sde.nu"), c.number("sde.eps"));
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

CommandOutput run_spectrum(const RunConfig& c) {
  const FockBasis basis = make_basis(c);
  const SparseOperator a = model_matrix(c, basis);
  const Spectrum s = solve(c, a);

  CommandOutput out;
  out.stem = "spectrum";
  out.csv = csv_row({"re", "im", "residual", "resolved"});
  json residuals = json::array(), resolved = json::array();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& r = s.residuals[i];
    out.csv += csv_row({f(s.eigenvalues[i].real()), f(s.eigenvalues[i].imag()), r ? f(*r) : "nan",
                        s.resolved[i] ? "true" : "false"});
    residuals.push_back(r ? json(*r) : json(nullptr));
    resolved.push_back(static_cast<bool>(s.resolved[i]));
  }
  out.results = {{"model", c.text("model")},
                 {"dimension", basis.dim()},
                 {"cutoff", basis.level_cutoff()},
                 {"scheme", c.text("basis.scheme")},
                 {"provenance", s.provenance},
                 {"threshold", s.threshold},
                 {"eigenvalues", cjson(s.eigenvalues)},
                 {"residuals", residuals},
                 {"resolved", resolved}};

  std::ostringstream sum;
  sum << "spectrum: " << s.size() << " eigenvalues (" << s.resolved_eigenvalues().size() << " resolved), dim "
      << basis.dim() << ", " << s.provenance << "\n";
  const int step = c.integer("solver.convergence_step");
  if (step > 0) {
    const FockBasis larger = make_basis(c, step);
    const Spectrum s2 = solve(c, model_matrix(c, larger));
    const TruncationReport t =
        truncation_convergence(s.resolved_eigenvalues(), s2.resolved_eigenvalues(), basis.level_cutoff(),
                               larger.level_cutoff(), c.number("solver.convergence_tol"));
    out.results["truncation"] = {{"cutoff_small", t.cutoff_small},
                                 {"cutoff_large", t.cutoff_large},
                                 {"tolerance", t.tolerance},
                                 {"stable", cjson(t.stable)},
                                 {"drifting", cjson(t.drifting)},
                                 {"max_stable_drift", t.max_stable_drift}};
    sum << "truncation " << t.cutoff_small << " -> " << t.cutoff_large << ": " << t.stable.size() << " stable, "
        << t.drifting.size() << " drifting\n";
  }
  out.summary = sum.str();
  return out;
}

CommandOutput run_exact(const RunConfig& c) {
  const double alpha = c.number("alpha");
  const int nmax = c.integer("nmax"), mmax = mmax_of(c);
  const HarmonicSpectralData h = harmonic_data(alpha);
  CommandOutput out;
  out.stem = "exact";
  out.csv = csv_row({"n", "m", "re", "im"});
  json points = json::array();
  for (int n = 0; n <= nmax; ++n)
    for (int m = 0; m <= mmax; ++m) {
      const Complex z = exact_eigenvalue(n, m, alpha);
      out.csv += csv_row({std::to_string(n), std::to_string(m), f(z.real()), f(z.imag())});
      points.push_back({{"n", n}, {"m", m}, {"value", cjson(z)}});
    }
  const char* regime = h.regime == Regime::Oscillatory  ? "oscillatory"
                       : h.regime == Regime::Degenerate ? "degenerate"
                                                        : "overdamped";
  out.results = {{"alpha", alpha},
                 {"regime", regime},
                 {"lambda_plus", cjson(h.lambda_plus)},
                 {"lambda_minus", cjson(h.lambda_minus)},
                 {"beta_plus", cjson(h.beta_plus)},
                 {"beta_minus", cjson(h.beta_minus)},
                 {"points", points}};
  std::ostringstream sum;
  sum << "exact: " << points.size() << " eigenvalues, lambda_+ = " << h.lambda_plus << ", regime " << regime << "\n";
  out.summary = sum.str();
  return out;
}

CommandOutput run_perturb(const RunConfig& c) {
  const double alpha = c.number("alpha"), ceps = c.number("c") * c.number("eps");
  const auto grid = perturbed_grid(alpha, ceps, c.integer("nmax"), mmax_of(c));
  CommandOutput out;
  out.stem = "perturb";
  out.csv = csv_row({"n", "m", "re0", "im0", "delta_re", "delta_im", "re", "im"});
  json points = json::array();
  for (const auto& g : grid) {
    out.csv += csv_row({std::to_string(g.n), std::to_string(g.m), f(g.lambda0.real()), f(g.lambda0.imag()),
                        f(g.delta.real()), f(g.delta.imag()), f(g.value.real()), f(g.value.imag())});
    points.push_back(
        {{"n", g.n}, {"m", g.m}, {"lambda0", cjson(g.lambda0)}, {"delta", cjson(g.delta)}, {"value", cjson(g.value)}});
  }
  out.results = {{"alpha", alpha}, {"ceps", ceps}, {"points", points}};
  if (ceps == 0.0) out.results["note"] = "c eps = 0: first-order corrections not evaluated";
  out.summary = "perturb: " + std::to_string(grid.size()) + " points, c eps = " + f(ceps) + "\n";
  return out;
}

CommandOutput run_cusp_fit(const RunConfig& c) {
  std::string source;
  const std::vector<Complex> points = spectrum_points(c, source);
  const std::vector<double> grid = c.numbers("cusp.nu_grid");
  const NuScan scan = scan_nu(points, grid, c.number("cusp.ceiling"));
  const TauFit tau = fit_tau(points, c.number("cusp.tau"));

  CommandOutput out;
  out.stem = "cusp_fit";
  out.csv = csv_row({"nu", "C", "included", "violations"});
  json fits = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const CuspFit& fit = scan.fits[i];
    out.csv += csv_row({f(fit.nu), f(fit.C), std::to_string(fit.included), std::to_string(fit.violations.size())});
    fits.push_back({{"nu", fit.nu}, {"C", fit.C}, {"included", fit.included}, {"violations", cjson(fit.violations)}});
  }
  out.results = {{"source", source},
                 {"points", points.size()},
                 {"fits", fits},
                 {"smallest_nu", scan.smallest_nu ? json(*scan.smallest_nu) : json(nullptr)},
                 {"monotone", scan.monotone},
                 {"tau_fit",
                  {{"tau", tau.tau}, {"c", tau.c}, {"included", tau.included}, {"violations", cjson(tau.violations)}}}};
  std::ostringstream sum;
  sum << "cusp-fit: " << points.size() << " points";
  if (scan.smallest_nu) sum << ", smallest nu with C <= ceiling: " << *scan.smallest_nu;
  sum << ", tau fit c = " << tau.c << "\n";
  out.summary = sum.str();
  return out;
}

CommandOutput run_hormander(const RunConfig& c) {
  const GeneratorSpec spec = is_chain(c) ? chain_spec(chain_params(c)) : oscillator_spec(osc_params(c));
  const auto samples =
      sample_grid(spec.n_vars(), c.number("hormander.half_width"), c.integer("hormander.per_axis"));
  const int weight = c.integer("hormander.weight_exponent");

  CommandOutput out;
  out.stem = "hormander";
  json ranks = json::array();
  std::optional<int> passed;
  BracketFamily family;
  NondegeneracyReport report;
  for (int m = 1; m <= c.integer("hormander.max_rank"); ++m) {
    family = bracket_closure(spec.drift, spec.diffusion, m, false);
    report = nondegeneracy_margin(family, samples, weight);
    ranks.push_back({{"rank", m}, {"pass", report.pass}, {"margin", report.margin}, {"family_size", family.entries.size()}});
    if (report.pass) {
      passed = m;
      break;
    }
  }
  out.csv = csv_row({"rank", "provenance"});
  json provenance = json::array();
  for (const auto& e : family.entries) {
    out.csv += csv_row({std::to_string(e.rank), e.provenance});
    provenance.push_back(e.provenance);
  }
  out.results = {{"model", c.text("model")},
                 {"condition", "b1"},
                 {"pass", passed.has_value()},
                 {"rank", passed ? json(*passed) : json(nullptr)},
                 {"margin", report.margin},
                 {"constant", report.constant ? json(*report.constant) : json(nullptr)},
                 {"weight_exponent", weight},
                 {"samples", samples.size()},
                 {"provenance", provenance},
                 {"ranks", ranks},
                 {"note", report.note}};
  std::ostringstream sum;
  sum << "hormander b1 " << (passed ? "PASS" : "FAIL");
  if (passed) sum << " at M = " << *passed;
  sum << ", margin " << report.margin << ", family:";
  for (const auto& p : provenance) sum << " " << p.get<std::string>();
  sum << "\n";
  out.summary = sum.str();
  return out;
}

CommandOutput run_sobolev_probe(const RunConfig& c) {
  const GeneratorSpec spec = oscillator_spec(osc_params(c));
  const int n = c.integer("probe.grid");
  const double half_width = c.number("probe.half_width");
  EnsembleSpec es;
  es.hermite_max_level = c.integer("probe.hermite_max_level");
  es.wave_packets = c.integer("probe.wave_packets");
  es.seed = c.unsigned_integer("probe.seed");
  const auto ensemble = default_ensemble({n, n}, half_width, es);
  ProbeSettings settings;
  settings.delta = c.number("probe.delta");
  settings.eps = c.number("probe.eps");
  settings.ys = c.numbers("probe.ys");
  settings.leakage_threshold = c.number("probe.leakage_threshold");
  const ProbeResult r = hypoellipticity_probe(spec, ensemble, settings);

  CommandOutput out;
  out.stem = "sobolev_probe";
  out.csv = csv_row({"member", "label", "y", "ratio"});
  json per_y = json::array();
  for (const auto& rep : r.per_y) {
    for (std::size_t i = 0; i < rep.ratios.size(); ++i)
      out.csv += csv_row({std::to_string(i), r.labels[i], f(rep.y), f(rep.ratios[i])});
    per_y.push_back({{"y", rep.y},
                     {"max_ratio", rep.max_ratio},
                     {"argmax", r.labels[rep.argmax]},
                     {"min_ratio", rep.min_ratio},
                     {"mean_ratio", rep.mean_ratio},
                     {"max_scaling_defect", rep.max_scaling_defect}});
  }
  out.results = {{"grid", {n, n}},
                 {"half_width", half_width},
                 {"members", ensemble.size()},
                 {"per_y", per_y},
                 {"spread", r.spread},
                 {"max_scaling_defect", r.max_scaling_defect},
                 {"max_boundary_mass", r.max_boundary_mass},
                 {"notes", r.notes}};
  std::ostringstream sum;
  sum << "sobolev-probe: " << ensemble.size() << " members, spread of max R over y = " << r.spread
      << ", max scaling defect " << r.max_scaling_defect << "\n";
  out.summary = sum.str();
  return out;
}

CommandOutput run_simulate(const RunConfig& c) {
  const bool chain = is_chain(c);
  const ChainParams cp = chain ? chain_params(c) : ChainParams{};
  const SdeSystem system = chain ? chain_system(cp)
                                 : oscillator_system(c.number("sde.gamma"), c.number("sde.temperature"),
                                                     c.number("sde.nu"), c.number("sde.eps"));
  IntegrateOptions o;
  o.dt = c.number("sde.dt");
  o.steps = c.integer("sde.steps");
  o.seed = c.unsigned_integer("sde.seed");
  o.stride = c.integer("sde.stride");
  o.scheme = c.text("sde.scheme") == "euler_maruyama" ? Scheme::EulerMaruyama : Scheme::SemiImplicitOu;
  o.noise_sign = c.number("sde.noise_sign");
  const Trajectory t = integrate(system, o);
  const double burn_in = c.number("sde.burn_in");

  CommandOutput out;
  out.stem = "simulate";
  out.csv = "t";
  for (const auto& name : system.names) out.csv += "," + name;
  out.csv += ",H\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto row = t.row(i);
    out.csv += f(static_cast<double>(i) * t.sample_interval());
    for (double v : row) out.csv += "," + f(v);
    out.csv += "," + f((*system.energy)(row)) + "\n";
  }

  json moments = json::object();
  for (const auto& [k, e] : stationary_moments(system, t, burn_in)) moments[k] = {{"mean", e.mean}, {"error", e.error}};
  out.results = {{"model", c.text("model")}, {"samples", t.size()}, {"moments", moments}};
  std::ostringstream sum;
  sum << "simulate: " << t.size() << " samples";

  if (!chain && c.number("sde.temperature") > 0.0) {
    const OscParams reduced =
        reduce_params(c.number("sde.gamma"), c.number("sde.temperature"), c.number("sde.nu"), c.number("sde.eps"));
    out.results["reduced_alpha"] = reduced.alpha;
  }
  if (c.boolean("sde.decay")) {
    const int q = chain ? cp.q_index(0) : 1;
    const DecayEstimate d = decay_rate(t, [q](auto x) { return x[q]; }, burn_in);
    out.results["decay"] = {{"observable", system.names[q]},
                            {"rate", d.rate},
                            {"band", d.band},
                            {"window", {d.window_start, d.window_end}},
                            {"window_points", d.window_points}};
    sum << ", decay rate of " << system.names[q] << " = " << d.rate << " +- " << d.band;
  }
  if (chain && cp.t_l == cp.t_r) {
    const GibbsReport g = gibbs_check_chain(cp, t, burn_in);
    json diag = json::array();
    for (int i = 0; i < g.sampled.rows(); ++i)
      diag.push_back({{"variable", g.names[i]},
                      {"sampled", g.sampled(i, i)},
                      {"reference", g.reference(i, i)},
                      {"error", g.errors(i, i)}});
    out.results["gibbs"] = {{"oracle", g.oracle},
                            {"diagonal", diag},
                            {"max_diagonal_relative_error", g.max_diagonal_relative_error}};
    sum << ", Gibbs diagonal error " << g.max_diagonal_relative_error;
  }
  out.summary = sum.str() + "\n";
  return out;
}

CommandOutput run_figure(int figure, const RunConfig& c) {
  const double alpha = c.number("alpha");
  if (figure == 2) return grid_figure(2, perturbed_grid(alpha, 0.0, c.integer("nmax"), mmax_of(c)), alpha, 0.0);
  if (figure == 3) {
    const double ceps = c.number("c") * c.number("eps");
    return grid_figure(3, perturbed_grid(alpha, ceps, c.integer("nmax"), mmax_of(c)), alpha, ceps);
  }
  if (figure != 1) throw ConfigError("figure must be 1, 2 or 3");

  std::string source;
  const std::vector<Complex> points = spectrum_points(c, source);
  const CuspFit fit = fit_constant(points, c.number("cusp.nu"));
  double re_max = c.number("cusp.re_max");
  if (re_max <= 0.0)
    for (const auto& z : points) re_max = std::max(re_max, z.real());
  if (re_max <= 0.0) re_max = 1.0;
  const Polyline line = region_boundary(fit, 0.0, re_max, c.integer("cusp.samples"));

  CommandOutput out;
  out.stem = "figure1";
  out.csv = csv_row({"kind", "re", "im"});
  for (const auto& z : points) out.csv += csv_row({"point", f(z.real()), f(z.imag())});
  for (const auto& [x, y] : line.upper) out.csv += csv_row({"upper", f(x), f(y)});
  for (const auto& [x, y] : line.lower) out.csv += csv_row({"lower", f(x), f(y)});
  json upper = json::array(), lower = json::array();
  for (const auto& [x, y] : line.upper) upper.push_back({x, y});
  for (const auto& [x, y] : line.lower) lower.push_back({x, y});
  out.results = {{"source", source},
                 {"nu", fit.nu},
                 {"C", fit.C},
                 {"included", fit.included},
                 {"violations", cjson(fit.violations)},
                 {"points", cjson(points)},
                 {"upper", upper},
                 {"lower", lower}};
  std::ostringstream sum;
  sum << "figure 1: " << points.size() << " points, nu = " << fit.nu << ", C = " << fit.C << "\n";
  out.summary = sum.str();
  return out;
}

}  // namespace hypo::cli
