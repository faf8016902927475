#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hypo/cusp.hpp"
#include "hypo/eigensolver.hpp"
#include "hypo/exact_spectrum.hpp"
#include "hypo/models.hpp"
#include "hypo/sde.hpp"
#include "hypo/symbolic.hpp"

namespace py = pybind11;
using namespace hypo;

namespace {

py::dict spectrum_dict(const Spectrum& s) {
  py::dict d;
  d["eigenvalues"] = s.eigenvalues;
  d["residuals"] = s.residuals;
  d["resolved"] = std::vector<bool>(s.resolved.begin(), s.resolved.end());
  d["provenance"] = s.provenance;
  return d;
}

py::dict oscillator_spectrum(double alpha, double eps, double c, int cutoff, const std::string& method, Complex shift,
                             int k) {
  OscParams p;
  p.alpha = alpha;
  p.eps = eps;
  p.c = c;
  const FockBasis basis = FockBasis::total_level(2, cutoff);
  const SparseOperator a = oscillator_matrix(p, basis);
  if (method == "dense") return spectrum_dict(dense_eigs(a));
  if (method != "arnoldi") throw DomainError("method must be 'dense' or 'arnoldi'");
  ArnoldiOptions o;
  o.shift = shift;
  o.k = k;
  return spectrum_dict(arnoldi_eigs(a, o));
}

py::dict hormander_oscillator(double alpha, double eps, double c, int max_rank) {
  OscParams p;
  p.alpha = alpha;
  p.eps = eps;
  p.c = c;
  const GeneratorSpec spec = oscillator_spec(p);
  const auto samples = sample_grid(2, 3.0, 7);
  py::dict d;
  d["pass"] = false;
  for (int m = 1; m <= max_rank; ++m) {
    const BracketFamily family = bracket_closure(spec.drift, spec.diffusion, m, false);
    const NondegeneracyReport r = nondegeneracy_margin(family, samples, 0);
    std::vector<std::string> provenance;
    for (const auto& e : family.entries) provenance.push_back(e.provenance);
    d["rank"] = m;
    d["margin"] = r.margin;
    d["provenance"] = provenance;
    if (r.pass) {
      d["pass"] = true;
      break;
    }
  }
  return d;
}

py::dict simulate_oscillator(double gamma, double temperature, double nu, double eps, double dt, long long steps,
                             std::uint64_t seed, int stride) {
  const SdeSystem s = oscillator_system(gamma, temperature, nu, eps);
  IntegrateOptions o;
  o.dt = dt;
  o.steps = steps;
  o.seed = seed;
  o.stride = stride;
  Trajectory t;
  {
    py::gil_scoped_release release;
    t = integrate(s, o);
  }
  py::array_t<double> samples({static_cast<py::ssize_t>(t.size()), static_cast<py::ssize_t>(t.dim)});
  std::copy(t.samples.begin(), t.samples.end(), samples.mutable_data());
  py::dict moments;
  if (t.size() >= 64)
    for (const auto& [k, e] : stationary_moments(s, t)) moments[py::str(k)] = py::make_tuple(e.mean, e.error);
  py::dict d;
  d["samples"] = samples;
  d["moments"] = moments;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectra of hypoelliptic Fokker-Planck operators";

  auto base = py::register_exception<Error>(m, "HypoError");
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<BasisMismatch>(m, "BasisMismatch", base.ptr());
  py::register_exception<SolverError>(m, "SolverError", base.ptr());
  py::register_exception<SimulationError>(m, "SimulationError", base.ptr());
  py::register_exception<FitError>(m, "FitError", base.ptr());

  m.def("exact_eigenvalue", &exact_eigenvalue, py::arg("n"), py::arg("m"), py::arg("alpha"),
        "n lambda_+ + m lambda_- of the harmonic generator.");
  m.def(
      "delta_nm",
      [](int n, int m, double alpha, int cutoff) {
        if (cutoff < 0) cutoff = n + m + 4;
        return delta_nm(n, m, alpha, FockBasis::total_level(2, cutoff)).delta;
      },
      py::arg("n"), py::arg("m"), py::arg("alpha"), py::arg("cutoff") = -1,
      "First-order coefficient of the q^3 d_p perturbation.");
  m.def("oscillator_spectrum", &oscillator_spectrum, py::arg("alpha") = 1.0, py::arg("eps") = 0.0, py::arg("c") = 1.0,
        py::arg("cutoff") = 12, py::arg("method") = "dense", py::arg("shift") = Complex(0.0),
        py::arg("k") = 6, "Eigenvalues of the oscillator generator on a total-level Fock basis.");
  m.def(
      "fit_constant",
      [](const std::vector<Complex>& points, double nu) {
        const CuspFit f = fit_constant(points, nu);
        return py::make_tuple(f.C, f.included, f.violations);
      },
      py::arg("points"), py::arg("nu") = 1.0, "Returns (C, included, violations).");
  m.def("hormander_oscillator", &hormander_oscillator, py::arg("alpha") = 1.0, py::arg("eps") = 0.0,
        py::arg("c") = 1.0, py::arg("max_rank") = 4);
  m.def("counter_normal", &counter_normal, py::arg("seed"), py::arg("channel"), py::arg("step"));
  m.def("simulate_oscillator", &simulate_oscillator, py::arg("gamma"), py::arg("temperature"), py::arg("nu"),
        py::arg("eps") = 0.0, py::arg("dt") = 1e-3, py::arg("steps") = 100000, py::arg("seed") = 1,
        py::arg("stride") = 10);
}
