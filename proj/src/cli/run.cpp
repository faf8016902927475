#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "hypo/cli.hpp"

namespace hypo::cli {

namespace {

struct Flags {
  std::string config, emit, out, shift, y_list, model, input;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha, eps, ceps, dt;
  std::optional<int> cutoff, nmax, mmax, k;
  std::optional<long long> steps;
  int figure = 0;
};

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      while (used < item.size() && item[used] == ' ') ++used;
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(flag + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError(flag + ": empty list");
  return out;
}

void apply_flags(const Flags& f, RunConfig& c) {
  if (!f.model.empty()) c.set("model", f.model);
  if (!f.emit.empty()) c.set("output.emit", f.emit);
  if (!f.out.empty()) c.set("output.dir", f.out);
  if (!f.input.empty()) c.set("cusp.input", f.input);
  if (f.seed) c.set("sde.seed", *f.seed);
  if (f.alpha) c.set("alpha", *f.alpha);
  if (f.eps) c.set("eps", *f.eps);
  if (f.ceps) {
    c.set("c", 1.0);
    c.set("eps", *f.ceps);
  }
  if (f.dt) c.set("sde.dt", *f.dt);
  if (f.steps) c.set("sde.steps", *f.steps);
  if (f.cutoff) c.set("basis.cutoff", *f.cutoff);
  if (f.nmax) c.set("nmax", *f.nmax);
  if (f.mmax) c.set("mmax", *f.mmax);
  if (f.k) c.set("solver.k", *f.k);
  if (!f.shift.empty()) {
    const auto v = parse_list(f.shift, "--shift");
    if (v.size() != 2) throw ConfigError("--shift expects RE,IM");
    c.set("solver.shift", v);
  }
  if (!f.y_list.empty()) c.set("probe.ys", parse_list(f.y_list, "--y-list"));
}

int domain_exit(const std::string& command) {
  if (command == "exact" || command == "perturb" || command == "figure2" || command == "figure3") return kExitDomain;
  if (command == "simulate") return kExitSimulation;
  if (command == "sobolev-probe") return kExitProbe;
  if (command == "cusp-fit" || command == "figure1") return kExitFit;
  return kExitConfig;
}

CommandOutput dispatch(const std::string& command, int figure, const RunConfig& c) {
  if (command == "spectrum") return run_spectrum(c);
  if (command == "exact") return run_exact(c);
  if (command == "perturb") return run_perturb(c);
  if (command == "cusp-fit") return run_cusp_fit(c);
  if (command == "hormander") return run_hormander(c);
  if (command == "sobolev-probe") return run_sobolev_probe(c);
  if (command == "simulate") return run_simulate(c);
  return run_figure(figure, c);
}

void write_outputs(const std::string& command, const RunConfig& c, const CommandOutput& result) {
  const std::filesystem::path dir = c.text("output.dir");
  const nlohmann::json doc = make_document(command, c, result.results);
  write_atomic(dir / (result.stem + ".json"), doc.dump(2) + "\n");
  if (c.text("output.emit") == "csv" && !result.csv.empty()) write_atomic(dir / (result.stem + ".csv"), result.csv);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectra, probes and simulations of hypoelliptic Fokker-Planck operators", "hypospec"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "Configuration file (TOML-style or JSON)");
  app.add_option("--emit", f.emit, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", f.out, "Output directory");
  app.add_option("--seed", f.seed, "Random seed");
  app.add_option("--alpha", f.alpha, "Oscillator coupling alpha");
  app.add_option("--eps", f.eps, "Anharmonicity eps");
  app.add_option("--ceps", f.ceps, "Product c * eps (sets c = 1)");
  app.add_option("--cutoff", f.cutoff, "Fock cutoff");
  app.add_option("--nmax", f.nmax, "Largest n in eigenvalue grids");
  app.add_option("--mmax", f.mmax, "Largest m in eigenvalue grids (defaults to nmax)");
  app.add_option("--shift", f.shift, "Arnoldi shift RE,IM");
  app.add_option("--k", f.k, "Number of Arnoldi eigenvalues");
  app.add_option("--y-list", f.y_list, "Comma-separated y values for the Sobolev probe");
  app.add_option("--dt", f.dt, "SDE time step");
  app.add_option("--steps", f.steps, "SDE step count");
  app.add_option("--model", f.model, "oscillator or chain")->check(CLI::IsMember({"oscillator", "chain"}));
  app.add_option("--input", f.input, "Spectrum CSV for cusp fits");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"spectrum", "Eigenvalues of the truncated generator"},
      {"exact", "Closed-form eigenvalues of the harmonic generator"},
      {"perturb", "First-order perturbed eigenvalues"},
      {"cusp-fit", "Fit cusp and tau enclosures to a spectrum"},
      {"hormander", "Bracket non-degeneracy check"},
      {"sobolev-probe", "Weighted Sobolev estimate probe on a grid"},
      {"simulate", "Langevin simulation with stationary statistics"},
      {"figure", "Plot data for figure 1, 2 or 3"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    if (name == "figure") sub->add_option("number", f.figure, "1, 2 or 3")->required()->check(CLI::Range(1, 3));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  std::string command = app.get_subcommands().front()->get_name();
  if (command == "figure") command += std::to_string(f.figure);

  RunConfig config = RunConfig::defaults();
  try {
    if (!f.config.empty()) config = load_config(f.config);
    apply_flags(f, config);
    validate_for(command, config);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  }

  try {
    const CommandOutput result = dispatch(command, f.figure, config);
    write_outputs(command, config, result);
    out << result.summary;
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const SimulationError& e) {
    err << "simulation error: " << e.what() << "\n";
    return kExitSimulation;
  } catch (const ProbeError& e) {
    err << "probe error: " << e.what() << "\n";
    return kExitProbe;
  } catch (const FitError& e) {
    err << "fit error: " << e.what() << "\n";
    return kExitFit;
  } catch (const BasisMismatch& e) {
    err << "basis error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return domain_exit(command);
  } catch (const std::exception& e) {
    err << "unexpected error: " << e.what() << "\n";
    return kExitUnexpected;
  }
}

}  // namespace hypo::cli
