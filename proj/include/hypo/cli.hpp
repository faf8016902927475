#pragma once

// Command-line front end: configuration documents, output files and the
// subcommands of the hypospec binary.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hypo/common.hpp"

namespace hypo::cli {

/// Unknown key, wrong value type, malformed or empty configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An input file cannot be read or an output file cannot be written.
class IoError : public Error {
 public:
  using Error::Error;
};

enum ExitCode : int {
  kExitOk = 0,
  kExitUnexpected = 1,
  kExitConfig = 2,
  kExitSolver = 3,
  kExitDomain = 4,
  kExitSimulation = 5,
  kExitProbe = 6,
  kExitFit = 7,
  kExitIo = 8,
};

/// Flat map from dotted keys ("sde.dt") to values, pre-filled with defaults.
/// Only keys present in the defaults are accepted, with the same value kind.
class RunConfig {
 public:
  static RunConfig defaults();

  void set(const std::string& key, const nlohmann::json& value);
  bool has(const std::string& key) const { return values_.contains(key); }
  const nlohmann::json& values() const { return values_; }

  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  std::uint64_t unsigned_integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;

 private:
  const nlohmann::json& at(const std::string& key) const;
  nlohmann::json values_ = nlohmann::json::object();
};

/// Apply a configuration document on top of the defaults.  Accepts a
/// TOML-style document (`[section]` headers, `key = value` lines with numbers,
/// quoted strings, booleans and numeric arrays, `#` comments) or a JSON
/// object, either flat with dotted keys, nested by section, or a full output
/// document carrying a "parameters" object.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// 17 significant digits, '.' decimal separator.
std::string format_double(double v);
/// Write to a temporary file in the target directory, then rename.
void write_atomic(const std::filesystem::path& path, std::string_view content);
/// Points from a CSV with `re` and `im` columns; rows whose `resolved`
/// column is present and false are skipped.
std::vector<Complex> read_spectrum_csv(const std::filesystem::path& path);

struct CommandOutput {
  std::string stem;           // output file name without extension
  nlohmann::json results;     // goes under "results" in the JSON document
  std::string csv;            // empty when the command has no tabular output
  std::string summary;        // one or more lines for standard output
};

/// Full JSON document: schema_version, command, parameters and results.
nlohmann::json make_document(const std::string& command, const RunConfig& config, const nlohmann::json& results);

CommandOutput run_spectrum(const RunConfig& config);
CommandOutput run_exact(const RunConfig& config);
CommandOutput run_perturb(const RunConfig& config);
CommandOutput run_cusp_fit(const RunConfig& config);
CommandOutput run_hormander(const RunConfig& config);
CommandOutput run_sobolev_probe(const RunConfig& config);
CommandOutput run_simulate(const RunConfig& config);
CommandOutput run_figure(int figure, const RunConfig& config);

/// Parameter checks performed before any computation; throws ConfigError.
void validate_for(const std::string& command, const RunConfig& config);

/// Entry point of the binary; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hypo::cli
