#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "hypo/cli.hpp"

namespace hypo::cli {

using nlohmann::json;

namespace {

json default_values() {
  return {
      {"model", "oscillator"},
      {"alpha", 1.0},
      {"eps", 0.0},
      {"c", 1.0},
      {"nmax", 8},
      {"mmax", -1},

      {"basis.scheme", "total"},
      {"basis.cutoff", 12},
      {"basis.cutoffs", json::array()},

      {"chain.n", 1},
      {"chain.gamma_l", 1.0},
      {"chain.gamma_r", 1.0},
      {"chain.lambda_l", 1.0},
      {"chain.lambda_r", 1.0},
      {"chain.t_l", 1.0},
      {"chain.t_r", 1.0},
      {"chain.t_ref", 2.0},
      {"chain.v1", {0.0, 0.0, 1.0}},
      {"chain.v2", {0.0, 0.0, 0.5}},

      {"solver.method", "auto"},
      {"solver.shift", {0.0, 0.0}},
      {"solver.k", 6},
      {"solver.max_subspace", 0},
      {"solver.tol", 1e-12},
      {"solver.dense_limit", 3000},
      {"solver.convergence_step", 4},
      {"solver.convergence_tol", 1e-6},

      {"cusp.input", ""},
      {"cusp.nu", 1.0},
      {"cusp.nu_grid", {0.5, 0.6, 0.7, 0.8, 0.9, 1.0}},
      {"cusp.ceiling", 10.0},
      {"cusp.tau", 1.0},
      {"cusp.samples", 200},
      {"cusp.re_max", 0.0},

      {"hormander.max_rank", 4},
      {"hormander.half_width", 3.0},
      {"hormander.per_axis", 5},
      {"hormander.weight_exponent", 0},

      {"probe.grid", 256},
      {"probe.half_width", 20.0},
      {"probe.delta", 0.1},
      {"probe.eps", 0.1},
      {"probe.ys", {0.0, 10.0, -10.0, 50.0, -50.0}},
      {"probe.hermite_max_level", 5},
      {"probe.wave_packets", 43},
      {"probe.seed", 20240601},
      {"probe.leakage_threshold", 1e-8},

      {"sde.gamma", 1.0},
      {"sde.temperature", 1.0},
      {"sde.nu", 1.0},
      {"sde.eps", 0.0},
      {"sde.dt", 1e-3},
      {"sde.steps", 100000},
      {"sde.seed", 1},
      {"sde.stride", 10},
      {"sde.scheme", "semi_implicit_ou"},
      {"sde.burn_in", 0.1},
      {"sde.noise_sign", 1.0},
      {"sde.decay", true},

      {"output.dir", "."},
      {"output.emit", "csv"},
  };
}

bool same_kind(const json& expected, const json& value) {
  if (expected.is_number()) return value.is_number();
  if (expected.is_array()) {
    if (!value.is_array()) return false;
    for (const auto& v : value)
      if (!v.is_number()) return false;
    return true;
  }
  return expected.type() == value.type();
}

std::string kind_name(const json& v) {
  if (v.is_number()) return "a number";
  if (v.is_array()) return "an array of numbers";
  if (v.is_boolean()) return "a boolean";
  return "a string";
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] void fail_line(int line, const std::string& what) {
  throw ConfigError("line " + std::to_string(line) + ": " + what);
}

// Removes a trailing comment that is not inside a string.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && quoted) {
      ++i;
    } else if (s[i] == '"') {
      quoted = !quoted;
    } else if (s[i] == '#' && !quoted) {
      return s.substr(0, i);
    }
  }
  return s;
}

json parse_number(const std::string& token, int line) {
  std::string t;
  for (char ch : token)
    if (ch != '_') t.push_back(ch);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  const char* first = t.data() + (t.starts_with('+') ? 1 : 0);
  const char* last = t.data() + t.size();
  const bool integral = t.find_first_of(".eE") == std::string::npos;
  if (integral) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec == std::errc() && ptr == last) return v;
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) fail_line(line, "cannot parse value '" + token + "'");
  return v;
}

json parse_value(const std::string& raw, int line) {
  const std::string s = trim(raw);
  if (s.empty()) fail_line(line, "missing value");
  if (s == "true") return true;
  if (s == "false") return false;
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') fail_line(line, "unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      if (s[i] == '\\' && i + 2 < s.size()) {
        const char next = s[++i];
        out.push_back(next == 'n' ? '\n' : next == 't' ? '\t' : next);
      } else if (s[i] == '"') {
        fail_line(line, "unexpected quote in string");
      } else {
        out.push_back(s[i]);
      }
    }
    return out;
  }
  if (s.front() == '[') {
    if (s.back() != ']') fail_line(line, "unterminated array");
    json arr = json::array();
    std::stringstream items(s.substr(1, s.size() - 2));
    std::string item;
    while (std::getline(items, item, ',')) {
      const std::string t = trim(item);
      if (t.empty()) continue;  // trailing comma
      arr.push_back(parse_number(t, line));
    }
    return arr;
  }
  return parse_number(s, line);
}

void flatten(const json& node, const std::string& prefix, json& out) {
  for (const auto& [k, v] : node.items()) {
    const std::string key = prefix.empty() ? k : prefix + "." + k;
    if (v.is_object())
      flatten(v, key, out);
    else
      out[key] = v;
  }
}

json parse_toml(std::string_view text) {
  json out = json::object();
  std::istringstream in{std::string(text)};
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) fail_line(line, "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail_line(line, "expected 'key = value'");
    std::string key = trim(s.substr(0, eq));
    if (key.size() >= 2 && key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);
    if (key.empty()) fail_line(line, "empty key");
    if (!section.empty()) key = section + "." + key;
    if (out.contains(key)) fail_line(line, "duplicate key '" + key + "'");
    out[key] = parse_value(s.substr(eq + 1), line);
  }
  return out;
}

}  // namespace

RunConfig RunConfig::defaults() {
  RunConfig c;
  c.values_ = default_values();
  return c;
}

void RunConfig::set(const std::string& key, const json& value) {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
  if (!same_kind(*it, value)) throw ConfigError("key '" + key + "' expects " + kind_name(*it));
  *it = value;
}

const json& RunConfig::at(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
  return *it;
}

double RunConfig::number(const std::string& key) const { return at(key).get<double>(); }

int RunConfig::integer(const std::string& key) const {
  const double v = number(key);
  if (v != std::floor(v) || std::abs(v) > std::numeric_limits<int>::max())
    throw ConfigError("key '" + key + "' must be an integer");
  return static_cast<int>(v);
}

std::uint64_t RunConfig::unsigned_integer(const std::string& key) const {
  const json& v = at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
  throw ConfigError("key '" + key + "' must be a non-negative integer");
}

bool RunConfig::boolean(const std::string& key) const { return at(key).get<bool>(); }

std::string RunConfig::text(const std::string& key) const { return at(key).get<std::string>(); }

std::vector<double> RunConfig::numbers(const std::string& key) const { return at(key).get<std::vector<double>>(); }

RunConfig parse_config(std::string_view text) {
  const std::string body = trim(text);
  json flat = json::object();
  if (!body.empty() && body.front() == '{') {
    json doc;
    try {
      doc = json::parse(body);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("malformed JSON configuration: ") + e.what());
    }
    if (doc.contains("parameters")) {
      if (!doc["parameters"].is_object()) throw ConfigError("'parameters' must be an object");
      doc = doc["parameters"];
    }
    flatten(doc, "", flat);
  } else {
    flat = parse_toml(body);
  }
  if (flat.empty()) throw ConfigError("configuration is empty");
  RunConfig config = RunConfig::defaults();
  for (const auto& [k, v] : flat.items()) config.set(k, v);
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read configuration file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace hypo::cli
