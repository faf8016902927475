#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "hypo/cli.hpp"

namespace hypo::cli {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

double parse_cell(const std::string& cell, const std::filesystem::path& path, int line) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || cell.empty())
    throw IoError(path.string() + ":" + std::to_string(line) + ": cannot parse '" + cell + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp, ec);
      throw IoError("cannot write " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
}

std::vector<Complex> read_spectrum_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read spectrum file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + " is empty");
  const auto header = split_csv(line);
  int re = -1, im = -1, resolved = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "re") re = static_cast<int>(i);
    if (header[i] == "im") im = static_cast<int>(i);
    if (header[i] == "resolved") resolved = static_cast<int>(i);
  }
  if (re < 0 || im < 0) throw IoError(path.string() + " lacks 're' and 'im' columns");
  std::vector<Complex> points;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    if (static_cast<int>(cells.size()) != static_cast<int>(header.size()))
      throw IoError(path.string() + ":" + std::to_string(number) + ": wrong number of columns");
    if (resolved >= 0 && (cells[resolved] == "false" || cells[resolved] == "0")) continue;
    points.emplace_back(parse_cell(cells[re], path, number), parse_cell(cells[im], path, number));
  }
  return points;
}

nlohmann::json make_document(const std::string& command, const RunConfig& config, const nlohmann::json& results) {
  return {{"schema_version", 1}, {"command", command}, {"parameters", config.values()}, {"results", results}};
}

}  // namespace hypo::cli
