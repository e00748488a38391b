#include "fracdrift/path_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fracdrift {

PathParseError::PathParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

void write_paths_csv(std::ostream& out, const std::vector<SamplePath>& paths) {
  out << "replication,k,t_k,B,X\n";
  char buf[160];
  for (std::size_t r = 0; r < paths.size(); ++r) {
    const SamplePath& p = paths[r];
    for (std::size_t k = 0; k < p.x_path.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g\n", r, k, p.grid.time(k),
                    p.b_path[k], p.x_path[k]);
      out << buf;
    }
  }
}

void write_paths_csv(const std::string& file, const std::vector<SamplePath>& paths) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + file + " for writing");
  write_paths_csv(out, paths);
}

namespace {

struct Row {
  std::size_t rep;
  std::size_t k;
  double t;
  double b;
  double x;
};

std::size_t parse_index(const std::string& field, std::size_t line) {
  if (field.empty() || field.find_first_not_of("0123456789") != std::string::npos)
    throw PathParseError(line, "expected a nonnegative integer, got '" + field + "'");
  return static_cast<std::size_t>(std::stoull(field));
}

double parse_real(const std::string& field, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size() || errno == ERANGE || !std::isfinite(v))
    throw PathParseError(line, "expected a finite number, got '" + field + "'");
  return v;
}

Row parse_row(const std::string& text, std::size_t line) {
  std::vector<std::string> fields;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!text.empty() && text.back() == ',') fields.emplace_back();
  if (fields.size() != 5) throw PathParseError(line, "expected 5 columns");
  return {parse_index(fields[0], line), parse_index(fields[1], line), parse_real(fields[2], line),
          parse_real(fields[3], line), parse_real(fields[4], line)};
}

}  // namespace

std::vector<SamplePath> read_paths_csv(std::istream& in) {
  std::string text;
  std::size_t line = 0;
  if (!std::getline(in, text)) throw PathParseError(1, "empty input");
  ++line;
  if (!text.empty() && text.back() == '\r') text.pop_back();
  if (text != "replication,k,t_k,B,X") throw PathParseError(line, "unexpected header '" + text + "'");

  std::vector<std::vector<Row>> blocks;
  std::vector<std::size_t> first_line;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) continue;
    const Row row = parse_row(text, line);
    if (row.rep == blocks.size()) {
      blocks.emplace_back();
      first_line.push_back(line);
    } else if (row.rep + 1 != blocks.size()) {
      throw PathParseError(line, "replications must be contiguous and numbered from 0");
    }
    if (row.k != blocks.back().size()) throw PathParseError(line, "step index out of sequence");
    blocks.back().push_back(row);
  }
  if (blocks.empty()) throw PathParseError(line, "no path rows");

  std::vector<SamplePath> paths;
  paths.reserve(blocks.size());
  for (std::size_t r = 0; r < blocks.size(); ++r) {
    const auto& rows = blocks[r];
    if (rows.size() < 2) throw PathParseError(first_line[r], "a path needs at least two rows");
    if (rows.front().t != 0.0) throw PathParseError(first_line[r], "t_k must start at 0");
    const double t_final = rows.back().t;
    if (!(t_final > 0.0)) throw PathParseError(first_line[r], "t_k must be increasing");
    const FbmGrid grid(t_final, rows.size() - 1);
    if (r > 0 && !(grid == paths.front().grid))
      throw PathParseError(first_line[r], "replication grid differs from replication 0");
    SamplePath p{grid, {}, {}, rows.front().x, std::nullopt};
    p.b_path.reserve(rows.size());
    p.x_path.reserve(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (std::abs(rows[k].t - grid.time(k)) > 1e-9 * t_final)
        throw PathParseError(first_line[r] + k, "t_k is not on a uniform grid");
      p.b_path.push_back(rows[k].b);
      p.x_path.push_back(rows[k].x);
    }
    paths.push_back(std::move(p));
  }
  return paths;
}

std::vector<SamplePath> read_paths_csv(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file);
  return read_paths_csv(in);
}

}  // namespace fracdrift
