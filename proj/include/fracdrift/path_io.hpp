#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracdrift/sde.hpp"

namespace fracdrift {

class PathParseError : public std::runtime_error {
 public:
  PathParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Columns replication,k,t_k,B,X; values printed with 17 significant digits
/// so a read-back is bit-identical.
void write_paths_csv(std::ostream& out, const std::vector<SamplePath>& paths);
void write_paths_csv(const std::string& file, const std::vector<SamplePath>& paths);

/// Replications must be numbered 0, 1, ... and listed in blocks with k running
/// 0..n; every block must use the same grid. x0 is taken from the k = 0 row.
std::vector<SamplePath> read_paths_csv(std::istream& in);
std::vector<SamplePath> read_paths_csv(const std::string& file);

}  // namespace fracdrift
