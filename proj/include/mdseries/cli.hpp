#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mdseries::cli {

enum ExitCode : int { kOk = 0, kNumericalFailure = 1, kUsageError = 2 };

/// Everything a command needs, after flags and the optional key=value
/// configuration file have been merged (flags win).
struct RunConfig {
  std::string command;
  std::uint64_t seed = 1;
  int npolys = 64;
  int nvars = 64;
  int terms = 64;
  int max_exponent = 1;
  std::vector<int> degrees{8, 16, 32};
  std::vector<int> levels{1, 2, 3, 4, 5, 8, 10};
  std::vector<unsigned> workers{1, 2, 4, 8};
  double tolerance = 1.0e-32;
  std::optional<int> max_iterations;
  int repetitions = 3;
  std::string out;
  std::string plot;
  std::string system;
  std::string start;
};

/// Parses "1,2,4,8" or "max" (the number of physical cores).
std::vector<unsigned> parse_workers(const std::string& text);

/// Throws ArgumentError when a field is out of range.
void validate(const RunConfig& cfg);

/// Runs the tool with the given arguments (without the program name) and
/// returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mdseries::cli
