#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace jetinv::cli {

enum class Command { Classify, Invariants, Transform, Verify, Selftest };
enum class Format { Text, Json };

struct MapText {
  std::string t_new, x_new, t_old, x_old;
};

struct CliConfig {
  Command command = Command::Classify;
  std::string equation;
  std::optional<MapText> map;
  std::vector<std::string> names;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  std::optional<std::string> box;
  std::optional<std::string> point;
  Format format = Format::Text;
};

enum ExitCode {
  kOk = 0,
  kParseError = 1,
  kDomainError = 2,
  kResourceError = 3,
  kVerificationFailed = 4,
};

/// Runs one command. The report goes to `out`, diagnostics to `err`; with
/// JSON output, errors are also written to `out` as {"error": {...}}.
int run(const CliConfig &config, std::ostream &out, std::ostream &err);

/// Parses argv into a config, or returns an exit code (0 after --help).
struct Parsed {
  std::optional<CliConfig> config;
  int exit_code = kOk;
};
Parsed parse_arguments(int argc, char **argv, std::ostream &out,
                       std::ostream &err);

} // namespace jetinv::cli
