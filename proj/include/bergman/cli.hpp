#pragma once

// Experiment runner behind the bergman_lab executable: subcommands,
// flat key=value configuration, CSV and JSON outputs.

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "bergman/bekolle.hpp"
#include "bergman/inflation.hpp"
#include "bergman/projector.hpp"

namespace bergman::cli {

inline constexpr const char* kArtifactVersion = "1.0.0";
inline constexpr int kCsvSchema = 1;

enum ExitCode : int { kPass = 0, kCheckFailure = 1, kConfigError = 2, kNumericFailure = 3 };

/// Bad configuration; the message names the key and, for files, the line.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Flat key=value file: '#' starts a comment, blank lines are skipped,
/// duplicate keys are rejected. Returns key -> (value, line).
std::map<std::string, std::pair<std::string, int>> read_config_file(const std::string& path);

/// power:t=<t>, dostanic:A=<A>,B=<B>,alpha=<alpha>; "one" is power:t=0.
RadialWeight parse_radial_weight(const std::string& spec);
/// zeta_pow:p0=<p0>, remark35[:p0=<p0>], appendixA[:p0=<p0>], one; p is the
/// exponent context of |F|^{2-p}.
HalfPlaneWeight parse_halfplane_weight(const std::string& spec, double p);
/// "a:b" (unit step), "a:b:step" or a comma-separated list.
std::vector<double> parse_grid(const std::string& spec);
/// max_terms=<n>,tail_tol=<x>,consecutive_small=<n>; missing keys keep defaults.
TruncationPolicy parse_policy(const std::string& spec);

struct ExperimentConfig {
  std::string subcommand;
  /// Every recognised key with its final value (flags override the file).
  std::map<std::string, std::string> values;
  std::uint64_t seed = 1;

  const std::string& get(const std::string& key) const;
  double number(const std::string& key) const;
  int integer(const std::string& key) const;
};

struct CheckResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
  double seconds = 0.0;
};

struct RunReport {
  ExperimentConfig config;
  std::vector<CheckResult> checks;
  std::vector<std::string> outputs;
  bool numeric_failure = false;

  bool passed() const;
  nlohmann::ordered_json to_json() const;
};

/// Runs one configured experiment; side-effect files are written atomically.
RunReport run(const ExperimentConfig& config);

/// Merges RunReport JSON files into one summary; throws ConfigError on
/// malformed input.
nlohmann::ordered_json merge_reports(const std::vector<std::string>& paths);

/// Writes text to path through a temporary file and a rename.
void write_atomic(const std::string& path, const std::string& text);

/// Command-line entry point; returns the process exit code.
int main(int argc, char** argv);

}  // namespace bergman::cli
