#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace funkgeo {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2, kAssertion = 3 };

struct RunConfig {
  std::string command;
  std::string metric = "euclidean";
  std::optional<std::string> metric_expr;
  std::optional<std::string> candidate;
  std::optional<std::string> candidate_expr;
  int candidate_degree = 1;
  std::optional<std::string> deform;
  std::optional<std::string> deform_expr;
  int n = 2;
  int samples = 200;
  std::uint64_t seed = 42;
  std::optional<std::string> domain;
  std::optional<std::string> json_path;
  bool assert_mode = false;
  std::map<std::string, double> tolerances;  // overrides only
  double c = 1.0;
  std::string a = "1";
  int restarts = 16;
  int max_iter = 200;
};

/// Usage errors: bad flags, bad config files, invalid values.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Names accepted by --tol.
const std::vector<std::string>& tolerance_names();
/// Tolerance in effect for `name` under `config` (override or default).
double tolerance(const RunConfig& config, const std::string& name);

/// Applies an INI-style config file body to `config`. Sections: [metric],
/// [candidate], [sampling], [tolerances], [search]. Throws UsageError.
void apply_config_text(std::string_view text, RunConfig& config);

/// Runs one command and returns the full report. Library errors propagate.
nlohmann::json run_command(const RunConfig& config);

/// Process entry point: parses argv-style arguments (without the program
/// name), runs, writes output, and returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace funkgeo
