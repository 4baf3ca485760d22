#pragma once

// Command-line front end. Everything except argument parsing is callable
// in-process so tests and the acceptance run drive the same code paths.

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "besovop/kernel.hpp"
#include "besovop/wavelet.hpp"
#include "json.hpp"

namespace besovop::cli {

enum ExitCode : int { kPass = 0, kRuntimeFailure = 1, kUsageError = 2 };

/// Resolved parameters of one run. Config-file values are overridden by
/// explicit flags.
struct RunConfig {
  std::string command;
  std::string suite;
  std::uint64_t seed = 1;
  int levels = 7;  // -J: 2^J grid points per axis
  std::string filter = "daubechies:3";
  std::optional<double> p;
  std::optional<double> q;
  std::optional<double> alpha;
  std::string out = ".";
  std::string format = "json";
  std::string family;
  std::string kernel;  // input kernel file
  std::string label;
  std::uint64_t seed_first = 1;  // --seeds a..b
  std::uint64_t seed_last = 10;
  std::size_t n = 32;
  std::string profile = "geometric";
  std::map<std::string, double> params;  // --param name=value

  nlohmann::json to_json() const;
};

/// Thrown for invalid flags or config values; mapped to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Applies a JSON config object onto `config`. Unknown keys are usage errors.
void apply_config_json(RunConfig& config, const nlohmann::json& j);

/// Parses "a..b"; UsageError on malformed or empty ranges.
std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text);

/// The kernel a command works on: --kernel file, or a built-in --family
/// sampled on the 2^J x 2^J unit box.
SampledKernel input_kernel(const RunConfig& config);

/// Family parameters with command-line defaults for the deterministic
/// families, overridden by --alpha, --p and --param.
KernelSpec kernel_spec(const RunConfig& config);

struct SuiteResult {
  nlohmann::json report;
  bool pass = false;
};

/// hardy, mu_estimate, lpq, nonlinear, main_embedding or schur.
/// UsageError for other names.
SuiteResult run_suite(const RunConfig& config);

/// Labelled test kernels on the 2^levels unit box, sorted by label.
std::vector<SampledKernel> corpus(int levels);

/// Runs one command and writes its artifacts under config.out. Returns the
/// exit code; messages go to `log`.
int run_command(const RunConfig& config, std::ostream& log);

/// Full entry point: parse argv, run, map errors to exit codes.
int run(int argc, const char* const* argv, std::ostream& log, std::ostream& err);

/// Serialization shared by every artifact: sorted keys, two-space indent,
/// trailing newline.
void write_json(const std::string& path, const nlohmann::json& j);
void write_text(const std::string& path, const std::string& text);
/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace besovop::cli
