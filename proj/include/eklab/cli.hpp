#pragma once

// Experiment runner behind the eklab command line.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace eklab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitConstraintFailure = 2;

inline constexpr const char* kCacheDirEnv = "EKLAB_CACHE_DIR";

/// Every setting of one run. The text form is one `key=value` line per key in
/// a fixed order; parsing and printing round-trip.
struct RunConfig {
  std::string command;  // sieve, pmf, check, moments, cdf, limits, control
  std::string family = "uniform";
  std::optional<std::uint64_t> n;
  std::vector<std::uint64_t> schedule;
  std::optional<double> C;  // set means user-asserted
  std::optional<double> D;
  unsigned max_k = 4;
  bool all_primes = false;
  unsigned r_max = 4;
  std::string centering = "loglog";  // loglog, model
  std::optional<std::uint64_t> cutoff;
  std::uint64_t p = 2;
  std::uint64_t q = 3;
  double tolerance = 1e-2;
  std::string study = "zeta";  // zeta, dependence, lz
  std::vector<double> a_schedule;
  std::vector<double> s_values;
  std::vector<std::pair<double, double>> path;  // (s, alpha)
  std::uint64_t n_cap = 10'000'000;
  std::string out_dir = ".";
  std::optional<std::string> cache_dir;
  unsigned threads = 0;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

std::string to_text(const RunConfig& config);
/// Blank lines and lines starting with '#' are skipped. Throws UsageError
/// naming an unknown key or a malformed value.
RunConfig from_text(std::string_view text);
/// Sets one key from its text value; throws UsageError as from_text.
void set_key(RunConfig& config, std::string_view key, std::string_view value);

struct CacheRecord {
  std::string path;
  std::string sha256;
  bool reused = false;
};

struct RunManifest {
  std::string config_text;
  std::string version;
  double wall_seconds = 0.0;
  std::vector<CacheRecord> caches;
  std::vector<std::string> outputs;
  int exit_code = kExitOk;
  std::string summary;  // one-line human summary
};

/// Executes the configured study, writes its outputs and manifest.json under
/// config.out_dir. Throws on invalid configuration or operational failure.
RunManifest run(const RunConfig& config);

std::string manifest_json(const RunManifest& manifest);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace eklab
