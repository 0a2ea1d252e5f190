#pragma once

// Command dispatch behind the nlslab executable. A run is fully described by a
// RunConfig; the executable only turns flags into config keys.

#include <iosfwd>
#include <string>
#include <vector>

#include "nlslab/config.hpp"

namespace nlslab {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCriterionFailure = 1;
inline constexpr int kExitConfigError = 2;

struct KeyInfo {
  std::string key;
  std::string default_value;  // as written in a config file; empty when there is no default
  std::string help;
};

const std::vector<std::string>& command_names();

/// Keys a command reads, including the shared ones (seed, out, threads, grid, time, data).
std::vector<KeyInfo> command_keys(const std::string& command);

/// The hash written into every output file: the config without "out" and "threads",
/// which change where and how fast, not what, is computed.
std::string output_hash(const RunConfig& config);

/// Validates and runs config["command"], writing artifacts under config["out"] and a short
/// human summary to `log`. Returns an exit code; configuration problems (unknown keys, bad
/// numbers, violated module preconditions) surface as ConfigError.
int run_command(const RunConfig& config, std::ostream& log);

/// {"error": kind, "key": .., "message": ..} on one line.
std::string error_json(const std::string& kind, const std::string& key, const std::string& message);

}  // namespace nlslab
