#pragma once

// Run configuration: flat "key = value" text with [section] headers that prefix
// keys ("[grid]" + "N = 1024" is "grid.N"). Command-line flags override file keys.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlslab {

/// Invalid configuration. `key` names the offending entry, when there is one.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class RunConfig {
 public:
  RunConfig() = default;

  /// Parses the text format; `origin` only labels error messages.
  static RunConfig parse(const std::string& text, const std::string& origin = "config");
  static RunConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma separated numbers; "inf" is accepted.
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

  /// Canonical "key = value" lines, sorted by key.
  std::string canonical() const;
  /// FNV-1a (64 bit) of canonical(), as 16 hex digits.
  std::string hash() const;

 private:
  std::map<std::string, std::string> values_;
};

std::uint64_t fnv1a64(const std::string& bytes);
/// Number parsing shared with the CLI; accepts "inf". Throws ConfigError naming the key.
double parse_number(const std::string& key, const std::string& text);

}  // namespace nlslab
