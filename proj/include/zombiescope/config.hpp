#pragma once

// Run configuration: a small TOML-style `key = value` file with sections.
//
//   gap_threshold = 80
//   grace = 2
//   agp_days = 5
//   [tld.de]
//   gap_threshold = 30
//   [design]
//   maven.name_takeover = escalates

#include "zombiescope/epochs.hpp"
#include "zombiescope/indicators.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace zs {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Parsed `key = value` text. Section "" holds keys before any header.
/// Values may be bare or double-quoted; `#` starts a comment.
struct KeyValueFile {
  struct Entry {
    std::string value;
    std::size_t line = 0;
  };
  std::string source;
  std::map<std::string, std::map<std::string, Entry>> sections;

  static KeyValueFile parse(std::string_view text, std::string source = "<config>");
  static KeyValueFile load(const std::filesystem::path& path);

  [[noreturn]] void fail(const Entry& e, const std::string& msg) const;
  std::int64_t get_int(const Entry& e) const;
  double get_double(const Entry& e) const;
  bool get_bool(const Entry& e) const;
};

struct RdapFetchConfig {
  bool network_allowed = false;
  double requests_per_second = 1.0;
  int max_retries = 3;
  /// Total time the client may spend waiting on throttling.
  double backoff_budget_seconds = 120.0;
  std::string bootstrap_path;
};

struct RunConfig {
  EpochInferenceParams params;
  /// Keyed by public suffix without a leading dot, e.g. "de" or "co.uk".
  std::map<std::string, EpochInferenceParams> tld_params;
  std::int32_t agp_days = 5;
  std::string gasless_prefix = "ENS1";
  DesignConfig design = DesignConfig::defaults();
  RdapFetchConfig rdap;

  /// Parameters for `domain`: the longest matching TLD override, else the
  /// global values.
  const EpochInferenceParams& params_for(std::string_view domain) const;

  /// Canonical JSON text of every effective value.
  std::string to_json() const;
};

RunConfig parse_config(std::string_view text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Keys accepted in the top-level section, for error messages and docs.
std::vector<std::string> valid_config_keys();

} // namespace zs
