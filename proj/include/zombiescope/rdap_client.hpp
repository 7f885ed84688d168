#pragma once

// Optional RDAP enrichment. Every pipeline stage runs without it; the client
// only produces RdapRecord rows in the same schema load_rdap reads.

#include "zombiescope/dataio.hpp"
#include "zombiescope/epochs.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace zs {

/// TLD -> base URL, from an IANA RDAP bootstrap file (dns.json).
class RdapEndpointMap {
public:
  static RdapEndpointMap from_bootstrap_json(std::string_view text);
  static RdapEndpointMap load(const std::filesystem::path& path);

  void add(std::string tld, std::string base_url);
  /// Base URL for the longest matching suffix of `domain`, or null.
  const std::string* find(std::string_view domain) const;
  std::size_t size() const { return urls_.size(); }

private:
  std::map<std::string, std::string> urls_;
};

struct RdapFetchOptions {
  bool network_allowed = false;
  double requests_per_second = 1.0;
  int max_retries = 3;
  double backoff_budget_seconds = 120.0;
  std::filesystem::path cache_dir;
  double timeout_seconds = 20.0;
  /// Query day stamped on fresh responses; today when unset.
  std::optional<Day> query_day;
  /// Replaces std::this_thread::sleep_for; used by tests.
  std::function<void(double seconds)> sleep;
};

struct RdapFetchResult {
  std::vector<RdapRecord> records;
  std::size_t network_calls = 0;
  std::size_t cache_hits = 0;
  std::vector<std::string> skipped;
  /// Throttling exhausted the retry or backoff budget for some domain.
  bool partial = false;
};

/// Interprets one RDAP response: 200 is positive (registration event date
/// when present), 404 is negative. Anything else throws DataError.
RdapRecord interpret_rdap_response(const std::string& domain, int http_status, const std::string& body,
                                   Day query_day);

/// Fetches each domain once, preferring the cache. Requests are sequential,
/// so at most one is in flight per endpoint.
RdapFetchResult rdap_fetch(const std::vector<std::string>& domains, const RdapEndpointMap& endpoints,
                           const RdapFetchOptions& options, Warnings* warnings = nullptr);

/// Cache directory: $ZOMBIESCOPE_CACHE_DIR, else `fallback`.
std::filesystem::path default_cache_dir(const std::filesystem::path& fallback);

} // namespace zs
