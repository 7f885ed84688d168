#pragma once

// File formats. Flat daily rows are CSV, nested records are JSON lines;
// every date is an ISO-8601 UTC calendar day.

#include "zombiescope/classify.hpp"
#include "zombiescope/epochs.hpp"
#include "zombiescope/indicators.hpp"
#include "zombiescope/linkage.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace zs {

namespace fs = std::filesystem;

/// Malformed input. `line` is 1-based, 0 when not tied to a line.
class DataError : public std::runtime_error {
public:
  DataError(const std::string& source, std::size_t line, const std::string& msg);
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

// ---------------------------------------------------------------------------
// observations: CSV `domain,date,source`

inline constexpr std::string_view kObservationHeader = "domain,date,source";

struct DomainObservations {
  std::string domain;
  /// Sorted, unique.
  std::vector<Day> zone;
  std::vector<Day> scan;
  bool operator==(const DomainObservations&) const = default;
};

using ObservationSet = std::map<std::string, DomainObservations>;

ObservationSet load_observations(const fs::path& path);
ObservationSet read_observations(std::istream& in, const std::string& source_name = "<stream>");
void write_observations(std::ostream& out, const ObservationSet& obs);

/// Yields one domain at a time from a file whose rows are grouped by
/// domain. Memory stays proportional to the largest single domain.
/// Throws NotGrouped when a domain reappears after another one.
class ObservationStream {
public:
  class NotGrouped : public DataError {
  public:
    using DataError::DataError;
  };

  explicit ObservationStream(std::istream& in, std::string source_name = "<stream>");

  /// False at end of input.
  bool next(DomainObservations& out);

  std::size_t rows() const { return rows_; }
  std::optional<DayRange> span() const { return span_; }

private:
  bool read_row(std::string& domain, Day& day, Source& src);

  std::istream& in_;
  std::string source_;
  std::string line_;
  std::string last_raw_;
  std::string last_canonical_;
  std::size_t line_no_ = 0;
  std::size_t rows_ = 0;
  std::unordered_set<std::string> finished_;
  bool pending_ = false;
  std::string pending_domain_;
  Day pending_day_;
  Source pending_src_ = Source::zone;
  std::optional<DayRange> span_;
};

// ---------------------------------------------------------------------------
// RDAP: JSON lines {domain, query_time, status, registration_date?}

std::vector<RdapRecord> load_rdap(const fs::path& path, Warnings* warnings = nullptr);
std::vector<RdapRecord> read_rdap(std::istream& in, const std::string& source_name, Warnings* warnings);
std::string rdap_to_json(const RdapRecord& r);
void write_rdap(std::ostream& out, const std::vector<RdapRecord>& records);

// ---------------------------------------------------------------------------
// ecosystem records (JSON lines, strict schema)

std::vector<CertificateRecord> load_certificates(const fs::path& path);
std::vector<EnsClaimEvent> load_ens_claims(const fs::path& path);
std::vector<MavenVersionRecord> load_maven_versions(const fs::path& path);
std::vector<GaslessTxtRecord> load_gasless(const fs::path& path);

std::string to_json_line(const CertificateRecord& r);
std::string to_json_line(const EnsClaimEvent& r);
std::string to_json_line(const MavenVersionRecord& r);
std::string to_json_line(const GaslessTxtRecord& r);

template <typename Record>
void write_records(std::ostream& out, const std::vector<Record>& records) {
  for (const auto& r : records)
    out << to_json_line(r) << '\n';
}

struct LinkageLoadOptions {
  const PublicSuffixRules* suffix_rules = nullptr; // builtin when null
  std::string gasless_prefix{kDefaultGaslessPrefix};
};

/// Loads the raw records for `ecosystem` and runs the matching adapter.
std::vector<Linkage> load_linkages(const fs::path& path, Ecosystem ecosystem,
                                   const LinkageLoadOptions& options = {}, Warnings* warnings = nullptr);

// ---------------------------------------------------------------------------
// serving observations: CSV `fingerprint,date,served`

inline constexpr std::string_view kServingHeader = "fingerprint,date,served";

std::vector<ServingObservation> load_serving(const fs::path& path);
void write_serving(std::ostream& out, const std::vector<ServingObservation>& rows);

// ---------------------------------------------------------------------------
// epochs and verdicts (JSON lines)

std::string to_json_line(const EpochTimeline& t);
EpochTimeline timeline_from_json_line(const std::string& line);
void save_epochs(const fs::path& path, const std::vector<EpochTimeline>& timelines);
std::vector<EpochTimeline> load_epochs(const fs::path& path);
TimelineMap index_timelines(std::vector<EpochTimeline> timelines);

std::string to_json_line(const ZombieVerdict& v);
ZombieVerdict verdict_from_json_line(const std::string& line);
void save_verdicts(const fs::path& path, const std::vector<ZombieVerdict>& verdicts);
std::vector<ZombieVerdict> load_verdicts(const fs::path& path);

std::string to_json_line(const Linkage& l);
Linkage linkage_from_json_line(const std::string& line);

// ---------------------------------------------------------------------------
// manifest

struct ManifestEntry {
  std::string path;
  std::size_t records = 0;
  std::string sha256;
  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::vector<ManifestEntry> files;
  std::optional<DayRange> window;
  /// Free-form JSON text (effective configuration, parameters).
  std::string config_json = "{}";

  void add_file(const fs::path& dir, const std::string& relative, std::size_t records);
  void save(const fs::path& path) const;
  static DatasetManifest load(const fs::path& path);
  /// Throws DataError if any recorded digest no longer matches.
  void verify(const fs::path& dir) const;
};

std::string sha256_file(const fs::path& path);
std::size_t count_lines(const fs::path& path);

/// Writes via a temporary sibling and renames over `path`.
void write_file_atomic(const fs::path& path, const std::string& content);

} // namespace zs
