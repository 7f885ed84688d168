#pragma once

// Seeded ground-truth worlds, degraded observations derived from them, and
// a brute-force evaluator that reads the truth directly.

#include "zombiescope/classify.hpp"
#include "zombiescope/dataio.hpp"
#include "zombiescope/indicators.hpp"
#include "zombiescope/stats.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace zs {

struct SynthParams {
  std::size_t domains = 1000;
  Day window_start = Day::from_ymd(2019, 1, 1);
  std::int32_t window_days = 1826;
  /// Probability a registration is not renewed at each anniversary.
  double nonrenewal_per_year = 0.3;
  /// Fraction of epochs deleted inside the grace period (1..5 days).
  double tasting_fraction = 0.1;
  /// After an epoch ends: re-registered 1..80 days later.
  double dropcatch_fraction = 0.2;
  /// Otherwise: re-registered after a gap of at least `rereg_min_gap` days.
  double rereg_fraction = 0.3;
  std::int32_t rereg_min_gap = 80;
  std::int32_t rereg_max_gap = 400;

  double cert_fraction = 0.7;      // epochs that obtain certificates
  double cert_long_fraction = 0.1; // 398-day instead of 90-day validity
  double revocation_prob = 0.05;
  /// A certificate still valid when the name is re-registered is revoked
  /// shortly after the new registration with this probability.
  double rereg_revocation_prob = 0.3;
  double ens_fraction = 0.2;
  double maven_fraction = 0.15;
  double gasless_fraction = 0.05;
  /// Daily probability a namespace publishes a version after its epoch ended.
  double maven_zombie_publish_rate = 0.004;
  double maven_live_publish_rate = 0.02;
  double serving_live_prob = 0.8;
  double serving_zombie_prob = 0.4;
  std::int32_t serving_interval_days = 7;

  DayRange window() const { return {window_start, window_start + (window_days - 1)}; }
  /// Throws std::invalid_argument on a degenerate or out-of-range value.
  void validate() const;
};

struct NoiseModel {
  double zone_coverage = 1.0;
  double scan_coverage = 0.0;
  double rdap_coverage = 1.0;
  double rdap_date_omission = 0.0;
  /// One negative RDAP query per unregistered stretch, with this probability.
  double rdap_negative_coverage = 1.0;

  static NoiseModel clean() { return {}; }
  void validate() const;
};

/// True registration epoch. `end` may lie beyond the window.
struct TrueEpoch {
  Day start;
  Day end;
  bool operator==(const TrueEpoch&) const = default;
};

struct WorldDomain {
  std::string name;
  std::vector<TrueEpoch> epochs;
};

struct GroundTruthWorld {
  SynthParams params;
  std::uint64_t seed = 0;
  std::vector<WorldDomain> domains; // sorted by name

  /// Linkages as the generator created them, in canonical order.
  std::vector<Linkage> linkages;
  std::vector<CertificateRecord> certificates;
  std::vector<EnsClaimEvent> ens_claims;
  std::vector<MavenVersionRecord> maven_versions;
  std::vector<GaslessTxtRecord> gasless;
  std::vector<ServingObservation> serving;

  DayRange window() const { return params.window(); }
  const WorldDomain* find(const std::string& name) const;
};

/// Deterministic for a fixed (params, seed).
GroundTruthWorld generate_world(const SynthParams& params, std::uint64_t seed);

struct EmittedObservations {
  ObservationSet observations;
  std::vector<RdapRecord> rdap; // sorted by (domain, query_time)
};

EmittedObservations emit_observations(const GroundTruthWorld& world, const NoiseModel& noise,
                                      std::uint64_t seed);

/// Writes observations.csv, rdap.jsonl, one raw-record file per ecosystem,
/// serving.csv, truth.jsonl and manifest.json into `dir`. The manifest
/// records the seed, world parameters and noise model.
void write_world(const GroundTruthWorld& world, const NoiseModel& noise, const EmittedObservations& emitted,
                 const fs::path& dir);

/// File names used by write_world.
namespace world_files {
inline constexpr const char* observations = "observations.csv";
inline constexpr const char* rdap = "rdap.jsonl";
inline constexpr const char* certificates = "certificates.jsonl";
inline constexpr const char* ens = "ens_claims.jsonl";
inline constexpr const char* maven = "maven_versions.jsonl";
inline constexpr const char* gasless = "gasless_txt.jsonl";
inline constexpr const char* serving = "serving.csv";
inline constexpr const char* truth = "truth.jsonl";
inline constexpr const char* manifest = "manifest.json";
} // namespace world_files

struct OracleOptions {
  std::int32_t agp_days = kDefaultAgpDays;
  /// Copied into each expected timeline; truth does not depend on them.
  EpochInferenceParams params;
};

/// Expected outputs computed from true epochs without running inference.
struct OracleResult {
  Day as_of;
  std::vector<EpochTimeline> timelines; // sorted by domain
  std::vector<ZombieVerdict> verdicts;  // canonical linkage order
  std::map<Ecosystem, EcosystemSummary> summary;
  std::vector<TimeSeries> series; // over [window.first, as_of]
  MavenActivityBreakdown maven;
  AgpStats agp;
  std::vector<ServedEntry> served; // sorted by fingerprint
  RevocationComparison revocation;
  std::vector<double> zombie_gaps;     // sorted
  std::vector<double> non_zombie_gaps; // sorted
  std::size_t webpki_zombies = 0;
  std::size_t webpki_revoked_zombies = 0;
  IndicatorEvidence evidence;
};

OracleResult oracle_evaluate(const GroundTruthWorld& world, Day as_of, const OracleOptions& options = {});

/// Truth file: one JSON line per domain with its true epochs.
std::string truth_json_line(const WorldDomain& d);

/// Loads `key = value` lines (sections [world] and [noise]).
void load_synth_params(const fs::path& path, SynthParams& params, NoiseModel& noise);

} // namespace zs
