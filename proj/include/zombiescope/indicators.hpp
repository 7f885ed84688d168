#pragma once

#include "zombiescope/classify.hpp"
#include "zombiescope/stats.hpp"

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace zs {

struct ServingObservation {
  std::string fingerprint;
  Day date;
  bool served = false;
  bool operator==(const ServingObservation&) const = default;
};

// ---------------------------------------------------------------------------
// AGP deaths

inline constexpr std::int32_t kDefaultAgpDays = 5;

struct AgpStats {
  std::size_t zombies = 0;
  std::size_t within_agp = 0;
  double fraction = 0;
  /// birth-epoch length in days -> zombie count
  std::map<std::int32_t, std::size_t> lifespan_histogram;
};

/// Over zombies with a known birth epoch.
AgpStats agp_death_stats(std::span<const ZombieVerdict> verdicts, std::int32_t agp_days = kDefaultAgpDays);

// ---------------------------------------------------------------------------
// certificate serving

struct ServedEntry {
  std::string fingerprint;
  std::int32_t days_served = 0;
  std::int32_t zombie_days = 0;
  bool operator==(const ServedEntry&) const = default;
};

struct ServedAfterDeath {
  /// Sorted by fingerprint.
  std::vector<ServedEntry> per_zombie;
  Cdf distribution;
  std::size_t never_served = 0;
  std::size_t served_60_plus = 0;
  double never_served_fraction = 0;
  double served_60_plus_fraction = 0;
};

/// Days each Web PKI zombie certificate was seen served inside
/// [zombie_birth, min(death, as_of)]. Rows outside a certificate's validity
/// are ignored with one aggregated warning.
ServedAfterDeath served_after_death(std::span<const ServingObservation> serving,
                                    std::span<const ZombieVerdict> verdicts, Warnings* warnings = nullptr);

struct ServedAfterRereg {
  std::size_t zombies = 0;
  std::size_t overlap = 0;
  std::size_t served_past = 0;
  /// Fingerprints whose validity overlaps the next registration, sorted.
  std::vector<std::string> overlapping;
  /// Days served on or after the next epoch start, one per served-past cert.
  std::vector<double> days_served_after;
  std::optional<double> median_days;
};

ServedAfterRereg served_after_rereg(std::span<const ServingObservation> serving,
                                    std::span<const ZombieVerdict> verdicts);

// ---------------------------------------------------------------------------
// revocation

struct RevocationComparison {
  std::size_t rereg_total = 0;
  std::size_t rereg_revoked = 0;
  std::size_t other_total = 0;
  std::size_t other_revoked = 0;
  std::optional<double> rate_rereg;
  std::optional<double> rate_other;
  /// rate_rereg / rate_other; absent when not applicable.
  std::optional<double> ratio;
};

/// Revocation rates for Web PKI zombies whose validity overlaps a new
/// registration versus the rest.
RevocationComparison revocation_comparison(std::span<const ZombieVerdict> verdicts);

// ---------------------------------------------------------------------------
// Maven activity

struct MavenActivityBreakdown {
  std::size_t total = 0;
  std::size_t live = 0;
  std::size_t indeterminate = 0;
  std::size_t zombie_unknown_start = 0;
  std::size_t zombie_known_start = 0;
  std::size_t no_changes_while_zombie = 0;
  std::size_t new_versions_while_zombie = 0;
  std::size_t not_reregistered = 0;
  std::size_t reregistered = 0;
  std::size_t no_changes_after_rereg = 0;
  std::size_t new_versions_after_rereg = 0;

  /// Empty when every level's children sum to their parent.
  std::string check() const;
  bool operator==(const MavenActivityBreakdown&) const = default;
};

/// Only publish days on or before each verdict's as_of are considered.
MavenActivityBreakdown maven_activity_breakdown(std::span<const ZombieVerdict> verdicts);

// ---------------------------------------------------------------------------
// indicator matrix

enum class Attack { bulk_name_creation, name_squatting, resource_squatting, name_takeover, resource_takeover };
inline constexpr std::array kAllAttacks = {Attack::bulk_name_creation, Attack::name_squatting,
                                           Attack::resource_squatting, Attack::name_takeover,
                                           Attack::resource_takeover};

std::string_view to_string(Attack a);
Attack parse_attack(std::string_view s);

enum class IndicatorState { prevented, no_evidence, insufficient, available, escalates };
std::string_view to_string(IndicatorState s);

/// What the design config says about one (attack, ecosystem) pair.
enum class DesignFact { prevented, escalates, insufficient, computed };
DesignFact parse_design_fact(std::string_view s);
std::string_view to_string(DesignFact f);

struct DesignConfig {
  std::map<std::pair<Attack, Ecosystem>, DesignFact> facts;
  /// Supporting count at or above which a computed cell is "available".
  std::size_t available_min_count = 1;

  /// Ecosystems with at least one declared fact.
  std::vector<Ecosystem> ecosystems() const;
  /// Web PKI, ENS on-chain and Maven with the published design facts.
  static DesignConfig defaults();
};

struct IndicatorCell {
  IndicatorState state = IndicatorState::insufficient;
  std::optional<std::size_t> supporting;
};

struct IndicatorMatrix {
  std::map<std::pair<Attack, Ecosystem>, IndicatorCell> cells;
};

class MissingDesignEntry : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Supporting counts each computed cell reads.
struct IndicatorEvidence {
  std::map<Ecosystem, std::size_t> verdicts;
  std::map<Ecosystem, std::size_t> zombies_within_agp;
  std::map<Ecosystem, std::size_t> active_zombies;
  std::map<Ecosystem, std::size_t> overwritten_while_zombie;
  std::size_t maven_new_versions_while_zombie = 0;
  std::size_t maven_new_versions_after_rereg = 0;
};

IndicatorEvidence collect_evidence(std::span<const ZombieVerdict> verdicts, std::int32_t agp_days);

IndicatorMatrix indicator_matrix(const IndicatorEvidence& evidence, const DesignConfig& design);

} // namespace zs
