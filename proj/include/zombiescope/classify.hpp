#pragma once

#include "zombiescope/epochs.hpp"
#include "zombiescope/linkage.hpp"

#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace zs {

enum class Status { live, zombie, indeterminate, exempt };

std::string_view to_string(Status s);
Status parse_status(std::string_view s);

struct ReRegistrationInfo {
  Day next_epoch_start;
  bool overlaps_linkage_validity = false;
  bool operator==(const ReRegistrationInfo&) const = default;
};

/// Verdict for one linkage at an analysis date.
///
/// A zombie normally has a known birth epoch and `zombie_birth` (the day
/// after that epoch ended). When the linkage predates every observed
/// interval but a later interval has an RDAP-closed start, the creating
/// registration has provably ended yet its end day is unknown: the verdict
/// is a zombie without `zombie_birth`.
struct ZombieVerdict {
  Linkage linkage;
  Status status = Status::indeterminate;
  std::optional<OwnershipInterval> birth_epoch;
  std::optional<Day> zombie_birth;
  std::optional<Day> zombie_death;
  std::optional<ReRegistrationInfo> rereg;
  /// Linkage valid on the analysis date (birth <= as_of < death).
  bool active = false;
  Day as_of;

  bool known_zombie_start() const { return status == Status::zombie && zombie_birth.has_value(); }
  bool operator==(const ZombieVerdict&) const = default;
};

class DomainMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// `timeline` may be null when no observations exist for the name.
ZombieVerdict classify_linkage(const Linkage& linkage, const EpochTimeline* timeline, Day as_of);

struct ZombieDuration {
  std::int32_t days = 0;
  /// The linkage was still valid at the analysis date.
  bool censored = false;
  bool operator==(const ZombieDuration&) const = default;
};

/// Inclusive day count from zombie birth to min(death, as_of).
/// Throws std::invalid_argument for a verdict without a known zombie birth.
ZombieDuration zombie_duration(const ZombieVerdict& verdict, Day as_of);

struct EcosystemSummary {
  std::size_t total = 0;
  std::size_t active = 0;
  std::size_t live = 0;
  std::size_t zombie = 0;
  std::size_t zombie_unknown_start = 0;
  std::size_t active_zombie = 0;
  std::size_t indeterminate = 0;
  std::size_t exempt = 0;

  /// Zombies among active linkages; 0 when nothing is active.
  double fraction() const { return active == 0 ? 0.0 : double(active_zombie) / double(active); }
  bool operator==(const EcosystemSummary&) const = default;
};

using TimelineMap = std::unordered_map<std::string, EpochTimeline>;

struct BatchResult {
  std::vector<ZombieVerdict> verdicts;
  std::map<Ecosystem, EcosystemSummary> summary;
};

BatchResult batch_classify(std::span<const Linkage> linkages, const TimelineMap& timelines, Day as_of);

EcosystemSummary summarize(std::span<const ZombieVerdict> verdicts);

} // namespace zs
