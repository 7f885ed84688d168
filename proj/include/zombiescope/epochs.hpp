#pragma once

// Registration-interval inference for a single DNS name.
//
// Four phases: union daily zone/scan presence into a bitset, cut it into
// runs, refine the runs with RDAP evidence, then merge across short gaps.

#include "zombiescope/day.hpp"
#include "zombiescope/diagnostics.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace zs {

enum class Source : std::uint8_t { zone = 1, scan = 2 };

/// Per-day presence for one domain. `flags[i]` describes `first_day + i`;
/// bit 0 is zone delegation, bit 1 is an active scan, zero means unobserved.
struct ObservationBitset {
  std::string domain;
  Day first_day;
  std::vector<std::uint8_t> flags;

  Day last_day() const { return first_day + static_cast<std::int32_t>(flags.size()) - 1; }
  bool observed(Day d) const;
  bool from(Day d, Source s) const;
  std::size_t count() const;
};

enum class RdapPolarity { positive, negative };

struct RdapRecord {
  std::string domain;
  Day query_time;
  RdapPolarity polarity = RdapPolarity::positive;
  std::optional<Day> registration_date;

  /// Positive responses without a registration date cannot refine intervals.
  bool usable() const {
    return polarity == RdapPolarity::negative || registration_date.has_value();
  }
  bool operator==(const RdapRecord&) const = default;
};

enum class IntervalOrigin { observed, rdap_synthesized };

struct OwnershipInterval {
  Day start;
  Day end;
  bool start_closed = false;
  bool right_censored = false;
  bool merge_next = false;
  IntervalOrigin origin = IntervalOrigin::observed;

  bool contains(Day d) const { return start <= d && d <= end; }
  std::int32_t length() const { return end - start + 1; }
  bool operator==(const OwnershipInterval&) const = default;
};

/// Days strictly between two inclusive intervals.
inline std::int32_t gap_days(const OwnershipInterval& a, const OwnershipInterval& b) {
  return b.start - a.end - 1;
}

struct EpochInferenceParams {
  std::int32_t gap_threshold_days = 80;
  std::int32_t grace_window_days = 2;

  /// Throws std::invalid_argument unless t >= 1 and g >= 0.
  void validate() const;
  bool operator==(const EpochInferenceParams&) const = default;
};

struct EpochTimeline {
  std::string domain;
  std::vector<OwnershipInterval> intervals;
  EpochInferenceParams params;
  DayRange window;

  /// Interval covering `d`, or null.
  const OwnershipInterval* find(Day d) const;
  /// First interval starting after `d`, or null.
  const OwnershipInterval* next_after(Day d) const;
  bool operator==(const EpochTimeline&) const = default;
};

class EmptyObservations : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

ObservationBitset build_observation_bitset(std::string domain, std::span<const Day> zone_obs,
                                           std::span<const Day> scan_obs);

/// One open interval per maximal run of observed days. When `window` is
/// omitted the bitset's own span is the window.
std::vector<OwnershipInterval> extract_runs(const ObservationBitset& bits,
                                            std::optional<DayRange> window = std::nullopt);

/// Positive RDAP refinement. Records are deduplicated (latest query per
/// registration date) and processed by ascending registration date.
/// Throws std::invalid_argument on a positive without a usable date.
std::vector<OwnershipInterval> apply_rdap_positives(std::vector<OwnershipInterval> intervals,
                                                    std::span<const RdapRecord> positives,
                                                    std::int32_t grace_days);

/// Negative RDAP refinement: a negative answer farther than `grace_days`
/// from every interval closes the start of the next interval.
std::vector<OwnershipInterval> apply_rdap_negatives(std::vector<OwnershipInterval> intervals,
                                                    std::span<const RdapRecord> negatives,
                                                    std::int32_t grace_days,
                                                    Warnings* warnings = nullptr);

std::vector<OwnershipInterval> merge_adjacent(std::vector<OwnershipInterval> intervals,
                                              const EpochInferenceParams& params);

/// Whole pipeline for one domain. The window defaults to the span of all
/// observation, query and registration days supplied.
EpochTimeline infer_epochs(const std::string& domain, std::span<const Day> zone_obs,
                           std::span<const Day> scan_obs, std::span<const RdapRecord> rdap,
                           const EpochInferenceParams& params,
                           std::optional<DayRange> window = std::nullopt,
                           Warnings* warnings = nullptr);

/// Sets the analysis window and recomputes right-censoring. Throws if an
/// interval extends past the window.
void apply_window(EpochTimeline& timeline, DayRange window);

/// Checks sortedness, non-overlap and flag invariants; returns a
/// description of the first violation or an empty string.
std::string check_timeline(const EpochTimeline& timeline);

} // namespace zs
