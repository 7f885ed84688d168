#pragma once

#include "zombiescope/classify.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace zs {

// ---------------------------------------------------------------------------
// Kaplan-Meier

struct SurvivalObservation {
  double time = 0;
  /// true: the event (death) happened at `time`; false: censored there.
  bool event = true;
};

struct KmStep {
  double time = 0;
  double survival = 1;
  std::size_t at_risk = 0;
  std::size_t events = 0;
  std::size_t censored = 0;
};

/// Product-limit estimate. `steps` has one row per distinct observed time
/// (event or censoring), preceded by the (0, 1) anchor.
struct KmCurve {
  std::vector<KmStep> steps;

  double survival_at(double t) const;
  /// (time, S) pairs where S changes, starting at (0, 1).
  std::vector<std::pair<double, double>> points() const;
};

/// Deaths are processed before censorings at equal times. Throws
/// std::invalid_argument for empty input or negative times.
KmCurve kaplan_meier(std::span<const SurvivalObservation> observations);

// ---------------------------------------------------------------------------
// Mann-Whitney U

enum class MwuMethod {
  /// Exact permutation p for small samples, normal approximation otherwise.
  automatic,
  normal,
  exact,
};

struct MwuOptions {
  MwuMethod method = MwuMethod::automatic;
  bool continuity_correction = true;
};

struct MwuResult {
  double u_a = 0;
  double u_b = 0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  /// Normal-approximation score (tie-corrected variance, continuity
  /// correction per options); 0 when the variance vanishes.
  double z = 0;
  double p_two_sided = 1;
  bool tie_correction_applied = false;
  bool exact = false;
};

/// Samples with min(n) below this (and n_a + n_b <= kMwuExactMaxTotal) use
/// exact enumeration under MwuMethod::automatic.
inline constexpr std::size_t kMwuExactMinBelow = 8;
inline constexpr std::size_t kMwuExactMaxTotal = 400;

MwuResult mann_whitney_u(std::span<const double> group_a, std::span<const double> group_b,
                         const MwuOptions& options = {});

// ---------------------------------------------------------------------------
// distributions

/// Empirical CDF: one (value, F(value)) point per distinct value.
struct Cdf {
  std::vector<std::pair<double, double>> points;
  std::size_t n = 0;

  static Cdf of(std::vector<double> values);
};

/// Median with the midpoint convention for even sizes; nullopt when empty.
std::optional<double> median(std::vector<double> values);

// ---------------------------------------------------------------------------
// zombie-specific aggregates

struct SeriesRow {
  Day date;
  std::size_t active = 0;
  std::size_t zombie = 0;
  double fraction = 0;
  bool operator==(const SeriesRow&) const = default;
};

struct TimeSeries {
  Ecosystem ecosystem = Ecosystem::webpki;
  std::vector<SeriesRow> rows;
  bool operator==(const TimeSeries&) const = default;
};

/// Daily active/zombie counts per ecosystem over `range` (inclusive).
std::vector<TimeSeries> zombie_fraction_series(std::span<const Linkage> linkages,
                                               const TimelineMap& timelines, DayRange range);

struct CohortSpec {
  int width_years = 1;
};

struct CohortCurve {
  int first_year = 0;
  int last_year = 0;
  std::size_t n = 0;
  KmCurve curve;
};

struct CohortLifespans {
  std::vector<CohortCurve> cohorts;
  std::optional<KmCurve> overall;
  std::size_t excluded = 0;
};

/// Kaplan-Meier of DNS-name lifespan (birth-epoch length in days) for
/// linkages grouped by creation year; ongoing epochs are censored.
/// Cohorts are anchored at the earliest creation year present.
CohortLifespans cohort_lifespans(std::span<const Linkage> linkages, const TimelineMap& timelines,
                                 CohortSpec cohort);

struct DurationDistributions {
  Cdf remaining_validity;
  Cdf observed;
  Cdf revoked;
  std::size_t zombies = 0;
  std::size_t revoked_count = 0;
  double revoked_fraction = 0;
  std::optional<double> median_revocation_reduction_days;
  std::optional<double> median_revocation_reduction_fraction;
};

/// Web PKI zombie durations: validity left at DNS death, observed duration
/// (respecting revocation) and the revoked subset, all capped at as_of.
DurationDistributions duration_distributions(std::span<const ZombieVerdict> verdicts);

struct GapAnalysis {
  std::vector<double> zombie_gaps;
  std::vector<double> non_zombie_gaps;
  std::optional<double> zombie_median;
  std::optional<double> non_zombie_median;
  std::optional<MwuResult> test;
};

/// Days from birth-epoch start to linkage creation, zombie vs not.
/// Verdicts without a birth epoch (and exempt ones) are excluded.
GapAnalysis registration_to_linkage_gaps(std::span<const ZombieVerdict> verdicts,
                                         const MwuOptions& options = {}, Warnings* warnings = nullptr);

} // namespace zs
