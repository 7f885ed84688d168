#pragma once

// Whole-dataset orchestration shared by the CLI and the acceptance suite.

#include "zombiescope/config.hpp"
#include "zombiescope/dataio.hpp"

#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace zs {

using RdapIndex = std::unordered_map<std::string, std::vector<RdapRecord>>;

RdapIndex index_rdap(const std::vector<RdapRecord>& records);

/// Smallest range covering every observation day, RDAP query day and RDAP
/// registration date. nullopt when there is nothing at all.
std::optional<DayRange> data_span(const ObservationSet& obs, const std::vector<RdapRecord>& rdap);

/// Infers every domain with observations, sorted by domain. Domains with
/// RDAP rows but no observations are reported in `warnings`.
std::vector<EpochTimeline> infer_all(const ObservationSet& obs, const std::vector<RdapRecord>& rdap,
                                     const RunConfig& config, std::optional<DayRange> window = std::nullopt,
                                     Warnings* warnings = nullptr);

struct StreamedInference {
  std::vector<EpochTimeline> timelines; // sorted by domain
  DayRange window;
  std::size_t rows = 0;
};

/// Same result as infer_all over a grouped observation stream, holding one
/// domain's rows at a time. Throws ObservationStream::NotGrouped when the
/// input is not grouped by domain.
StreamedInference infer_stream(std::istream& obs, const std::string& source_name,
                               const std::vector<RdapRecord>& rdap, const RunConfig& config,
                               std::optional<DayRange> window = std::nullopt, Warnings* warnings = nullptr);

/// Per-domain variant: `sink` receives each domain's observations and the
/// result is discarded afterwards. Used for bounded-memory benchmarks.
std::size_t for_each_domain(std::istream& obs, const std::string& source_name,
                            const std::function<void(const DomainObservations&)>& sink);

/// Linkages from a verdict list, in canonical order.
std::vector<Linkage> linkages_of(const std::vector<ZombieVerdict>& verdicts);

/// Sorts verdicts by their linkage's canonical order.
void sort_verdicts(std::vector<ZombieVerdict>& verdicts);

} // namespace zs
