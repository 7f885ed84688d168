#pragma once

// Plain-CSV renderings of every analysis. Each function returns the full
// file text, header first; numbers use the shortest round-trip form.

#include "zombiescope/indicators.hpp"
#include "zombiescope/stats.hpp"

#include <string>
#include <vector>

namespace zs {

std::string format_number(double v);

/// ecosystem,date,active,zombie,fraction
std::string series_csv(const std::vector<TimeSeries>& series);
/// cohort,first_year,last_year,n,time,survival,at_risk,events,censored
std::string lifespans_csv(const CohortLifespans& lifespans);
/// distribution,value,cdf  (remaining_validity | observed | revoked)
std::string durations_csv(const DurationDistributions& d);
/// fingerprint,days_served,zombie_days
std::string served_csv(const ServedAfterDeath& served);
/// attack,ecosystem,state,supporting
std::string matrix_csv(const IndicatorMatrix& m);
/// row,count  (Maven activity breakdown)
std::string breakdown_csv(const MavenActivityBreakdown& b);
/// population,gap_days
std::string gaps_csv(const GapAnalysis& g);
/// time,survival,at_risk,events,censored
std::string km_csv(const KmCurve& curve);
/// ecosystem,total,active,live,zombie,zombie_unknown_start,active_zombie,indeterminate,exempt,fraction
std::string summary_csv(const std::map<Ecosystem, EcosystemSummary>& summary);

/// Single-object JSON renderings.
std::string mwu_json(const MwuResult& r);
std::string gaps_json(const GapAnalysis& g);
std::string durations_json(const DurationDistributions& d);
std::string agp_json(const AgpStats& a);
std::string revocation_json(const RevocationComparison& r);
std::string served_rereg_json(const ServedAfterRereg& r);

} // namespace zs
