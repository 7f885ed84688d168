#include "zombiescope/report.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <sstream>

namespace zs {

using json = nlohmann::ordered_json;

std::string format_number(double v) {
  if (std::isnan(v))
    return "nan";
  if (v == 0)
    return "0"; // also folds -0
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void km_rows(std::ostringstream& os, const std::string& prefix, const KmCurve& c) {
  for (const auto& s : c.steps)
    os << prefix << format_number(s.time) << ',' << format_number(s.survival) << ',' << s.at_risk << ','
       << s.events << ',' << s.censored << '\n';
}

void cdf_rows(std::ostringstream& os, const char* name, const Cdf& c) {
  for (const auto& [x, f] : c.points)
    os << name << ',' << format_number(x) << ',' << format_number(f) << '\n';
}

} // namespace

std::string series_csv(const std::vector<TimeSeries>& series) {
  std::ostringstream os;
  os << "ecosystem,date,active,zombie,fraction\n";
  for (const auto& ts : series)
    for (const auto& r : ts.rows)
      os << to_string(ts.ecosystem) << ',' << r.date.iso() << ',' << r.active << ',' << r.zombie << ','
         << format_number(r.fraction) << '\n';
  return os.str();
}

std::string lifespans_csv(const CohortLifespans& l) {
  std::ostringstream os;
  os << "cohort,first_year,last_year,n,time,survival,at_risk,events,censored\n";
  for (const auto& c : l.cohorts) {
    const std::string label = c.first_year == c.last_year ? std::to_string(c.first_year)
                                                          : std::to_string(c.first_year) + "-" +
                                                                std::to_string(c.last_year);
    km_rows(os, label + "," + std::to_string(c.first_year) + "," + std::to_string(c.last_year) + "," +
                    std::to_string(c.n) + ",",
            c.curve);
  }
  if (l.overall) {
    std::size_t n = 0;
    for (const auto& c : l.cohorts)
      n += c.n;
    km_rows(os, "all,,," + std::to_string(n) + ",", *l.overall);
  }
  return os.str();
}

std::string durations_csv(const DurationDistributions& d) {
  std::ostringstream os;
  os << "distribution,value,cdf\n";
  cdf_rows(os, "remaining_validity", d.remaining_validity);
  cdf_rows(os, "observed", d.observed);
  cdf_rows(os, "revoked", d.revoked);
  return os.str();
}

std::string served_csv(const ServedAfterDeath& s) {
  std::ostringstream os;
  os << "fingerprint,days_served,zombie_days\n";
  for (const auto& e : s.per_zombie)
    os << e.fingerprint << ',' << e.days_served << ',' << e.zombie_days << '\n';
  return os.str();
}

std::string matrix_csv(const IndicatorMatrix& m) {
  std::ostringstream os;
  os << "attack,ecosystem,state,supporting\n";
  // attacks in table order, ecosystems in enum order
  for (auto a : kAllAttacks)
    for (const auto& [key, cell] : m.cells) {
      if (key.first != a)
        continue;
      os << to_string(a) << ',' << to_string(key.second) << ',' << to_string(cell.state) << ',';
      if (cell.supporting)
        os << *cell.supporting;
      os << '\n';
    }
  return os.str();
}

std::string breakdown_csv(const MavenActivityBreakdown& b) {
  std::ostringstream os;
  os << "row,count\n"
     << "total," << b.total << '\n'
     << "live," << b.live << '\n'
     << "indeterminate," << b.indeterminate << '\n'
     << "zombie_unknown_start," << b.zombie_unknown_start << '\n'
     << "zombie_known_start," << b.zombie_known_start << '\n'
     << "no_changes_while_zombie," << b.no_changes_while_zombie << '\n'
     << "new_versions_while_zombie," << b.new_versions_while_zombie << '\n'
     << "not_reregistered," << b.not_reregistered << '\n'
     << "reregistered," << b.reregistered << '\n'
     << "no_changes_after_rereg," << b.no_changes_after_rereg << '\n'
     << "new_versions_after_rereg," << b.new_versions_after_rereg << '\n';
  return os.str();
}

std::string gaps_csv(const GapAnalysis& g) {
  std::ostringstream os;
  os << "population,gap_days\n";
  auto rows = [&](const char* name, std::vector<double> v) {
    std::sort(v.begin(), v.end());
    for (double x : v)
      os << name << ',' << format_number(x) << '\n';
  };
  rows("zombie", g.zombie_gaps);
  rows("non_zombie", g.non_zombie_gaps);
  return os.str();
}

std::string km_csv(const KmCurve& curve) {
  std::ostringstream os;
  os << "time,survival,at_risk,events,censored\n";
  km_rows(os, "", curve);
  return os.str();
}

std::string summary_csv(const std::map<Ecosystem, EcosystemSummary>& summary) {
  std::ostringstream os;
  os << "ecosystem,total,active,live,zombie,zombie_unknown_start,active_zombie,indeterminate,exempt,fraction\n";
  for (const auto& [e, s] : summary)
    os << to_string(e) << ',' << s.total << ',' << s.active << ',' << s.live << ',' << s.zombie << ','
       << s.zombie_unknown_start << ',' << s.active_zombie << ',' << s.indeterminate << ',' << s.exempt << ','
       << format_number(s.fraction()) << '\n';
  return os.str();
}

std::string mwu_json(const MwuResult& r) {
  json j;
  j["n_a"] = r.n_a;
  j["n_b"] = r.n_b;
  j["u_a"] = r.u_a;
  j["u_b"] = r.u_b;
  j["z"] = r.z;
  j["p_two_sided"] = r.p_two_sided;
  j["exact"] = r.exact;
  j["tie_correction_applied"] = r.tie_correction_applied;
  return j.dump(2) + "\n";
}

std::string gaps_json(const GapAnalysis& g) {
  json j;
  j["zombie_n"] = g.zombie_gaps.size();
  j["non_zombie_n"] = g.non_zombie_gaps.size();
  j["zombie_median_days"] = opt(g.zombie_median);
  j["non_zombie_median_days"] = opt(g.non_zombie_median);
  j["test"] = g.test ? json::parse(mwu_json(*g.test)) : json(nullptr);
  return j.dump(2) + "\n";
}

std::string durations_json(const DurationDistributions& d) {
  json j;
  j["zombies"] = d.zombies;
  j["revoked"] = d.revoked_count;
  j["revoked_fraction"] = d.revoked_fraction;
  j["median_revocation_reduction_days"] = opt(d.median_revocation_reduction_days);
  j["median_revocation_reduction_fraction"] = opt(d.median_revocation_reduction_fraction);
  return j.dump(2) + "\n";
}

std::string agp_json(const AgpStats& a) {
  json j;
  j["zombies"] = a.zombies;
  j["within_agp"] = a.within_agp;
  j["fraction"] = a.fraction;
  j["lifespan_histogram"] = json::object();
  for (const auto& [len, n] : a.lifespan_histogram)
    j["lifespan_histogram"][std::to_string(len)] = n;
  return j.dump(2) + "\n";
}

std::string revocation_json(const RevocationComparison& r) {
  json j;
  j["rereg_total"] = r.rereg_total;
  j["rereg_revoked"] = r.rereg_revoked;
  j["other_total"] = r.other_total;
  j["other_revoked"] = r.other_revoked;
  j["rate_rereg"] = opt(r.rate_rereg);
  j["rate_other"] = opt(r.rate_other);
  j["ratio"] = opt(r.ratio);
  return j.dump(2) + "\n";
}

std::string served_rereg_json(const ServedAfterRereg& r) {
  json j;
  j["zombies"] = r.zombies;
  j["overlap"] = r.overlap;
  j["served_past"] = r.served_past;
  j["median_days"] = opt(r.median_days);
  j["overlapping"] = r.overlapping;
  return j.dump(2) + "\n";
}

} // namespace zs
