#include "zombiescope/pipeline.hpp"

#include <algorithm>

namespace zs {

RdapIndex index_rdap(const std::vector<RdapRecord>& records) {
  RdapIndex idx;
  for (const auto& r : records)
    idx[r.domain].push_back(r);
  return idx;
}

namespace {

void widen(std::optional<DayRange>& span, Day d) {
  if (!span)
    span = DayRange{d, d};
  span->first = std::min(span->first, d);
  span->last = std::max(span->last, d);
}

void widen(std::optional<DayRange>& span, const std::vector<RdapRecord>& rdap) {
  for (const auto& r : rdap) {
    widen(span, r.query_time);
    if (r.registration_date)
      widen(span, *r.registration_date);
  }
}

const std::vector<RdapRecord>& rdap_for(const RdapIndex& idx, const std::string& domain) {
  static const std::vector<RdapRecord> none;
  auto it = idx.find(domain);
  return it == idx.end() ? none : it->second;
}

void warn_rdap_only(const RdapIndex& idx, const std::function<bool(const std::string&)>& has_obs,
                    Warnings* warnings) {
  std::vector<std::string> orphans;
  for (const auto& [domain, recs] : idx)
    if (!has_obs(domain))
      orphans.push_back(domain);
  std::sort(orphans.begin(), orphans.end());
  for (const auto& d : orphans)
    warn(warnings, "RDAP records for " + d + " but no observations; no timeline inferred");
}

} // namespace

std::optional<DayRange> data_span(const ObservationSet& obs, const std::vector<RdapRecord>& rdap) {
  std::optional<DayRange> span;
  for (const auto& [name, d] : obs) {
    if (!d.zone.empty()) {
      widen(span, d.zone.front());
      widen(span, d.zone.back());
    }
    if (!d.scan.empty()) {
      widen(span, d.scan.front());
      widen(span, d.scan.back());
    }
  }
  widen(span, rdap);
  return span;
}

std::vector<EpochTimeline> infer_all(const ObservationSet& obs, const std::vector<RdapRecord>& rdap,
                                     const RunConfig& config, std::optional<DayRange> window, Warnings* warnings) {
  if (!window)
    window = data_span(obs, rdap);
  const auto idx = index_rdap(rdap);
  std::vector<EpochTimeline> out;
  out.reserve(obs.size());
  for (const auto& [name, d] : obs) {
    if (d.zone.empty() && d.scan.empty())
      continue;
    out.push_back(infer_epochs(name, d.zone, d.scan, rdap_for(idx, name), config.params_for(name), window,
                               warnings));
  }
  warn_rdap_only(idx, [&](const std::string& d) { return obs.contains(d); }, warnings);
  return out;
}

StreamedInference infer_stream(std::istream& in, const std::string& source_name, const std::vector<RdapRecord>& rdap,
                               const RunConfig& config, std::optional<DayRange> window, Warnings* warnings) {
  const auto idx = index_rdap(rdap);
  ObservationStream stream(in, source_name);
  StreamedInference out;
  std::unordered_set<std::string> seen;
  DomainObservations d;
  while (stream.next(d)) {
    // the final window is only known at the end; right-censoring is
    // recomputed below
    out.timelines.push_back(
        infer_epochs(d.domain, d.zone, d.scan, rdap_for(idx, d.domain), config.params_for(d.domain), window,
                     warnings));
    seen.insert(d.domain);
  }
  out.rows = stream.rows();

  std::optional<DayRange> span = window;
  if (!span) {
    span = stream.span();
    widen(span, rdap);
  }
  if (span) {
    out.window = *span;
    for (auto& t : out.timelines)
      apply_window(t, *span);
  }
  std::sort(out.timelines.begin(), out.timelines.end(),
            [](const auto& a, const auto& b) { return a.domain < b.domain; });
  warn_rdap_only(idx, [&](const std::string& dom) { return seen.contains(dom); }, warnings);
  return out;
}

std::size_t for_each_domain(std::istream& in, const std::string& source_name,
                            const std::function<void(const DomainObservations&)>& sink) {
  ObservationStream stream(in, source_name);
  DomainObservations d;
  std::size_t n = 0;
  while (stream.next(d)) {
    sink(d);
    ++n;
  }
  return n;
}

std::vector<Linkage> linkages_of(const std::vector<ZombieVerdict>& verdicts) {
  std::vector<Linkage> out;
  out.reserve(verdicts.size());
  for (const auto& v : verdicts)
    out.push_back(v.linkage);
  sort_linkages(out);
  return out;
}

void sort_verdicts(std::vector<ZombieVerdict>& verdicts) {
  std::stable_sort(verdicts.begin(), verdicts.end(), [](const ZombieVerdict& a, const ZombieVerdict& b) {
    const auto& x = a.linkage;
    const auto& y = b.linkage;
    return std::tie(x.ecosystem, x.dns_name, x.birth, x.linked_name) <
           std::tie(y.ecosystem, y.dns_name, y.birth, y.linked_name);
  });
}

} // namespace zs
