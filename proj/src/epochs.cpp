#include "zombiescope/epochs.hpp"

#include <algorithm>
#include <iterator>
#include <limits>
#include <map>
#include <stdexcept>

namespace zs {

bool ObservationBitset::observed(Day d) const {
  if (d < first_day || d > last_day())
    return false;
  return flags[static_cast<std::size_t>(d - first_day)] != 0;
}

bool ObservationBitset::from(Day d, Source s) const {
  if (d < first_day || d > last_day())
    return false;
  return (flags[static_cast<std::size_t>(d - first_day)] & static_cast<std::uint8_t>(s)) != 0;
}

std::size_t ObservationBitset::count() const {
  return static_cast<std::size_t>(std::count_if(flags.begin(), flags.end(), [](auto f) { return f != 0; }));
}

void EpochInferenceParams::validate() const {
  if (gap_threshold_days < 1)
    throw std::invalid_argument("gap threshold must be at least 1 day");
  if (grace_window_days < 0)
    throw std::invalid_argument("grace window must be non-negative");
}

const OwnershipInterval* EpochTimeline::find(Day d) const {
  auto it = std::upper_bound(intervals.begin(), intervals.end(), d,
                             [](Day day, const OwnershipInterval& iv) { return day < iv.start; });
  if (it == intervals.begin())
    return nullptr;
  --it;
  return it->contains(d) ? &*it : nullptr;
}

const OwnershipInterval* EpochTimeline::next_after(Day d) const {
  auto it = std::upper_bound(intervals.begin(), intervals.end(), d,
                             [](Day day, const OwnershipInterval& iv) { return day < iv.start; });
  return it == intervals.end() ? nullptr : &*it;
}

ObservationBitset build_observation_bitset(std::string domain, std::span<const Day> zone_obs,
                                           std::span<const Day> scan_obs) {
  if (zone_obs.empty() && scan_obs.empty())
    throw EmptyObservations("no observations for " + domain);

  Day lo{std::numeric_limits<std::int32_t>::max()};
  Day hi{std::numeric_limits<std::int32_t>::min()};
  for (auto set : {zone_obs, scan_obs})
    for (Day d : set) {
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }

  ObservationBitset out;
  out.domain = std::move(domain);
  out.first_day = lo;
  out.flags.assign(static_cast<std::size_t>(hi - lo + 1), 0);
  for (Day d : zone_obs)
    out.flags[static_cast<std::size_t>(d - lo)] |= static_cast<std::uint8_t>(Source::zone);
  for (Day d : scan_obs)
    out.flags[static_cast<std::size_t>(d - lo)] |= static_cast<std::uint8_t>(Source::scan);
  return out;
}

std::vector<OwnershipInterval> extract_runs(const ObservationBitset& bits, std::optional<DayRange> window) {
  const DayRange win = window.value_or(DayRange{bits.first_day, bits.last_day()});
  std::vector<OwnershipInterval> out;
  const auto n = bits.flags.size();
  std::size_t i = 0;
  while (i < n) {
    if (!bits.flags[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && bits.flags[j + 1])
      ++j;
    OwnershipInterval iv;
    iv.start = bits.first_day + static_cast<std::int32_t>(i);
    iv.end = bits.first_day + static_cast<std::int32_t>(j);
    iv.right_censored = iv.end >= win.last;
    out.push_back(iv);
    i = j + 1;
  }
  return out;
}

namespace {

using Intervals = std::vector<OwnershipInterval>;

// Index of the interval containing `d`, inserting a single-day synthesized
// interval when no interval covers it.
std::size_t locate_or_insert(Intervals& v, Day d) {
  auto it = std::upper_bound(v.begin(), v.end(), d,
                             [](Day day, const OwnershipInterval& iv) { return day < iv.start; });
  if (it != v.begin() && std::prev(it)->contains(d))
    return static_cast<std::size_t>(std::prev(it) - v.begin());
  OwnershipInterval iv;
  iv.start = d;
  iv.end = d;
  iv.origin = IntervalOrigin::rdap_synthesized;
  it = v.insert(it, iv);
  return static_cast<std::size_t>(it - v.begin());
}

std::size_t locate(const Intervals& v, Day d) {
  auto it = std::upper_bound(v.begin(), v.end(), d,
                             [](Day day, const OwnershipInterval& iv) { return day < iv.start; });
  return static_cast<std::size_t>(std::prev(it) - v.begin());
}

} // namespace

Intervals apply_rdap_positives(Intervals intervals, std::span<const RdapRecord> positives,
                               std::int32_t grace_days) {
  // latest query per registration date
  std::map<Day, Day> latest;
  for (const auto& r : positives) {
    if (r.polarity != RdapPolarity::positive)
      throw std::invalid_argument("negative RDAP record passed as positive for " + r.domain);
    if (!r.registration_date)
      throw std::invalid_argument("positive RDAP record without registration date for " + r.domain);
    if (*r.registration_date > r.query_time)
      throw std::invalid_argument("RDAP registration date after query time for " + r.domain);
    auto [it, inserted] = latest.emplace(*r.registration_date, r.query_time);
    if (!inserted)
      it->second = std::max(it->second, r.query_time);
  }

  for (const auto& [reg, query] : latest) {
    std::size_t ireg = locate_or_insert(intervals, reg);
    locate_or_insert(intervals, query);

    auto& target = intervals[ireg];
    if (reg - target.start <= grace_days) {
      target.start_closed = true;
    } else {
      OwnershipInterval right = target;
      right.start = reg;
      right.start_closed = true;
      target.end = reg - 1;
      target.merge_next = false;
      target.right_censored = false;
      intervals.insert(intervals.begin() + static_cast<std::ptrdiff_t>(ireg) + 1, right);
    }

    ireg = locate(intervals, reg);
    const std::size_t iobs = locate(intervals, query);
    for (std::size_t i = ireg; i < iobs; ++i)
      intervals[i].merge_next = true;
  }
  return intervals;
}

Intervals apply_rdap_negatives(Intervals intervals, std::span<const RdapRecord> negatives,
                               std::int32_t grace_days, Warnings* warnings) {
  std::vector<Day> days;
  days.reserve(negatives.size());
  for (const auto& r : negatives) {
    if (r.polarity != RdapPolarity::negative)
      throw std::invalid_argument("positive RDAP record passed as negative for " + r.domain);
    days.push_back(r.query_time);
  }
  std::sort(days.begin(), days.end());

  for (Day q : days) {
    auto next = std::upper_bound(intervals.begin(), intervals.end(), q,
                                 [](Day day, const OwnershipInterval& iv) { return day < iv.start; });
    std::int32_t distance = std::numeric_limits<std::int32_t>::max();
    if (next != intervals.begin()) {
      const auto& prev = *std::prev(next);
      if (prev.contains(q)) {
        warn(warnings, "negative RDAP on " + q.iso() + " falls inside observed interval " +
                           prev.start.iso() + ".." + prev.end.iso() + "; ignored");
        continue;
      }
      distance = q - prev.end;
    }
    if (next != intervals.end())
      distance = std::min(distance, next->start - q);
    if (distance > grace_days && next != intervals.end())
      next->start_closed = true;
  }
  return intervals;
}

Intervals merge_adjacent(Intervals intervals, const EpochInferenceParams& params) {
  if (intervals.empty())
    return intervals;
  Intervals out;
  out.reserve(intervals.size());
  OwnershipInterval cur = intervals.front();
  for (std::size_t i = 1; i < intervals.size(); ++i) {
    const auto& nxt = intervals[i];
    if (!nxt.start_closed && (gap_days(cur, nxt) < params.gap_threshold_days || cur.merge_next)) {
      cur.end = nxt.end;
      cur.right_censored = nxt.right_censored;
      cur.merge_next = nxt.merge_next;
      if (nxt.origin == IntervalOrigin::observed)
        cur.origin = IntervalOrigin::observed;
    } else {
      out.push_back(cur);
      cur = nxt;
    }
  }
  out.push_back(cur);
  return out;
}

EpochTimeline infer_epochs(const std::string& domain, std::span<const Day> zone_obs,
                           std::span<const Day> scan_obs, std::span<const RdapRecord> rdap,
                           const EpochInferenceParams& params, std::optional<DayRange> window,
                           Warnings* warnings) {
  params.validate();
  const ObservationBitset bits = build_observation_bitset(domain, zone_obs, scan_obs);

  std::vector<RdapRecord> positives;
  std::vector<RdapRecord> negatives;
  DayRange span{bits.first_day, bits.last_day()};
  for (const auto& r : rdap) {
    if (!r.usable()) {
      warn(warnings, "RDAP positive for " + domain + " on " + r.query_time.iso() +
                         " has no registration date; skipped");
      continue;
    }
    span.first = std::min(span.first, r.query_time);
    span.last = std::max(span.last, r.query_time);
    if (r.polarity == RdapPolarity::positive) {
      span.first = std::min(span.first, *r.registration_date);
      positives.push_back(r);
    } else {
      negatives.push_back(r);
    }
  }
  const DayRange win = window.value_or(span);

  auto intervals = extract_runs(bits, win);
  intervals = apply_rdap_positives(std::move(intervals), positives, params.grace_window_days);
  intervals = apply_rdap_negatives(std::move(intervals), negatives, params.grace_window_days, warnings);
  intervals = merge_adjacent(std::move(intervals), params);

  EpochTimeline tl;
  tl.domain = domain;
  tl.intervals = std::move(intervals);
  tl.params = params;
  apply_window(tl, win);
  return tl;
}

void apply_window(EpochTimeline& timeline, DayRange window) {
  for (auto& iv : timeline.intervals) {
    if (iv.end > window.last)
      throw std::invalid_argument("interval " + iv.start.iso() + ".." + iv.end.iso() + " of " +
                                  timeline.domain + " extends past window end " + window.last.iso());
    iv.right_censored = iv.end == window.last;
  }
  timeline.window = window;
}

std::string check_timeline(const EpochTimeline& timeline) {
  const auto& v = timeline.intervals;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i].start > v[i].end)
      return "interval " + std::to_string(i) + " has start after end";
    if (v[i].right_censored && v[i].end != timeline.window.last)
      return "interval " + std::to_string(i) + " right-censored before window end";
    if (i + 1 < v.size() && v[i].end >= v[i + 1].start)
      return "intervals " + std::to_string(i) + " and " + std::to_string(i + 1) + " overlap or are unsorted";
  }
  return {};
}

} // namespace zs
