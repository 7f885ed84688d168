#include "zombiescope/indicators.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <unordered_map>

namespace zs {

AgpStats agp_death_stats(std::span<const ZombieVerdict> verdicts, std::int32_t agp_days) {
  AgpStats out;
  for (const auto& v : verdicts) {
    if (v.status != Status::zombie || !v.birth_epoch)
      continue;
    ++out.zombies;
    const auto len = v.birth_epoch->length();
    ++out.lifespan_histogram[len];
    if (len <= agp_days)
      ++out.within_agp;
  }
  out.fraction = out.zombies ? double(out.within_agp) / double(out.zombies) : 0.0;
  return out;
}

namespace {

using ServingIndex = std::unordered_map<std::string, std::vector<Day>>;

// served=true days per fingerprint, sorted and unique
ServingIndex index_served(std::span<const ServingObservation> serving) {
  ServingIndex idx;
  for (const auto& s : serving)
    if (s.served)
      idx[s.fingerprint].push_back(s.date);
  for (auto& [fp, days] : idx) {
    std::sort(days.begin(), days.end());
    days.erase(std::unique(days.begin(), days.end()), days.end());
  }
  return idx;
}

std::int32_t count_in(const std::vector<Day>& days, Day lo, Day hi) {
  if (lo > hi)
    return 0;
  auto a = std::lower_bound(days.begin(), days.end(), lo);
  auto b = std::upper_bound(days.begin(), days.end(), hi);
  return static_cast<std::int32_t>(b - a);
}

bool is_webpki_zombie(const ZombieVerdict& v) {
  return v.linkage.ecosystem == Ecosystem::webpki && v.known_zombie_start();
}

Day zombie_end(const ZombieVerdict& v) {
  return v.linkage.death ? std::min(*v.linkage.death, v.as_of) : v.as_of;
}

} // namespace

ServedAfterDeath served_after_death(std::span<const ServingObservation> serving,
                                    std::span<const ZombieVerdict> verdicts, Warnings* warnings) {
  const auto idx = index_served(serving);
  ServedAfterDeath out;
  std::size_t outside = 0;
  std::vector<double> days;
  for (const auto& v : verdicts) {
    if (!is_webpki_zombie(v))
      continue;
    ServedEntry e;
    e.fingerprint = v.linkage.linked_name;
    e.zombie_days = zombie_duration(v, v.as_of).days;
    if (auto it = idx.find(e.fingerprint); it != idx.end()) {
      const Day validity_end = v.linkage.death.value_or(v.as_of);
      outside += static_cast<std::size_t>(
          count_in(it->second, Day(std::numeric_limits<std::int32_t>::min()), v.linkage.birth - 1) +
          count_in(it->second, validity_end + 1, Day(std::numeric_limits<std::int32_t>::max())));
      e.days_served = count_in(it->second, *v.zombie_birth, zombie_end(v));
    }
    if (e.days_served == 0)
      ++out.never_served;
    if (e.days_served >= 60)
      ++out.served_60_plus;
    days.push_back(e.days_served);
    out.per_zombie.push_back(std::move(e));
  }
  if (outside)
    warn(warnings, std::to_string(outside) + " serving observations fall outside certificate validity; ignored");
  std::sort(out.per_zombie.begin(), out.per_zombie.end(),
            [](const auto& a, const auto& b) { return a.fingerprint < b.fingerprint; });
  const double n = double(out.per_zombie.size());
  out.never_served_fraction = n ? double(out.never_served) / n : 0.0;
  out.served_60_plus_fraction = n ? double(out.served_60_plus) / n : 0.0;
  out.distribution = Cdf::of(std::move(days));
  return out;
}

ServedAfterRereg served_after_rereg(std::span<const ServingObservation> serving,
                                    std::span<const ZombieVerdict> verdicts) {
  const auto idx = index_served(serving);
  ServedAfterRereg out;
  for (const auto& v : verdicts) {
    if (!is_webpki_zombie(v))
      continue;
    ++out.zombies;
    if (!v.rereg || !v.rereg->overlaps_linkage_validity)
      continue;
    ++out.overlap;
    out.overlapping.push_back(v.linkage.linked_name);
    auto it = idx.find(v.linkage.linked_name);
    if (it == idx.end())
      continue;
    const auto n = count_in(it->second, v.rereg->next_epoch_start, zombie_end(v));
    if (n > 0) {
      ++out.served_past;
      out.days_served_after.push_back(n);
    }
  }
  std::sort(out.overlapping.begin(), out.overlapping.end());
  out.median_days = median(out.days_served_after);
  return out;
}

RevocationComparison revocation_comparison(std::span<const ZombieVerdict> verdicts) {
  RevocationComparison out;
  for (const auto& v : verdicts) {
    if (v.linkage.ecosystem != Ecosystem::webpki || v.status != Status::zombie)
      continue;
    const bool revoked = v.linkage.death_cause == DeathCause::revoked;
    if (v.rereg && v.rereg->overlaps_linkage_validity) {
      ++out.rereg_total;
      out.rereg_revoked += revoked;
    } else {
      ++out.other_total;
      out.other_revoked += revoked;
    }
  }
  if (out.rereg_total)
    out.rate_rereg = double(out.rereg_revoked) / double(out.rereg_total);
  if (out.other_total)
    out.rate_other = double(out.other_revoked) / double(out.other_total);
  if (out.rate_rereg && out.rate_other && *out.rate_other > 0)
    out.ratio = *out.rate_rereg / *out.rate_other;
  return out;
}

std::string MavenActivityBreakdown::check() const {
  if (live + indeterminate + zombie_unknown_start + zombie_known_start != total)
    return "status buckets do not sum to total";
  if (no_changes_while_zombie + new_versions_while_zombie != zombie_known_start)
    return "while-zombie buckets do not sum to known-start zombies";
  if (not_reregistered + reregistered != new_versions_while_zombie)
    return "re-registration buckets do not sum to publishing zombies";
  if (no_changes_after_rereg + new_versions_after_rereg != reregistered)
    return "after-re-registration buckets do not sum to re-registered";
  return {};
}

MavenActivityBreakdown maven_activity_breakdown(std::span<const ZombieVerdict> verdicts) {
  MavenActivityBreakdown b;
  auto published_between = [](const std::vector<Day>& days, Day from, Day to) {
    return count_in(days, from, to) > 0;
  };
  for (const auto& v : verdicts) {
    if (v.linkage.ecosystem != Ecosystem::maven)
      continue;
    ++b.total;
    switch (v.status) {
    case Status::live:
    case Status::exempt:
      ++b.live;
      continue;
    case Status::indeterminate:
      ++b.indeterminate;
      continue;
    case Status::zombie:
      break;
    }
    if (!v.zombie_birth) {
      ++b.zombie_unknown_start;
      continue;
    }
    ++b.zombie_known_start;
    const auto& days = v.linkage.activity;
    if (!published_between(days, *v.zombie_birth, v.as_of)) {
      ++b.no_changes_while_zombie;
      continue;
    }
    ++b.new_versions_while_zombie;
    if (!v.rereg) {
      ++b.not_reregistered;
      continue;
    }
    ++b.reregistered;
    if (published_between(days, v.rereg->next_epoch_start, v.as_of))
      ++b.new_versions_after_rereg;
    else
      ++b.no_changes_after_rereg;
  }
  return b;
}

// ---------------------------------------------------------------------------
// indicator matrix

std::string_view to_string(Attack a) {
  switch (a) {
  case Attack::bulk_name_creation:
    return "bulk_name_creation";
  case Attack::name_squatting:
    return "name_squatting";
  case Attack::resource_squatting:
    return "resource_squatting";
  case Attack::name_takeover:
    return "name_takeover";
  case Attack::resource_takeover:
    return "resource_takeover";
  }
  return "?";
}

Attack parse_attack(std::string_view s) {
  for (auto a : kAllAttacks)
    if (to_string(a) == s)
      return a;
  throw std::invalid_argument("unknown attack '" + std::string(s) + "'");
}

std::string_view to_string(IndicatorState s) {
  switch (s) {
  case IndicatorState::prevented:
    return "prevented";
  case IndicatorState::no_evidence:
    return "no_evidence";
  case IndicatorState::insufficient:
    return "insufficient";
  case IndicatorState::available:
    return "available";
  case IndicatorState::escalates:
    return "escalates";
  }
  return "?";
}

DesignFact parse_design_fact(std::string_view s) {
  if (s == "prevented")
    return DesignFact::prevented;
  if (s == "escalates")
    return DesignFact::escalates;
  if (s == "insufficient")
    return DesignFact::insufficient;
  if (s == "computed")
    return DesignFact::computed;
  throw std::invalid_argument("unknown design fact '" + std::string(s) +
                              "' (expected prevented, escalates, insufficient or computed)");
}

std::string_view to_string(DesignFact f) {
  switch (f) {
  case DesignFact::prevented:
    return "prevented";
  case DesignFact::escalates:
    return "escalates";
  case DesignFact::insufficient:
    return "insufficient";
  case DesignFact::computed:
    return "computed";
  }
  return "?";
}

std::vector<Ecosystem> DesignConfig::ecosystems() const {
  std::set<Ecosystem> s;
  for (const auto& [key, fact] : facts)
    s.insert(key.second);
  return {s.begin(), s.end()};
}

DesignConfig DesignConfig::defaults() {
  using F = DesignFact;
  DesignConfig c;
  auto set = [&](Ecosystem e, std::array<F, 5> row) {
    for (std::size_t i = 0; i < kAllAttacks.size(); ++i)
      c.facts[{kAllAttacks[i], e}] = row[i];
  };
  // resource independence: linked resources need a separate key
  set(Ecosystem::webpki, {F::computed, F::computed, F::prevented, F::insufficient, F::prevented});
  set(Ecosystem::ens_onchain, {F::computed, F::computed, F::prevented, F::computed, F::prevented});
  set(Ecosystem::maven, {F::computed, F::escalates, F::computed, F::escalates, F::computed});
  return c;
}

IndicatorEvidence collect_evidence(std::span<const ZombieVerdict> verdicts, std::int32_t agp_days) {
  IndicatorEvidence ev;
  for (const auto& v : verdicts) {
    const auto eco = v.linkage.ecosystem;
    ++ev.verdicts[eco];
    if (v.status != Status::zombie)
      continue;
    if (v.birth_epoch && v.birth_epoch->length() <= agp_days)
      ++ev.zombies_within_agp[eco];
    if (v.active)
      ++ev.active_zombies[eco];
    if (v.zombie_birth && v.linkage.death_cause == DeathCause::overwritten && v.linkage.death &&
        *v.linkage.death >= *v.zombie_birth && *v.linkage.death <= v.as_of)
      ++ev.overwritten_while_zombie[eco];
  }
  const auto b = maven_activity_breakdown(verdicts);
  ev.maven_new_versions_while_zombie = b.new_versions_while_zombie;
  ev.maven_new_versions_after_rereg = b.new_versions_after_rereg;
  return ev;
}

namespace {

std::optional<std::size_t> supporting_count(const IndicatorEvidence& ev, Attack a, Ecosystem e) {
  auto get = [e](const std::map<Ecosystem, std::size_t>& m) {
    auto it = m.find(e);
    return it == m.end() ? std::size_t{0} : it->second;
  };
  switch (a) {
  case Attack::bulk_name_creation:
    return get(ev.zombies_within_agp);
  case Attack::name_squatting:
    return get(ev.active_zombies);
  case Attack::resource_squatting:
    if (e == Ecosystem::maven)
      return ev.maven_new_versions_while_zombie;
    return std::nullopt;
  case Attack::name_takeover:
    if (e == Ecosystem::ens_onchain)
      return get(ev.overwritten_while_zombie);
    return std::nullopt;
  case Attack::resource_takeover:
    if (e == Ecosystem::maven)
      return ev.maven_new_versions_after_rereg;
    return std::nullopt;
  }
  return std::nullopt;
}

} // namespace

IndicatorMatrix indicator_matrix(const IndicatorEvidence& evidence, const DesignConfig& design) {
  std::set<Ecosystem> ecosystems;
  for (auto e : design.ecosystems())
    ecosystems.insert(e);
  for (const auto& [e, n] : evidence.verdicts)
    if (e != Ecosystem::ens_gasless)
      ecosystems.insert(e);

  IndicatorMatrix m;
  for (auto e : ecosystems) {
    const bool has_data = evidence.verdicts.contains(e) && evidence.verdicts.at(e) > 0;
    for (auto a : kAllAttacks) {
      auto it = design.facts.find({a, e});
      if (it == design.facts.end())
        throw MissingDesignEntry("design config has no entry for " + std::string(to_string(e)) + "." +
                                 std::string(to_string(a)));
      IndicatorCell cell;
      switch (it->second) {
      case DesignFact::prevented:
        cell.state = IndicatorState::prevented;
        break;
      case DesignFact::escalates:
        cell.state = IndicatorState::escalates;
        break;
      case DesignFact::insufficient:
        cell.state = IndicatorState::insufficient;
        break;
      case DesignFact::computed: {
        const auto n = supporting_count(evidence, a, e);
        if (!n)
          throw MissingDesignEntry("no computable evidence for " + std::string(to_string(a)) + " in " +
                                   std::string(to_string(e)) + "; declare it in the design config");
        if (!has_data) {
          cell.state = IndicatorState::insufficient;
          break;
        }
        cell.supporting = *n;
        cell.state = *n >= design.available_min_count ? IndicatorState::available : IndicatorState::no_evidence;
        break;
      }
      }
      m.cells[{a, e}] = cell;
    }
  }
  return m;
}

} // namespace zs
