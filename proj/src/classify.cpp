#include "zombiescope/classify.hpp"

namespace zs {

std::string_view to_string(Status s) {
  switch (s) {
  case Status::live:
    return "live";
  case Status::zombie:
    return "zombie";
  case Status::indeterminate:
    return "indeterminate";
  case Status::exempt:
    return "exempt";
  }
  return "?";
}

Status parse_status(std::string_view s) {
  if (s == "live")
    return Status::live;
  if (s == "zombie")
    return Status::zombie;
  if (s == "indeterminate")
    return Status::indeterminate;
  if (s == "exempt")
    return Status::exempt;
  throw std::invalid_argument("unknown verdict status '" + std::string(s) + "'");
}

namespace {

bool valid_on(const Linkage& l, Day d) { return !l.death || d <= *l.death; }

} // namespace

ZombieVerdict classify_linkage(const Linkage& linkage, const EpochTimeline* timeline, Day as_of) {
  if (timeline && timeline->domain != linkage.dns_name)
    throw DomainMismatch("timeline for " + timeline->domain + " used to classify linkage on " +
                         linkage.dns_name);

  ZombieVerdict v;
  v.linkage = linkage;
  v.as_of = as_of;
  v.active = linkage.birth <= as_of && (!linkage.death || as_of < *linkage.death);

  if (linkage.ecosystem == Ecosystem::ens_gasless) {
    v.status = Status::exempt;
    return v;
  }
  if (!timeline) {
    v.status = Status::indeterminate;
    return v;
  }

  const OwnershipInterval* epoch = timeline->find(linkage.birth);
  if (!epoch) {
    // Not covered: only an RDAP-closed start after the linkage proves that
    // whatever registration existed at linkage birth is gone.
    for (const auto* next = timeline->next_after(linkage.birth); next;
         next = timeline->next_after(next->start)) {
      if (next->start > as_of)
        break;
      if (next->start_closed) {
        if (valid_on(linkage, next->start)) {
          v.status = Status::zombie;
          v.rereg = ReRegistrationInfo{next->start, true};
        }
        break;
      }
    }
    if (v.status != Status::zombie)
      v.status = Status::indeterminate;
    return v;
  }

  v.birth_epoch = *epoch;
  if (const auto* next = timeline->next_after(epoch->end); next && next->start <= as_of)
    v.rereg = ReRegistrationInfo{next->start, valid_on(linkage, next->start)};

  const Day zombie_birth = epoch->end + 1;
  if (epoch->right_censored || epoch->end >= as_of || !valid_on(linkage, zombie_birth)) {
    v.status = Status::live;
    return v;
  }
  v.status = Status::zombie;
  v.zombie_birth = zombie_birth;
  v.zombie_death = linkage.death ? std::min(*linkage.death, as_of) : as_of;
  return v;
}

ZombieDuration zombie_duration(const ZombieVerdict& verdict, Day as_of) {
  if (!verdict.known_zombie_start())
    throw std::invalid_argument("zombie duration requested for " + verdict.linkage.dns_name +
                                " which has no known zombie birth");
  const auto& l = verdict.linkage;
  const Day end = l.death ? std::min(*l.death, as_of) : as_of;
  return ZombieDuration{end - *verdict.zombie_birth + 1, !l.death || *l.death > as_of};
}

namespace {

void count(EcosystemSummary& s, const ZombieVerdict& v) {
  ++s.total;
  if (v.active)
    ++s.active;
  switch (v.status) {
  case Status::live:
    ++s.live;
    break;
  case Status::zombie:
    ++s.zombie;
    if (!v.zombie_birth)
      ++s.zombie_unknown_start;
    if (v.active)
      ++s.active_zombie;
    break;
  case Status::indeterminate:
    ++s.indeterminate;
    break;
  case Status::exempt:
    ++s.exempt;
    break;
  }
}

} // namespace

EcosystemSummary summarize(std::span<const ZombieVerdict> verdicts) {
  EcosystemSummary s;
  for (const auto& v : verdicts)
    count(s, v);
  return s;
}

BatchResult batch_classify(std::span<const Linkage> linkages, const TimelineMap& timelines, Day as_of) {
  BatchResult out;
  out.verdicts.reserve(linkages.size());
  for (const auto& l : linkages) {
    auto it = timelines.find(l.dns_name);
    out.verdicts.push_back(classify_linkage(l, it == timelines.end() ? nullptr : &it->second, as_of));
  }
  for (const auto& v : out.verdicts)
    count(out.summary[v.linkage.ecosystem], v);
  return out;
}

} // namespace zs
