#include "helpers.hpp"

#include "zombiescope/indicators.hpp"

#include <doctest.h>

#include <random>

using namespace zs;
using zt::D;
using zt::iv;

namespace {

EpochTimeline timeline(std::string domain, std::vector<OwnershipInterval> v, const char* last = "2025-12-31") {
  EpochTimeline t;
  t.domain = std::move(domain);
  t.intervals = std::move(v);
  apply_window(t, {t.intervals.front().start, D(last)});
  return t;
}

Linkage cert(const char* fp, const char* name, const char* nb, const char* na, std::optional<const char*> rev = {}) {
  Linkage l;
  l.ecosystem = Ecosystem::webpki;
  l.dns_name = name;
  l.linked_name = fp;
  l.birth = D(nb);
  l.scheduled_end = D(na);
  l.death = D(na);
  l.death_cause = DeathCause::expired;
  if (rev) {
    l.death = D(*rev);
    l.death_cause = DeathCause::revoked;
  }
  return l;
}

Linkage maven(const char* ns, const char* name, std::vector<const char*> days) {
  Linkage l;
  l.ecosystem = Ecosystem::maven;
  l.dns_name = name;
  l.linked_name = ns;
  for (auto d : days)
    l.activity.push_back(D(d));
  l.birth = l.activity.front();
  return l;
}

std::vector<ServingObservation> served_daily(const char* fp, const char* from, const char* to) {
  std::vector<ServingObservation> v;
  for (Day d = D(from); d <= D(to); ++d)
    v.push_back({fp, d, true});
  return v;
}

} // namespace

TEST_CASE("AGP deaths") {
  auto tasted = timeline("t.com", {iv("2025-01-01", "2025-01-03")});
  auto held = timeline("h.com", {iv("2025-01-01", "2025-04-01")});
  std::vector<ZombieVerdict> vs{
      classify_linkage(cert("a", "t.com", "2025-01-02", "2025-04-01"), &tasted, D("2025-06-01")),
      classify_linkage(cert("b", "h.com", "2025-01-02", "2025-05-01"), &held, D("2025-06-01")),
      classify_linkage(cert("c", "h.com", "2025-01-02", "2025-03-01"), &held, D("2025-06-01")),
  };
  auto s = agp_death_stats(vs);
  CHECK(s.zombies == 2);
  CHECK(s.within_agp == 1);
  CHECK(s.fraction == 0.5);
  CHECK(s.lifespan_histogram.at(3) == 1);
  CHECK(s.lifespan_histogram.at(91) == 1);
  CHECK(agp_death_stats(vs, 2).within_agp == 0);
}

TEST_CASE("served after death") {
  auto tl = timeline("a.com", {iv("2025-01-01", "2025-03-01")});
  auto never = classify_linkage(cert("aa", "a.com", "2025-02-01", "2025-06-01"), &tl, D("2025-12-01"));
  auto every = classify_linkage(cert("bb", "a.com", "2025-01-01", "2025-04-29"), &tl, D("2025-12-01"));
  std::vector<ZombieVerdict> vs{never, every};
  // bb's zombie window is 03-02..04-29 (59 days); serve it throughout, and
  // once outside validity
  auto serving = served_daily("bb", "2025-01-01", "2025-04-29");
  serving.push_back({"bb", D("2025-05-15"), true});
  serving.push_back({"aa", D("2025-03-05"), false});
  Warnings w;
  auto s = served_after_death(serving, vs, &w);
  REQUIRE(s.per_zombie.size() == 2);
  CHECK(s.per_zombie[0] == ServedEntry{"aa", 0, 92});
  CHECK(s.per_zombie[1] == ServedEntry{"bb", 59, 59});
  CHECK(s.never_served == 1);
  CHECK(s.never_served_fraction == 0.5);
  CHECK(s.served_60_plus == 0);
  CHECK(w.items.size() == 1);
  for (const auto& e : s.per_zombie)
    CHECK(e.days_served <= e.zombie_days);

  auto none = served_after_death({}, vs);
  CHECK(none.never_served == 2);
}

TEST_CASE("served after death: 60 days served") {
  auto tl = timeline("a.com", {iv("2025-01-01", "2025-03-01")});
  auto v = classify_linkage(cert("cc", "a.com", "2025-02-01", "2025-04-30"), &tl, D("2025-12-01"));
  std::vector<ZombieVerdict> vs{v};
  auto s = served_after_death(served_daily("cc", "2025-03-02", "2025-04-30"), vs);
  CHECK(s.per_zombie[0].days_served == 60);
  CHECK(s.served_60_plus == 1);
}

TEST_CASE("served after re-registration") {
  auto tl = timeline("a.com", {iv("2025-01-01", "2025-03-01"), iv("2025-04-01", "2025-12-31", true)});
  auto overlapping = classify_linkage(cert("aa", "a.com", "2025-02-01", "2025-05-01"), &tl, D("2025-12-01"));
  auto expired_first = classify_linkage(cert("bb", "a.com", "2025-02-01", "2025-03-20"), &tl, D("2025-12-01"));
  std::vector<ZombieVerdict> vs{overlapping, expired_first};
  auto r = served_after_rereg(served_daily("aa", "2025-03-25", "2025-04-10"), vs);
  CHECK(r.zombies == 2);
  CHECK(r.overlap == 1);
  CHECK(r.overlapping == std::vector<std::string>{"aa"});
  CHECK(r.served_past == 1);
  CHECK(r.days_served_after == std::vector<double>{10});
  CHECK(r.median_days == 10);
  CHECK(r.served_past <= r.overlap);
  CHECK(r.overlap <= r.zombies);
}

TEST_CASE("revocation comparison") {
  auto tl = timeline("a.com", {iv("2025-01-01", "2025-03-01"), iv("2025-04-01", "2025-12-31", true)});
  std::vector<ZombieVerdict> vs{
      classify_linkage(cert("a", "a.com", "2025-02-01", "2025-05-01", "2025-04-05"), &tl, D("2025-12-01")),
      classify_linkage(cert("b", "a.com", "2025-02-01", "2025-05-01"), &tl, D("2025-12-01")),
      classify_linkage(cert("c", "a.com", "2025-02-01", "2025-03-20", "2025-03-10"), &tl, D("2025-12-01")),
      classify_linkage(cert("d", "a.com", "2025-02-01", "2025-03-20"), &tl, D("2025-12-01")),
      classify_linkage(cert("e", "a.com", "2025-02-01", "2025-03-20"), &tl, D("2025-12-01")),
      classify_linkage(cert("f", "a.com", "2025-02-01", "2025-03-20"), &tl, D("2025-12-01")),
  };
  auto r = revocation_comparison(vs);
  CHECK(r.rereg_total == 2);
  CHECK(r.rereg_revoked == 1);
  CHECK(r.other_total == 4);
  CHECK(r.other_revoked == 1);
  CHECK(r.rate_rereg == 0.5);
  CHECK(r.rate_other == 0.25);
  CHECK(r.ratio == 2.0);

  std::vector<ZombieVerdict> unrevoked{vs[1], vs[3]};
  auto z = revocation_comparison(unrevoked);
  CHECK(z.rate_rereg == 0.0);
  CHECK(z.rate_other == 0.0);
  CHECK_FALSE(z.ratio.has_value());

  std::vector<ZombieVerdict> all_revoked{vs[0], vs[2]};
  auto a = revocation_comparison(all_revoked);
  CHECK(a.rate_rereg == 1.0);
  CHECK(a.rate_other == 1.0);
  CHECK(a.ratio == 1.0);
}

TEST_CASE("Maven activity breakdown") {
  auto ended = timeline("a.com", {iv("2019-01-01", "2020-01-01")});
  auto rereg = timeline("b.com", {iv("2019-01-01", "2020-01-01"), iv("2021-01-01", "2025-12-31", true)});
  auto live = timeline("c.com", {iv("2019-01-01", "2025-12-31")});
  const Day as_of = D("2025-06-01");
  std::vector<ZombieVerdict> vs{
      classify_linkage(maven("com.a.quiet", "a.com", {"2019-02-01"}), &ended, as_of),
      classify_linkage(maven("com.a.busy", "a.com", {"2019-02-01", "2020-06-01"}), &ended, as_of),
      classify_linkage(maven("com.b.after", "b.com", {"2019-02-01", "2020-06-01", "2022-01-01"}), &rereg, as_of),
      classify_linkage(maven("com.b.before", "b.com", {"2019-02-01", "2020-06-01"}), &rereg, as_of),
      classify_linkage(maven("com.c.x", "c.com", {"2019-02-01", "2024-01-01"}), &live, as_of),
      classify_linkage(maven("com.d.x", "d.com", {"2019-02-01"}), nullptr, as_of),
      // published after as_of: not counted
      classify_linkage(maven("com.a.late", "a.com", {"2019-02-01", "2025-07-01"}), &ended, as_of),
  };
  auto b = maven_activity_breakdown(vs);
  CHECK(b.total == 7);
  CHECK(b.live == 1);
  CHECK(b.indeterminate == 1);
  CHECK(b.zombie_known_start == 5);
  CHECK(b.no_changes_while_zombie == 2);
  CHECK(b.new_versions_while_zombie == 3);
  CHECK(b.not_reregistered == 1);
  CHECK(b.reregistered == 2);
  CHECK(b.new_versions_after_rereg == 1);
  CHECK(b.no_changes_after_rereg == 1);
  CHECK(b.check().empty());

  auto broken = b;
  broken.reregistered += 1;
  CHECK_FALSE(broken.check().empty());
}

TEST_CASE("default indicator matrix") {
  auto tl = timeline("a.com", {iv("2025-01-01", "2025-01-03"), iv("2025-03-01", "2025-12-31", true)});
  std::vector<ZombieVerdict> vs{
      classify_linkage(cert("a", "a.com", "2025-01-02", "2025-04-01"), &tl, D("2025-02-01")),
  };
  Linkage ens;
  ens.ecosystem = Ecosystem::ens_onchain;
  ens.dns_name = "a.com";
  ens.linked_name = "0x1";
  ens.birth = D("2025-01-02");
  vs.push_back(classify_linkage(ens, &tl, D("2025-02-01")));

  auto m = indicator_matrix(collect_evidence(vs, 5), DesignConfig::defaults());
  auto cell = [&](Attack a, Ecosystem e) { return m.cells.at({a, e}); };
  CHECK(cell(Attack::resource_squatting, Ecosystem::webpki).state == IndicatorState::prevented);
  CHECK(cell(Attack::resource_takeover, Ecosystem::webpki).state == IndicatorState::prevented);
  CHECK(cell(Attack::name_takeover, Ecosystem::webpki).state == IndicatorState::insufficient);
  CHECK(cell(Attack::bulk_name_creation, Ecosystem::webpki).state == IndicatorState::available);
  CHECK(cell(Attack::bulk_name_creation, Ecosystem::webpki).supporting == 1);
  // no ENS zombie was overwritten
  CHECK(cell(Attack::name_takeover, Ecosystem::ens_onchain).state == IndicatorState::no_evidence);
  CHECK(cell(Attack::name_takeover, Ecosystem::ens_onchain).supporting == 0);
  // no maven data at all
  CHECK(cell(Attack::resource_squatting, Ecosystem::maven).state == IndicatorState::insufficient);
  CHECK(cell(Attack::name_takeover, Ecosystem::maven).state == IndicatorState::escalates);
}

TEST_CASE("empty data leaves every computed cell insufficient") {
  auto m = indicator_matrix(collect_evidence({}, 5), DesignConfig::defaults());
  const auto design = DesignConfig::defaults();
  for (const auto& [key, cell] : m.cells) {
    if (design.facts.at(key) == DesignFact::computed) {
      CHECK(cell.state == IndicatorState::insufficient);
      CHECK_FALSE(cell.supporting.has_value());
    }
  }
  CHECK(m.cells.size() == 15);
}

TEST_CASE("missing or uncomputable design entries are errors") {
  DesignConfig d = DesignConfig::defaults();
  d.facts.erase({Attack::name_takeover, Ecosystem::maven});
  CHECK_THROWS_AS(indicator_matrix(collect_evidence({}, 5), d), MissingDesignEntry);

  DesignConfig e = DesignConfig::defaults();
  e.facts[{Attack::resource_squatting, Ecosystem::webpki}] = DesignFact::computed;
  CHECK_THROWS_AS(indicator_matrix(collect_evidence({}, 5), e), MissingDesignEntry);
}

TEST_CASE("attack and fact names round-trip") {
  for (auto a : kAllAttacks)
    CHECK(parse_attack(to_string(a)) == a);
  for (auto f : {DesignFact::prevented, DesignFact::escalates, DesignFact::insufficient, DesignFact::computed})
    CHECK(parse_design_fact(to_string(f)) == f);
  CHECK_THROWS(parse_attack("phishing"));
}
