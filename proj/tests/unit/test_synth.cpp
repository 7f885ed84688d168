#include "helpers.hpp"

#include "zombiescope/synth.hpp"

#include <doctest.h>

#include <cmath>

using namespace zs;

namespace {

SynthParams small(std::size_t n = 200) {
  SynthParams p;
  p.domains = n;
  p.window_days = 1200;
  return p;
}

std::string truth_text(const GroundTruthWorld& w) {
  std::string s;
  for (const auto& d : w.domains)
    s += truth_json_line(d);
  return s;
}

// |observed - n p| within k standard deviations of a binomial(n, p)
bool within_sigma(double observed, double n, double p, double k) {
  return std::abs(observed - n * p) <= k * std::sqrt(n * p * (1 - p));
}

} // namespace

TEST_CASE("fixed seed reproduces the world and its observations") {
  auto a = generate_world(small(), 42);
  auto b = generate_world(small(), 42);
  CHECK(truth_text(a) == truth_text(b));
  CHECK(a.linkages == b.linkages);
  CHECK(a.certificates == b.certificates);
  CHECK(a.ens_claims == b.ens_claims);
  CHECK(a.maven_versions == b.maven_versions);
  CHECK(a.serving == b.serving);

  NoiseModel n;
  n.zone_coverage = 0.9;
  n.rdap_coverage = 0.5;
  auto ea = emit_observations(a, n, 7);
  auto eb = emit_observations(b, n, 7);
  CHECK(ea.rdap == eb.rdap);
  std::ostringstream oa, ob;
  write_observations(oa, ea.observations);
  write_observations(ob, eb.observations);
  CHECK(oa.str() == ob.str());

  CHECK(truth_text(generate_world(small(), 43)) != truth_text(a));
}

TEST_CASE("world invariants") {
  auto w = generate_world(small(500), 9);
  REQUIRE(w.domains.size() == 500);
  for (std::size_t i = 1; i < w.domains.size(); ++i)
    CHECK(w.domains[i - 1].name < w.domains[i].name);
  for (const auto& d : w.domains) {
    REQUIRE_FALSE(d.epochs.empty());
    CHECK(d.epochs.front().start >= w.window().first);
    for (std::size_t k = 0; k < d.epochs.size(); ++k) {
      CHECK(d.epochs[k].start <= d.epochs[k].end);
      if (k > 0)
        CHECK(d.epochs[k].start > d.epochs[k - 1].end + 1); // a real gap between registrants
    }
  }
  for (const auto& l : w.linkages) {
    REQUIRE(w.find(l.dns_name) != nullptr);
    if (l.death)
      CHECK(*l.death > l.birth);
  }
}

TEST_CASE("certain non-renewal ends every epoch at its first anniversary") {
  auto p = small();
  p.nonrenewal_per_year = 1.0;
  p.tasting_fraction = 0.0;
  auto w = generate_world(p, 3);
  for (const auto& d : w.domains)
    for (const auto& e : d.epochs)
      CHECK(e.end - e.start + 1 == 365);
}

TEST_CASE("full zone coverage observes every registered day in the window") {
  auto w = generate_world(small(), 5);
  auto e = emit_observations(w, NoiseModel::clean(), 1);
  const auto win = w.window();
  for (const auto& d : w.domains) {
    std::vector<Day> expected;
    for (const auto& ep : d.epochs)
      for (Day t = ep.start; t <= std::min(ep.end, win.last); ++t)
        expected.push_back(t);
    auto it = e.observations.find(d.name);
    REQUIRE(it != e.observations.end());
    CHECK(it->second.zone == expected);
    CHECK(it->second.scan.empty());
  }
}

TEST_CASE("RDAP coverage zero emits no rows") {
  auto w = generate_world(small(), 5);
  NoiseModel n;
  n.rdap_coverage = 0.0;
  n.rdap_negative_coverage = 0.0;
  CHECK(emit_observations(w, n, 1).rdap.empty());

  n.rdap_coverage = 1.0;
  std::size_t epochs_in_window = 0;
  for (const auto& d : w.domains)
    for (const auto& ep : d.epochs)
      epochs_in_window += ep.start <= w.window().last;
  auto rows = emit_observations(w, n, 1).rdap;
  CHECK(rows.size() == epochs_in_window);
  for (const auto& r : rows) {
    CHECK(r.polarity == RdapPolarity::positive);
    CHECK(r.registration_date.has_value());
    CHECK(r.query_time >= *r.registration_date);
  }
}

TEST_CASE("partial zone coverage stays within three standard deviations") {
  auto w = generate_world(small(300), 11);
  NoiseModel n;
  n.zone_coverage = 0.9;
  auto e = emit_observations(w, n, 2);
  double registered = 0, seen = 0;
  for (const auto& d : w.domains)
    for (const auto& ep : d.epochs)
      if (ep.start <= w.window().last)
        registered += std::min(ep.end, w.window().last) - ep.start + 1;
  for (const auto& [name, o] : e.observations)
    seen += double(o.zone.size());
  CHECK(registered > 10000);
  CHECK(within_sigma(seen, registered, 0.9, 3));
}

TEST_CASE("domain tasting follows its configured fraction") {
  auto p = small(3000);
  p.tasting_fraction = 0.25;
  auto w = generate_world(p, 13);
  double epochs = 0, short_ones = 0;
  for (const auto& d : w.domains)
    for (const auto& e : d.epochs) {
      ++epochs;
      short_ones += e.end - e.start + 1 <= 5;
    }
  CHECK(epochs > 3000);
  CHECK(within_sigma(short_ones, epochs, 0.25, 3));
}

TEST_CASE("parameter validation") {
  auto p = small();
  p.tasting_fraction = 1.5;
  CHECK_THROWS_AS(generate_world(p, 1), std::invalid_argument);
  p = small();
  p.window_days = 0;
  CHECK_THROWS_AS(generate_world(p, 1), std::invalid_argument);
  NoiseModel n;
  n.zone_coverage = -0.1;
  CHECK_THROWS_AS(n.validate(), std::invalid_argument);
}

TEST_CASE("oracle on a clean world") {
  auto w = generate_world(small(), 21);
  const Day as_of = w.window().last;
  auto o = oracle_evaluate(w, as_of);
  CHECK(o.verdicts.size() == w.linkages.size());
  CHECK(o.timelines.size() == w.domains.size());
  for (const auto& v : o.verdicts) {
    if (v.linkage.ecosystem == Ecosystem::ens_gasless)
      CHECK(v.status == Status::exempt);
    if (v.known_zombie_start()) {
      CHECK(*v.zombie_birth == v.birth_epoch->end + 1);
      CHECK(*v.zombie_death <= as_of);
    }
  }
  std::size_t total = 0;
  for (const auto& [e, s] : o.summary)
    total += s.total;
  CHECK(total == w.linkages.size());
}

TEST_CASE("parameter files") {
  zt::TempDir tmp("synth");
  zt::write(tmp / "p.conf", "[world]\ndomains = 50\ntasting_fraction = 0.2\n[noise]\nzone_coverage = 0.95\n");
  SynthParams p;
  NoiseModel n;
  load_synth_params(tmp / "p.conf", p, n);
  CHECK(p.domains == 50);
  CHECK(p.tasting_fraction == 0.2);
  CHECK(n.zone_coverage == 0.95);

  zt::write(tmp / "bad.conf", "[noise]\nzone = 1\n");
  CHECK_THROWS(load_synth_params(tmp / "bad.conf", p, n));
}
