#include "helpers.hpp"

#include "zombiescope/classify.hpp"
#include "zombiescope/linkage.hpp"
#include "zombiescope/pipeline.hpp"
#include "zombiescope/synth.hpp"

#include <doctest.h>

#include <sstream>

using namespace zs;

namespace {

struct Run {
  GroundTruthWorld world;
  EmittedObservations emitted;
  std::vector<EpochTimeline> timelines;
  std::vector<Linkage> linkages;
};

Run run_clean(std::uint64_t seed, std::size_t domains) {
  SynthParams p;
  p.domains = domains;
  p.window_days = 1000;
  Run r{generate_world(p, seed), {}, {}, {}};
  r.emitted = emit_observations(r.world, NoiseModel::clean(), seed + 1);
  r.timelines = infer_all(r.emitted.observations, r.emitted.rdap, RunConfig{}, r.world.window());

  const auto& psl = PublicSuffixRules::builtin();
  for (auto&& v : {linkages_from_certificates(r.world.certificates, psl),
                   linkages_from_ens_claims(r.world.ens_claims), match_gasless_txt(r.world.gasless),
                   linkages_from_maven_index(r.world.maven_versions, psl)})
    r.linkages.insert(r.linkages.end(), v.begin(), v.end());
  sort_linkages(r.linkages);
  return r;
}

TimelineMap by_domain(const std::vector<EpochTimeline>& ts) {
  TimelineMap m;
  for (const auto& t : ts)
    m[t.domain] = t;
  return m;
}

} // namespace

TEST_CASE("clean observations reproduce the oracle exactly") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto r = run_clean(seed, 300);
    CHECK(r.linkages == r.world.linkages);
    auto tm = by_domain(r.timelines);
    for (Day as_of : {r.world.window().first + 400, r.world.window().last}) {
      auto oracle = oracle_evaluate(r.world, as_of);
      CHECK(r.timelines == oracle.timelines);
      auto got = batch_classify(r.linkages, tm, as_of);
      REQUIRE(got.verdicts.size() == oracle.verdicts.size());
      for (std::size_t i = 0; i < got.verdicts.size(); ++i)
        CHECK(got.verdicts[i] == oracle.verdicts[i]);
      CHECK(got.summary == oracle.summary);
    }
  }
}

TEST_CASE("streamed inference equals whole-file inference") {
  auto r = run_clean(8, 200);
  std::ostringstream csv;
  write_observations(csv, r.emitted.observations);
  std::istringstream in(csv.str());
  auto s = infer_stream(in, "obs.csv", r.emitted.rdap, RunConfig{}, r.world.window());
  CHECK(s.timelines == r.timelines);
  CHECK(s.window == r.world.window());
  CHECK(s.rows > 0);

  // without an explicit window both derive it from the data
  std::istringstream again(csv.str());
  auto implicit = infer_stream(again, "obs.csv", r.emitted.rdap, RunConfig{});
  CHECK(implicit.timelines == infer_all(r.emitted.observations, r.emitted.rdap, RunConfig{}));
}

TEST_CASE("ungrouped streams are rejected") {
  std::istringstream in("domain,date,source\na.com,2024-01-01,zone\nb.com,2024-01-01,zone\na.com,2024-01-02,zone\n");
  CHECK_THROWS_AS(infer_stream(in, "obs.csv", {}, RunConfig{}), ObservationStream::NotGrouped);
}

TEST_CASE("RDAP rows for unobserved domains are reported") {
  ObservationSet obs;
  obs["a.com"] = DomainObservations{"a.com", {zt::D("2024-01-01")}, {}};
  Warnings w;
  auto ts = infer_all(obs, {zt::pos("z.com", "2024-01-05", "2023-01-01")}, RunConfig{}, std::nullopt, &w);
  CHECK(ts.size() == 1);
  CHECK_FALSE(w.empty());
}

TEST_CASE("data span covers observations and RDAP dates") {
  ObservationSet obs;
  obs["a.com"] = DomainObservations{"a.com", {zt::D("2024-01-10")}, {zt::D("2024-02-01")}};
  auto span = data_span(obs, {zt::pos("a.com", "2024-03-01", "2023-05-05")});
  REQUIRE(span.has_value());
  CHECK(span->first == zt::D("2023-05-05"));
  CHECK(span->last == zt::D("2024-03-01"));
  CHECK_FALSE(data_span({}, {}).has_value());
}

TEST_CASE("verdict ordering is canonical") {
  auto r = run_clean(4, 100);
  auto v = oracle_evaluate(r.world, r.world.window().last).verdicts;
  auto shuffled = v;
  std::mt19937_64 rng(5);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  sort_verdicts(shuffled);
  CHECK(shuffled == v);
  CHECK(linkages_of(v) == r.world.linkages);
}
