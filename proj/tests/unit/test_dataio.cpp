#include "helpers.hpp"

#include "zombiescope/dataio.hpp"

#include <doctest.h>

#include <random>

using namespace zs;
using zt::D;
using zt::iv;

namespace {

std::size_t error_line(const std::function<void()>& f) {
  try {
    f();
  } catch (const DataError& e) {
    return e.line();
  }
  return std::size_t(-1);
}

} // namespace

TEST_CASE("observations: parse, dedupe, group") {
  std::istringstream in("domain,date,source\n"
                        "Example.COM.,2025-01-01,zone\n"
                        "example.com,2025-01-01,zone\n"
                        "example.com,2025-01-03,scan\n"
                        "b.org,2025-01-02,zone\n");
  auto obs = read_observations(in);
  REQUIRE(obs.size() == 2);
  CHECK(obs.at("example.com").zone == std::vector<Day>{D("2025-01-01")});
  CHECK(obs.at("example.com").scan == std::vector<Day>{D("2025-01-03")});
  CHECK(obs.at("b.org").zone.size() == 1);
}

TEST_CASE("observations: errors carry line numbers") {
  auto read = [](const char* text) {
    return [text] {
      std::istringstream in(text);
      read_observations(in);
    };
  };
  CHECK(error_line(read("domain,date,source\nexample.com,2025-13-01,zone\n")) == 2);
  CHECK(error_line(read("domain,date,source\na.com,2025-01-01,zone\na.com,2025-01-02,axfr\n")) == 3);
  CHECK(error_line(read("domain,date,source\na.com,2025-01-01\n")) == 2);
  CHECK(error_line(read("domain,when,source\n")) == 1);
}

TEST_CASE("observations: write then read round-trips") {
  std::mt19937_64 rng(1);
  ObservationSet obs;
  for (int i = 0; i < 20; ++i) {
    auto& d = obs["d" + std::to_string(i) + ".com"];
    d.domain = "d" + std::to_string(i) + ".com";
    for (int k = 0; k < 30; ++k) {
      const Day day = D("2024-01-01") + int(rng() % 100);
      (rng() % 2 ? d.zone : d.scan).push_back(day);
    }
    for (auto* v : {&d.zone, &d.scan}) {
      std::sort(v->begin(), v->end());
      v->erase(std::unique(v->begin(), v->end()), v->end());
    }
  }
  std::ostringstream out;
  write_observations(out, obs);
  std::istringstream in(out.str());
  CHECK(read_observations(in) == obs);
}

TEST_CASE("observation stream yields grouped domains and rejects regrouping") {
  std::istringstream in("domain,date,source\n"
                        "a.com,2025-01-02,zone\n"
                        "a.com,2025-01-01,scan\n"
                        "b.com,2025-01-05,zone\n");
  ObservationStream s(in, "obs");
  DomainObservations d;
  REQUIRE(s.next(d));
  CHECK(d.domain == "a.com");
  CHECK(d.zone == std::vector<Day>{D("2025-01-02")});
  CHECK(d.scan == std::vector<Day>{D("2025-01-01")});
  REQUIRE(s.next(d));
  CHECK(d.domain == "b.com");
  CHECK_FALSE(s.next(d));
  CHECK(s.rows() == 3);
  CHECK(s.span() == DayRange{D("2025-01-01"), D("2025-01-05")});

  std::istringstream bad("domain,date,source\na.com,2025-01-01,zone\nb.com,2025-01-01,zone\na.com,2025-01-02,zone\n");
  ObservationStream t(bad, "obs");
  CHECK(t.next(d));
  CHECK_THROWS_AS(
      {
        while (t.next(d)) {
        }
      },
      ObservationStream::NotGrouped);
}

TEST_CASE("RDAP records") {
  std::istringstream in(
      R"({"domain":"a.com","query_time":"2025-02-01","status":"positive","registration_date":"2024-12-01"})"
      "\n"
      R"({"domain":"a.com","query_time":"2025-03-01","status":"negative"})"
      "\n"
      R"({"domain":"a.com","query_time":"2025-03-02","status":"positive"})"
      "\n");
  Warnings w;
  auto r = read_rdap(in, "rdap", &w);
  REQUIRE(r.size() == 3);
  CHECK(r[0] == zt::pos("a.com", "2025-02-01", "2024-12-01"));
  CHECK(r[1] == zt::neg("a.com", "2025-03-01"));
  CHECK_FALSE(r[2].usable());
  CHECK(w.items.size() == 1);

  std::ostringstream out;
  write_rdap(out, r);
  std::istringstream again(out.str());
  CHECK(read_rdap(again, "rdap", nullptr) == r);
}

TEST_CASE("RDAP schema violations") {
  auto line_of = [](const char* text) {
    return error_line([text] {
      std::istringstream in(text);
      read_rdap(in, "rdap", nullptr);
    });
  };
  CHECK(line_of(R"({"domain":"a.com","query_time":"2025-03-01","status":"negative","registration_date":"2025-01-01"})") == 1);
  CHECK(line_of(R"({"domain":"a.com","query_time":"2025-01-01","status":"positive","registration_date":"2025-03-01"})") == 1);
  CHECK(line_of("\n{\"domain\":\"a.com\",\"query_time\":\"2025-03-01\",\"status\":\"maybe\"}") == 2);
  CHECK(line_of(R"({"domain":"a.com","query_time":"2025-03-01","status":"negative","extra":1})") == 1);
  CHECK(line_of("not json") == 1);
}

TEST_CASE("ecosystem records round-trip byte-identically") {
  zt::TempDir tmp("dataio");
  const std::string cert =
      R"({"fingerprint":"aa11","fqdn":"www.example.com","not_before":"2025-01-01","not_after":"2025-03-31"})"
      "\n"
      R"({"fingerprint":"bb22","fqdn":"example.com","not_before":"2025-01-01","not_after":"2025-03-31","revocation_time":"2025-02-01"})"
      "\n";
  zt::write(tmp / "c.jsonl", cert);
  auto certs = load_certificates(tmp / "c.jsonl");
  std::ostringstream os;
  write_records(os, certs);
  CHECK(os.str() == cert);

  const std::string ens = R"({"dns_name":"example.com","block_time":"2022-01-01","wallet":"0xabc","txn":"0x01"})" "\n";
  zt::write(tmp / "e.jsonl", ens);
  std::ostringstream oe;
  write_records(oe, load_ens_claims(tmp / "e.jsonl"));
  CHECK(oe.str() == ens);

  const std::string mvn =
      R"({"namespace":"com.example","artifact":"core","version":"1.0","publish_time":"2020-01-01"})" "\n";
  zt::write(tmp / "m.jsonl", mvn);
  std::ostringstream om;
  write_records(om, load_maven_versions(tmp / "m.jsonl"));
  CHECK(om.str() == mvn);

  const std::string gas = R"({"dns_name":"example.com","txt":"ENS1 0xabc","observed":"2024-01-01"})" "\n";
  zt::write(tmp / "g.jsonl", gas);
  std::ostringstream og;
  write_records(og, load_gasless(tmp / "g.jsonl"));
  CHECK(og.str() == gas);
}

TEST_CASE("records under the wrong schema are rejected") {
  zt::TempDir tmp("dataio");
  zt::write(tmp / "mixed.jsonl",
            R"({"fingerprint":"aa","fqdn":"a.com","not_before":"2025-01-01","not_after":"2025-03-31"})"
            "\n"
            R"({"dns_name":"a.com","block_time":"2022-01-01","wallet":"0xabc","txn":"0x01"})"
            "\n");
  CHECK(error_line([&] { load_linkages(tmp / "mixed.jsonl", Ecosystem::webpki); }) == 2);
  CHECK(error_line([&] { load_linkages(tmp / "mixed.jsonl", Ecosystem::ens_onchain); }) == 1);

  zt::write(tmp / "inverted.jsonl",
            R"({"fingerprint":"aa","fqdn":"a.com","not_before":"2025-03-01","not_after":"2025-01-31"})" "\n");
  CHECK(error_line([&] { load_certificates(tmp / "inverted.jsonl"); }) == 1);
}

TEST_CASE("serving rows") {
  zt::TempDir tmp("dataio");
  zt::write(tmp / "s.csv", "fingerprint,date,served\nabc,2025-03-01,true\nabc,2025-03-02,false\n");
  auto s = load_serving(tmp / "s.csv");
  REQUIRE(s.size() == 2);
  CHECK(s[0] == ServingObservation{"abc", D("2025-03-01"), true});
  std::ostringstream os;
  write_serving(os, s);
  CHECK(os.str() == zt::slurp(tmp / "s.csv"));

  zt::write(tmp / "dup.csv", "fingerprint,date,served\nabc,2025-03-01,true\nabc,2025-03-01,false\n");
  CHECK(error_line([&] { load_serving(tmp / "dup.csv"); }) == 3);
  zt::write(tmp / "bad.csv", "fingerprint,date,served\nabc,2025-03-01,yes\n");
  CHECK(error_line([&] { load_serving(tmp / "bad.csv"); }) == 2);
}

TEST_CASE("epochs round-trip, including an empty set") {
  zt::TempDir tmp("dataio");
  EpochTimeline t;
  t.domain = "a.com";
  t.params = {30, 1};
  t.intervals = {iv("2025-01-01", "2025-02-01", true, true), iv("2025-03-01", "2025-12-31")};
  t.intervals[1].origin = IntervalOrigin::rdap_synthesized;
  apply_window(t, {D("2024-06-01"), D("2025-12-31")});
  save_epochs(tmp / "e.jsonl", {t});
  auto back = load_epochs(tmp / "e.jsonl");
  REQUIRE(back.size() == 1);
  CHECK(back[0] == t);
  CHECK(timeline_from_json_line(to_json_line(t)) == t);

  save_epochs(tmp / "none.jsonl", {});
  CHECK(load_epochs(tmp / "none.jsonl").empty());
  CHECK(zt::slurp(tmp / "none.jsonl").empty());
  DatasetManifest m;
  m.add_file(tmp.path(), "none.jsonl", 0);
  CHECK(m.files[0].records == 0);
  CHECK(m.files[0].sha256.size() == 64);
}

TEST_CASE("verdicts and linkages round-trip") {
  Linkage l;
  l.ecosystem = Ecosystem::webpki;
  l.dns_name = "a.com";
  l.fqdn = "www.a.com";
  l.linked_name = "fp";
  l.birth = D("2025-01-01");
  l.death = D("2025-02-01");
  l.death_cause = DeathCause::revoked;
  l.scheduled_end = D("2025-03-31");
  l.metadata["k"] = "v";
  CHECK(linkage_from_json_line(to_json_line(l)) == l);

  Linkage m;
  m.ecosystem = Ecosystem::maven;
  m.dns_name = "a.com";
  m.linked_name = "com.a";
  m.birth = D("2020-01-01");
  m.activity = {D("2020-01-01"), D("2021-01-01")};
  CHECK(linkage_from_json_line(to_json_line(m)) == m);

  ZombieVerdict v;
  v.linkage = l;
  v.status = Status::zombie;
  v.birth_epoch = iv("2024-12-01", "2025-01-10", true);
  v.zombie_birth = D("2025-01-11");
  v.zombie_death = D("2025-02-01");
  v.rereg = ReRegistrationInfo{D("2025-01-20"), true};
  v.active = false;
  v.as_of = D("2025-06-01");
  CHECK(verdict_from_json_line(to_json_line(v)) == v);

  zt::TempDir tmp("dataio");
  ZombieVerdict w;
  w.linkage = m;
  w.status = Status::indeterminate;
  w.as_of = D("2025-06-01");
  save_verdicts(tmp / "v.jsonl", {v, w});
  CHECK(load_verdicts(tmp / "v.jsonl") == std::vector<ZombieVerdict>{v, w});
}

TEST_CASE("manifest digests verify and detect tampering") {
  zt::TempDir tmp("dataio");
  zt::write(tmp / "a.txt", "hello\n");
  DatasetManifest m;
  m.add_file(tmp.path(), "a.txt", 1);
  m.window = DayRange{D("2025-01-01"), D("2025-12-31")};
  m.config_json = R"({"gap_threshold":80})";
  // SHA-256("hello\n")
  CHECK(m.files[0].sha256 == "5891b5b522d5df086d0ff0b110fbd9d21bb4fc7163af34d08286a2e846f6be03");
  m.save(tmp / "manifest.json");
  auto back = DatasetManifest::load(tmp / "manifest.json");
  CHECK(back.files == m.files);
  CHECK(back.window == m.window);
  CHECK_NOTHROW(back.verify(tmp.path()));
  zt::write(tmp / "a.txt", "hellO\n");
  CHECK_THROWS_AS(back.verify(tmp.path()), DataError);
}

TEST_CASE("atomic writes replace content and leave no temporaries") {
  zt::TempDir tmp("dataio");
  write_file_atomic(tmp / "f", "one");
  write_file_atomic(tmp / "f", "two");
  CHECK(zt::slurp(tmp / "f") == "two");
  std::size_t n = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(tmp.path()))
    ++n;
  CHECK(n == 1);
  CHECK(count_lines(tmp / "f") == 1);
}
