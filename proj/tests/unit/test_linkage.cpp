#include "helpers.hpp"

#include "zombiescope/linkage.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace zs;
using zt::D;

TEST_CASE("registrable-name normalization") {
  const auto& rules = PublicSuffixRules::builtin();
  CHECK(normalize_dns_name("A.Example.COM.", rules) == "example.com");
  CHECK(normalize_dns_name("example.co.uk", rules) == "example.co.uk");
  CHECK(normalize_dns_name("www.shop.example.co.uk", rules) == "example.co.uk");
  CHECK_THROWS_AS(normalize_dns_name("co.uk", rules), NotRegistrable);
  CHECK_THROWS_AS(normalize_dns_name("com", rules), NotRegistrable);
  CHECK_THROWS_AS(normalize_dns_name("", rules), NotRegistrable);
  CHECK_THROWS_AS(normalize_dns_name("a..com", rules), NotRegistrable);
  // unknown TLDs fall back to the implicit single-label rule
  CHECK(normalize_dns_name("x.y.zzz", rules) == "y.zzz");
}

TEST_CASE("suffix rules: wildcard and exception") {
  auto rules = PublicSuffixRules::parse("// comment\nck\n*.ck\n!www.ck\n");
  CHECK(normalize_dns_name("a.b.ck", rules) == "a.b.ck");
  CHECK_THROWS_AS(normalize_dns_name("b.ck", rules), NotRegistrable);
  CHECK(normalize_dns_name("www.ck", rules) == "www.ck");
  CHECK(normalize_dns_name("x.www.ck", rules) == "www.ck");
}

TEST_CASE("certificates: death is the earlier of expiry and revocation") {
  std::vector<CertificateRecord> certs{
      {"www.example.com", D("2025-10-01"), D("2025-12-30"), std::nullopt, "aa"},
      {"example.com", D("2025-10-01"), D("2025-12-30"), D("2025-10-20"), "bb"},
  };
  auto ls = linkages_from_certificates(certs, PublicSuffixRules::builtin());
  REQUIRE(ls.size() == 2);
  const auto& expired = ls[0].linked_name == "aa" ? ls[0] : ls[1];
  const auto& revoked = ls[0].linked_name == "aa" ? ls[1] : ls[0];
  CHECK(expired.dns_name == "example.com");
  CHECK(expired.fqdn == "www.example.com");
  CHECK(expired.birth == D("2025-10-01"));
  CHECK(expired.death == D("2025-12-30"));
  CHECK(expired.death_cause == DeathCause::expired);
  CHECK(revoked.death == D("2025-10-20"));
  CHECK(revoked.death_cause == DeathCause::revoked);
  CHECK(revoked.scheduled_end == D("2025-12-30"));
  // 2025-10-01 + 90 days of validity, inclusive
  CHECK(*expired.death - expired.birth + 1 == 91);
}

TEST_CASE("certificates: duplicate fingerprints collapse, bad names are skipped") {
  std::vector<CertificateRecord> certs{
      {"example.com", D("2025-01-01"), D("2025-03-31"), std::nullopt, "aa"},
      {"example.com", D("2025-01-01"), D("2025-03-31"), std::nullopt, "aa"},
      {"co.uk", D("2025-01-01"), D("2025-03-31"), std::nullopt, "cc"},
  };
  Warnings w;
  auto ls = linkages_from_certificates(certs, PublicSuffixRules::builtin(), &w);
  CHECK(ls.size() == 1);
  CHECK(w.items.size() == 1);
}

TEST_CASE("ENS claims: each claim dies at the next one for the same name") {
  std::vector<EnsClaimEvent> ev{
      {"example.com", D("2022-05-01"), "0xbb", "t2"},
      {"example.com", D("2021-01-01"), "0xaa", "t1"},
      {"other.org", D("2021-06-01"), "0xcc", "t3"},
  };
  auto ls = linkages_from_ens_claims(ev);
  REQUIRE(ls.size() == 3);
  CHECK(ls[0].dns_name == "example.com");
  CHECK(ls[0].linked_name == "0xaa");
  CHECK(ls[0].death == D("2022-05-01"));
  CHECK(ls[0].death_cause == DeathCause::overwritten);
  CHECK_FALSE(ls[1].death.has_value());
  CHECK_FALSE(ls[2].death.has_value());

  std::vector<EnsClaimEvent> one{{"x.com", D("2021-01-01"), "0x1", "t"}};
  CHECK_FALSE(linkages_from_ens_claims(one)[0].death.has_value());
}

TEST_CASE("ENS claims: output count equals events, deathless count equals names") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<EnsClaimEvent> ev;
    std::set<std::string> names;
    const int n = int(rng() % 60) + 1;
    for (int i = 0; i < n; ++i) {
      std::string name = "n" + std::to_string(rng() % 15) + ".eth.com";
      names.insert(name);
      ev.push_back({name, D("2020-01-01") + int(rng() % 1000), "0x" + std::to_string(i), "t" + std::to_string(i)});
    }
    auto ls = linkages_from_ens_claims(ev);
    CHECK(ls.size() == ev.size());
    std::size_t deathless = 0;
    for (const auto& l : ls) {
      deathless += !l.death;
      if (l.death)
        CHECK(*l.death >= l.birth);
    }
    CHECK(deathless == names.size());
  }
}

TEST_CASE("gasless TXT matching") {
  std::vector<GaslessTxtRecord> recs{
      {"Example.com", "ENS1 0xResolverAddr 0xabc", D("2024-01-05")},
      {"example.com", "ENS1 0xResolverAddr 0xabc", D("2024-01-02")},
      {"spf.com", "v=spf1 include:_spf.example.com ~all", D("2024-01-01")},
      {"tight.com", "ENS10xdead", D("2024-01-01")},
  };
  auto ls = match_gasless_txt(recs);
  REQUIRE(ls.size() == 1);
  CHECK(ls[0].ecosystem == Ecosystem::ens_gasless);
  CHECK(ls[0].dns_name == "example.com");
  CHECK(ls[0].linked_name == "0xResolverAddr 0xabc");
  CHECK(ls[0].birth == D("2024-01-02"));
  CHECK_FALSE(ls[0].death.has_value());

  CHECK(match_gasless_txt({}).empty());
  CHECK(match_gasless_txt(recs, "v=spf1").size() == 1);
  CHECK_THROWS_AS(match_gasless_txt(recs, ""), std::invalid_argument);
}

TEST_CASE("maven: one deathless linkage per namespace born at the first publish") {
  std::vector<MavenVersionRecord> v{
      {"com.example", "core", "2.0", D("2021-02-02")},
      {"com.example", "core", "1.0", D("2019-05-01")},
      {"com.example.tools", "cli", "1.0", D("2020-01-01")},
      {"singleton", "x", "1.0", D("2020-01-01")},
  };
  Warnings w;
  auto ls = linkages_from_maven_index(v, PublicSuffixRules::builtin(), &w);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0].dns_name == "example.com");
  CHECK(ls[1].dns_name == "example.com");
  const auto& core = ls[0].linked_name == "com.example" ? ls[0] : ls[1];
  CHECK(core.birth == D("2019-05-01"));
  CHECK(core.activity == std::vector<Day>{D("2019-05-01"), D("2021-02-02")});
  CHECK_FALSE(core.death.has_value());
  CHECK_FALSE(core.death_cause.has_value());
  CHECK(w.items.size() == 1);
}

TEST_CASE("label reversal is an involution") {
  for (const char* ns : {"com.example", "org.apache.commons", "io.github.user", "uk.co.shop"})
    CHECK(reverse_labels(reverse_labels(ns)) == ns);
  CHECK(reverse_labels("com.example.lib") == "lib.example.com");
}

TEST_CASE("ecosystem and cause names round-trip") {
  for (auto e : {Ecosystem::webpki, Ecosystem::ens_onchain, Ecosystem::ens_gasless, Ecosystem::maven})
    CHECK(parse_ecosystem(to_string(e)) == e);
  for (auto c : {DeathCause::expired, DeathCause::revoked, DeathCause::overwritten})
    CHECK(parse_death_cause(to_string(c)) == c);
  CHECK_THROWS(parse_ecosystem("dns"));
}
