#pragma once

#include "zombiescope/day.hpp"
#include "zombiescope/diagnostics.hpp"

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace zs {

enum class Ecosystem { webpki, ens_onchain, ens_gasless, maven };

std::string_view to_string(Ecosystem e);
Ecosystem parse_ecosystem(std::string_view s);

enum class DeathCause { expired, revoked, overwritten };

std::string_view to_string(DeathCause c);
DeathCause parse_death_cause(std::string_view s);

/// Ecosystem-neutral binding from a DNS name to a linked name.
struct Linkage {
  Ecosystem ecosystem = Ecosystem::webpki;
  std::string dns_name;
  std::optional<std::string> fqdn;
  std::string linked_name;
  Day birth;
  std::optional<Day> death;
  std::optional<DeathCause> death_cause;
  /// Certificate notAfter; death may be earlier when revoked.
  std::optional<Day> scheduled_end;
  /// Maven: every publish day for the namespace, ascending.
  std::vector<Day> activity;
  std::map<std::string, std::string> metadata;

  bool operator==(const Linkage&) const = default;
};

struct CertificateRecord {
  std::string fqdn;
  Day not_before;
  Day not_after;
  std::optional<Day> revocation_time;
  std::string fingerprint;
  bool operator==(const CertificateRecord&) const = default;
};

struct EnsClaimEvent {
  std::string dns_name;
  Day block_time;
  std::string wallet;
  std::string txn;
  bool operator==(const EnsClaimEvent&) const = default;
};

struct MavenVersionRecord {
  std::string namespace_;
  std::string artifact;
  std::string version;
  Day publish_time;
  bool operator==(const MavenVersionRecord&) const = default;
};

struct GaslessTxtRecord {
  std::string dns_name;
  std::string txt_value;
  Day observed;
  bool operator==(const GaslessTxtRecord&) const = default;
};

class NotRegistrable : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Public-suffix rules in the publicsuffix.org list format: plain rules,
/// wildcards (`*.ck`) and exceptions (`!www.ck`). A name matching no rule
/// falls back to the implicit `*` rule (its TLD is the suffix).
class PublicSuffixRules {
public:
  PublicSuffixRules() = default;
  explicit PublicSuffixRules(std::span<const std::string> rules);

  static PublicSuffixRules load(const std::string& path);
  static PublicSuffixRules parse(std::string_view text);
  /// Small built-in rule set covering common gTLDs and ccTLD second levels.
  static const PublicSuffixRules& builtin();

  void add(std::string_view rule);
  /// Number of labels in the public suffix of `labels` (last label first
  /// is not required; labels are in natural order).
  std::size_t suffix_labels(std::span<const std::string_view> labels) const;
  std::size_t size() const { return rules_.size() + wildcards_.size() + exceptions_.size(); }

private:
  std::unordered_set<std::string> rules_;
  std::unordered_set<std::string> wildcards_;
  std::unordered_set<std::string> exceptions_;
};

/// Lowercased, trailing-dot-free registrable domain (eTLD+1).
/// Throws NotRegistrable for a public suffix or anything above one.
std::string normalize_dns_name(std::string_view name, const PublicSuffixRules& rules);

/// `com.example.lib` <-> `lib.example.com`.
std::string reverse_labels(std::string_view dotted);

std::vector<Linkage> linkages_from_certificates(std::span<const CertificateRecord> certs,
                                                const PublicSuffixRules& rules,
                                                Warnings* warnings = nullptr);

std::vector<Linkage> linkages_from_ens_claims(std::span<const EnsClaimEvent> events);

inline constexpr std::string_view kDefaultGaslessPrefix = "ENS1";

std::vector<Linkage> match_gasless_txt(std::span<const GaslessTxtRecord> records,
                                       std::string_view prefix = kDefaultGaslessPrefix);

std::vector<Linkage> linkages_from_maven_index(std::span<const MavenVersionRecord> versions,
                                               const PublicSuffixRules& rules,
                                               Warnings* warnings = nullptr);

/// Canonical ordering used for every linkage list the toolkit emits.
void sort_linkages(std::vector<Linkage>& linkages);

} // namespace zs
