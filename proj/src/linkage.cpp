#include "zombiescope/linkage.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <tuple>

namespace zs {

std::string_view to_string(Ecosystem e) {
  switch (e) {
  case Ecosystem::webpki:
    return "webpki";
  case Ecosystem::ens_onchain:
    return "ens_onchain";
  case Ecosystem::ens_gasless:
    return "ens_gasless";
  case Ecosystem::maven:
    return "maven";
  }
  return "?";
}

Ecosystem parse_ecosystem(std::string_view s) {
  if (s == "webpki")
    return Ecosystem::webpki;
  if (s == "ens_onchain")
    return Ecosystem::ens_onchain;
  if (s == "ens_gasless")
    return Ecosystem::ens_gasless;
  if (s == "maven")
    return Ecosystem::maven;
  throw std::invalid_argument("unknown ecosystem '" + std::string(s) +
                              "' (expected webpki, ens_onchain, ens_gasless or maven)");
}

std::string_view to_string(DeathCause c) {
  switch (c) {
  case DeathCause::expired:
    return "expired";
  case DeathCause::revoked:
    return "revoked";
  case DeathCause::overwritten:
    return "overwritten";
  }
  return "?";
}

DeathCause parse_death_cause(std::string_view s) {
  if (s == "expired")
    return DeathCause::expired;
  if (s == "revoked")
    return DeathCause::revoked;
  if (s == "overwritten")
    return DeathCause::overwritten;
  throw std::invalid_argument("unknown death cause '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// public suffixes

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string_view> split_labels(std::string_view name) {
  std::vector<std::string_view> labels;
  std::size_t pos = 0;
  while (true) {
    auto dot = name.find('.', pos);
    labels.push_back(name.substr(pos, dot == std::string_view::npos ? dot : dot - pos));
    if (dot == std::string_view::npos)
      break;
    pos = dot + 1;
  }
  return labels;
}

std::string join_tail(std::span<const std::string_view> labels, std::size_t k) {
  std::string out;
  for (std::size_t i = labels.size() - k; i < labels.size(); ++i) {
    if (!out.empty())
      out += '.';
    out += labels[i];
  }
  return out;
}

constexpr std::string_view kBuiltinRules = R"(// generic
com
net
org
info
biz
io
dev
app
xyz
eth
online
site
shop
top
me
co
ai
// country code
de
fr
nl
ru
cn
jp
br
it
es
ch
se
ca
us
eu
in
au
com.au
net.au
org.au
uk
co.uk
org.uk
ac.uk
gov.uk
me.uk
jp
co.jp
ne.jp
br
com.br
cn
com.cn
in
co.in
nz
co.nz
za
co.za
// private domains commonly seen in Maven namespaces
github.io
gitlab.io
herokuapp.com
)";

} // namespace

PublicSuffixRules::PublicSuffixRules(std::span<const std::string> rules) {
  for (const auto& r : rules)
    add(r);
}

void PublicSuffixRules::add(std::string_view rule) {
  while (!rule.empty() && std::isspace(static_cast<unsigned char>(rule.back())))
    rule.remove_suffix(1);
  while (!rule.empty() && std::isspace(static_cast<unsigned char>(rule.front())))
    rule.remove_prefix(1);
  if (rule.empty() || rule.starts_with("//"))
    return;
  if (rule.starts_with('!'))
    exceptions_.insert(lower(rule.substr(1)));
  else if (rule.starts_with("*."))
    wildcards_.insert(lower(rule.substr(2)));
  else
    rules_.insert(lower(rule));
}

PublicSuffixRules PublicSuffixRules::parse(std::string_view text) {
  PublicSuffixRules out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    out.add(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    if (nl == std::string_view::npos)
      break;
    pos = nl + 1;
  }
  return out;
}

PublicSuffixRules PublicSuffixRules::load(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open suffix rules file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const PublicSuffixRules& PublicSuffixRules::builtin() {
  static const PublicSuffixRules rules = parse(kBuiltinRules);
  return rules;
}

std::size_t PublicSuffixRules::suffix_labels(std::span<const std::string_view> labels) const {
  const std::size_t n = labels.size();
  for (std::size_t k = n; k >= 1; --k)
    if (exceptions_.contains(join_tail(labels, k)))
      return k - 1;
  std::size_t best = 1;
  for (std::size_t k = 1; k <= n; ++k) {
    if (rules_.contains(join_tail(labels, k)))
      best = std::max(best, k);
    if (k >= 2 && wildcards_.contains(join_tail(labels, k - 1)))
      best = std::max(best, k);
  }
  return best;
}

std::string normalize_dns_name(std::string_view name, const PublicSuffixRules& rules) {
  std::string s = lower(name);
  if (!s.empty() && s.back() == '.')
    s.pop_back();
  if (s.empty())
    throw NotRegistrable("empty DNS name");
  auto labels = split_labels(s);
  for (auto l : labels)
    if (l.empty())
      throw NotRegistrable("DNS name '" + std::string(name) + "' has an empty label");
  const std::size_t suffix = rules.suffix_labels(labels);
  if (labels.size() <= suffix)
    throw NotRegistrable("'" + std::string(name) + "' is a public suffix, not a registrable name");
  return join_tail(labels, suffix + 1);
}

std::string reverse_labels(std::string_view dotted) {
  auto labels = split_labels(dotted);
  std::string out;
  for (auto it = labels.rbegin(); it != labels.rend(); ++it) {
    if (!out.empty())
      out += '.';
    out += *it;
  }
  return out;
}

// ---------------------------------------------------------------------------
// adapters

void sort_linkages(std::vector<Linkage>& linkages) {
  std::sort(linkages.begin(), linkages.end(), [](const Linkage& a, const Linkage& b) {
    return std::tie(a.ecosystem, a.dns_name, a.birth, a.linked_name) <
           std::tie(b.ecosystem, b.dns_name, b.birth, b.linked_name);
  });
}

std::vector<Linkage> linkages_from_certificates(std::span<const CertificateRecord> certs,
                                                const PublicSuffixRules& rules, Warnings* warnings) {
  std::vector<const CertificateRecord*> unique;
  unique.reserve(certs.size());
  for (const auto& c : certs)
    unique.push_back(&c);
  std::stable_sort(unique.begin(), unique.end(),
                   [](auto* a, auto* b) { return a->fingerprint < b->fingerprint; });
  unique.erase(std::unique(unique.begin(), unique.end(),
                           [](auto* a, auto* b) { return a->fingerprint == b->fingerprint; }),
               unique.end());

  std::vector<Linkage> out;
  out.reserve(unique.size());
  for (const auto* c : unique) {
    Linkage l;
    l.ecosystem = Ecosystem::webpki;
    try {
      l.dns_name = normalize_dns_name(c->fqdn, rules);
    } catch (const NotRegistrable& e) {
      warn(warnings, "certificate " + c->fingerprint + " skipped: " + e.what());
      continue;
    }
    l.fqdn = c->fqdn;
    l.linked_name = c->fingerprint;
    l.birth = c->not_before;
    l.scheduled_end = c->not_after;
    if (c->revocation_time && *c->revocation_time < c->not_after) {
      l.death = *c->revocation_time;
      l.death_cause = DeathCause::revoked;
    } else {
      l.death = c->not_after;
      l.death_cause = DeathCause::expired;
    }
    out.push_back(std::move(l));
  }
  sort_linkages(out);
  return out;
}

std::vector<Linkage> linkages_from_ens_claims(std::span<const EnsClaimEvent> events) {
  std::vector<const EnsClaimEvent*> sorted;
  sorted.reserve(events.size());
  for (const auto& e : events)
    sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) {
    return std::tie(a->dns_name, a->block_time, a->txn, a->wallet) <
           std::tie(b->dns_name, b->block_time, b->txn, b->wallet);
  });

  std::vector<Linkage> out;
  out.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& e = *sorted[i];
    Linkage l;
    l.ecosystem = Ecosystem::ens_onchain;
    l.dns_name = e.dns_name;
    l.linked_name = e.wallet;
    l.birth = e.block_time;
    l.metadata["txn"] = e.txn;
    if (i + 1 < sorted.size() && sorted[i + 1]->dns_name == e.dns_name) {
      l.death = sorted[i + 1]->block_time;
      l.death_cause = DeathCause::overwritten;
    }
    out.push_back(std::move(l));
  }
  sort_linkages(out);
  return out;
}

std::vector<Linkage> match_gasless_txt(std::span<const GaslessTxtRecord> records, std::string_view prefix) {
  if (prefix.empty())
    throw std::invalid_argument("gasless TXT prefix must be non-empty");

  // earliest observation per (name, value)
  std::map<std::pair<std::string, std::string>, Day> first_seen;
  for (const auto& r : records) {
    std::string_view v = r.txt_value;
    if (!v.starts_with(prefix))
      continue;
    v.remove_prefix(prefix.size());
    if (!v.empty() && !std::isspace(static_cast<unsigned char>(v.front())))
      continue;
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front())))
      v.remove_prefix(1);
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back())))
      v.remove_suffix(1);
    if (v.empty())
      continue;
    auto key = std::make_pair(lower(r.dns_name), std::string(v));
    auto [it, inserted] = first_seen.emplace(std::move(key), r.observed);
    if (!inserted)
      it->second = std::min(it->second, r.observed);
  }

  std::vector<Linkage> out;
  out.reserve(first_seen.size());
  for (const auto& [key, day] : first_seen) {
    Linkage l;
    l.ecosystem = Ecosystem::ens_gasless;
    l.dns_name = key.first;
    l.linked_name = key.second;
    l.birth = day;
    out.push_back(std::move(l));
  }
  sort_linkages(out);
  return out;
}

std::vector<Linkage> linkages_from_maven_index(std::span<const MavenVersionRecord> versions,
                                               const PublicSuffixRules& rules, Warnings* warnings) {
  std::map<std::string, std::vector<Day>> by_namespace;
  for (const auto& v : versions)
    by_namespace[v.namespace_].push_back(v.publish_time);

  std::vector<Linkage> out;
  out.reserve(by_namespace.size());
  for (auto& [ns, days] : by_namespace) {
    if (ns.find('.') == std::string::npos) {
      warn(warnings, "maven namespace '" + ns + "' has a single label; skipped");
      continue;
    }
    Linkage l;
    l.ecosystem = Ecosystem::maven;
    try {
      l.dns_name = normalize_dns_name(reverse_labels(ns), rules);
    } catch (const NotRegistrable& e) {
      warn(warnings, "maven namespace '" + ns + "' skipped: " + e.what());
      continue;
    }
    std::sort(days.begin(), days.end());
    l.linked_name = ns;
    l.birth = days.front();
    l.activity = std::move(days);
    out.push_back(std::move(l));
  }
  sort_linkages(out);
  return out;
}

} // namespace zs
