#include "zombiescope/synth.hpp"

#include "zombiescope/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_map>

namespace zs {

namespace {

// Only raw mt19937_64 output is used: the std distributions are
// implementation-defined, which would make committed fixtures unportable.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}

  std::uint64_t bits() { return g_(); }
  double unit() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }
  /// Uniform on [lo, hi].
  std::int32_t between(std::int32_t lo, std::int32_t hi) {
    const auto span = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo + 1);
    const auto limit = (std::numeric_limits<std::uint64_t>::max() / span) * span;
    std::uint64_t x;
    do
      x = g_();
    while (x >= limit);
    return static_cast<std::int32_t>(lo + static_cast<std::int64_t>(x % span));
  }

private:
  std::mt19937_64 g_;
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument(std::string(name) + " must be a probability in [0, 1]");
}

constexpr const char* kTlds[] = {"com", "com", "com", "net", "org", "io", "de", "co.uk"};

std::string domain_name(std::size_t index, Rng& rng) {
  std::string label;
  label += static_cast<char>('a' + rng.between(0, 25));
  label += static_cast<char>('a' + rng.between(0, 25));
  label += std::to_string(index);
  return label + "." + kTlds[rng.between(0, static_cast<std::int32_t>(std::size(kTlds)) - 1)];
}

} // namespace

void SynthParams::validate() const {
  if (domains == 0)
    throw std::invalid_argument("world needs at least one domain");
  if (window_days < 30)
    throw std::invalid_argument("window must span at least 30 days");
  check_probability(nonrenewal_per_year, "nonrenewal_per_year");
  check_probability(tasting_fraction, "tasting_fraction");
  check_probability(dropcatch_fraction, "dropcatch_fraction");
  check_probability(rereg_fraction, "rereg_fraction");
  if (dropcatch_fraction + rereg_fraction > 1.0)
    throw std::invalid_argument("dropcatch_fraction + rereg_fraction must not exceed 1");
  if (rereg_min_gap < 1 || rereg_max_gap < rereg_min_gap)
    throw std::invalid_argument("need 1 <= rereg_min_gap <= rereg_max_gap");
  check_probability(cert_fraction, "cert_fraction");
  check_probability(cert_long_fraction, "cert_long_fraction");
  check_probability(revocation_prob, "revocation_prob");
  check_probability(rereg_revocation_prob, "rereg_revocation_prob");
  check_probability(ens_fraction, "ens_fraction");
  check_probability(maven_fraction, "maven_fraction");
  check_probability(gasless_fraction, "gasless_fraction");
  check_probability(maven_zombie_publish_rate, "maven_zombie_publish_rate");
  check_probability(maven_live_publish_rate, "maven_live_publish_rate");
  check_probability(serving_live_prob, "serving_live_prob");
  check_probability(serving_zombie_prob, "serving_zombie_prob");
  if (serving_interval_days < 1)
    throw std::invalid_argument("serving_interval_days must be at least 1");
}

void NoiseModel::validate() const {
  check_probability(zone_coverage, "zone_coverage");
  check_probability(scan_coverage, "scan_coverage");
  check_probability(rdap_coverage, "rdap_coverage");
  check_probability(rdap_date_omission, "rdap_date_omission");
  check_probability(rdap_negative_coverage, "rdap_negative_coverage");
}

const WorldDomain* GroundTruthWorld::find(const std::string& name) const {
  auto it = std::lower_bound(domains.begin(), domains.end(), name,
                             [](const WorldDomain& d, const std::string& n) { return d.name < n; });
  return it != domains.end() && it->name == name ? &*it : nullptr;
}

// ---------------------------------------------------------------------------
// generation

GroundTruthWorld generate_world(const SynthParams& params, std::uint64_t seed) {
  params.validate();
  Rng rng(seed);
  GroundTruthWorld w;
  w.params = params;
  w.seed = seed;
  const DayRange win = params.window();

  std::vector<EnsClaimEvent> claims;
  std::map<std::pair<std::string, std::string>, Day> gasless_first;

  for (std::size_t i = 0; i < params.domains; ++i) {
    WorldDomain d;
    d.name = domain_name(i, rng);

    Day t = win.first + rng.between(0, params.window_days * 3 / 5);
    while (t <= win.last) {
      std::int32_t len;
      if (rng.chance(params.tasting_fraction)) {
        len = rng.between(1, 5);
      } else {
        int years = 1;
        while (years < 50 && !rng.chance(params.nonrenewal_per_year))
          ++years;
        len = 365 * years;
      }
      d.epochs.push_back({t, t + (len - 1)});
      const Day end = d.epochs.back().end;
      if (end >= win.last)
        break;
      const double r = rng.unit();
      std::int32_t gap;
      if (r < params.dropcatch_fraction)
        gap = rng.between(1, 80);
      else if (r < params.dropcatch_fraction + params.rereg_fraction)
        gap = rng.between(params.rereg_min_gap, params.rereg_max_gap);
      else
        break;
      t = end + 1 + gap;
    }

    bool has_namespace = false;
    for (std::size_t k = 0; k < d.epochs.size(); ++k) {
      const auto& ep = d.epochs[k];
      if (ep.start > win.last)
        break;
      const Day ce = std::min(ep.end, win.last);
      const std::int32_t clen = ce - ep.start + 1;
      const bool has_next = k + 1 < d.epochs.size();
      const Day next_start = has_next ? d.epochs[k + 1].start : Day{};

      if (rng.chance(params.cert_fraction)) {
        Day nb = ep.start + rng.between(0, std::min(clen - 1, 30));
        while (nb <= ce) {
          const std::int32_t validity = rng.chance(params.cert_long_fraction) ? 398 : 90;
          CertificateRecord c;
          c.fqdn = rng.chance(0.3) ? "www." + d.name : d.name;
          c.not_before = nb;
          c.not_after = nb + (validity - 1);
          c.fingerprint = hex64(rng.bits()) + hex64(rng.bits());
          if (rng.chance(params.revocation_prob))
            c.revocation_time = nb + rng.between(0, validity - 2);
          if (has_next && next_start <= c.not_after && rng.chance(params.rereg_revocation_prob)) {
            const Day r = next_start + rng.between(0, 10);
            if (r < c.not_after && (!c.revocation_time || r < *c.revocation_time))
              c.revocation_time = r;
          }
          if (c.revocation_time && *c.revocation_time > win.last)
            c.revocation_time.reset();

          const Day death = c.revocation_time.value_or(c.not_after);
          for (Day s = nb; s <= std::min(death, win.last); s += params.serving_interval_days) {
            const bool owned = s <= ep.end;
            w.serving.push_back(
                {c.fingerprint, s, rng.chance(owned ? params.serving_live_prob : params.serving_zombie_prob)});
          }

          Linkage l;
          l.ecosystem = Ecosystem::webpki;
          l.dns_name = d.name;
          l.fqdn = c.fqdn;
          l.linked_name = c.fingerprint;
          l.birth = c.not_before;
          l.scheduled_end = c.not_after;
          l.death = death;
          l.death_cause = c.revocation_time ? DeathCause::revoked : DeathCause::expired;
          w.linkages.push_back(std::move(l));
          w.certificates.push_back(std::move(c));
          nb = nb + (validity - 30);
        }
      }

      if (rng.chance(params.ens_fraction)) {
        Day at = ep.start + rng.between(0, clen - 1);
        claims.push_back({d.name, at, "0x" + hex64(rng.bits()), "0x" + hex64(rng.bits())});
        if (at < ce && rng.chance(0.2)) {
          at = at + rng.between(1, ce - at);
          claims.push_back({d.name, at, "0x" + hex64(rng.bits()), "0x" + hex64(rng.bits())});
        }
      }

      if (!has_namespace && rng.chance(params.maven_fraction)) {
        has_namespace = true;
        const std::string ns = reverse_labels(d.name);
        Linkage l;
        l.ecosystem = Ecosystem::maven;
        l.dns_name = d.name;
        l.linked_name = ns;
        Day day = ep.start + rng.between(0, clen - 1);
        l.birth = day;
        int version = 0;
        while (day <= win.last) {
          l.activity.push_back(day);
          w.maven_versions.push_back({ns, "core", "1.0." + std::to_string(version++), day});
          do
            ++day;
          while (day <= win.last &&
                 !rng.chance(day <= ep.end ? params.maven_live_publish_rate : params.maven_zombie_publish_rate));
        }
        w.linkages.push_back(std::move(l));
      }

      if (rng.chance(params.gasless_fraction)) {
        const std::string value = "0x" + hex64(rng.bits());
        const Day first = ep.start + rng.between(0, clen - 1);
        const Day again = first + rng.between(0, ce - first);
        w.gasless.push_back({d.name, "ENS1 " + value, first});
        w.gasless.push_back({d.name, "ENS1 " + value, again});
        auto [it, inserted] = gasless_first.emplace(std::make_pair(d.name, value), first);
        if (!inserted)
          it->second = std::min(it->second, first);
      }
    }
    w.domains.push_back(std::move(d));
  }

  std::sort(claims.begin(), claims.end(), [](const auto& a, const auto& b) {
    return std::tie(a.dns_name, a.block_time, a.txn, a.wallet) < std::tie(b.dns_name, b.block_time, b.txn, b.wallet);
  });
  for (std::size_t i = 0; i < claims.size(); ++i) {
    Linkage l;
    l.ecosystem = Ecosystem::ens_onchain;
    l.dns_name = claims[i].dns_name;
    l.linked_name = claims[i].wallet;
    l.birth = claims[i].block_time;
    l.metadata["txn"] = claims[i].txn;
    if (i + 1 < claims.size() && claims[i + 1].dns_name == claims[i].dns_name) {
      l.death = claims[i + 1].block_time;
      l.death_cause = DeathCause::overwritten;
    }
    w.linkages.push_back(std::move(l));
  }
  w.ens_claims = std::move(claims);

  for (const auto& [key, day] : gasless_first) {
    Linkage l;
    l.ecosystem = Ecosystem::ens_gasless;
    l.dns_name = key.first;
    l.linked_name = key.second;
    l.birth = day;
    w.linkages.push_back(std::move(l));
  }

  std::sort(w.domains.begin(), w.domains.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  std::sort(w.certificates.begin(), w.certificates.end(),
            [](const auto& a, const auto& b) { return a.fingerprint < b.fingerprint; });
  std::sort(w.maven_versions.begin(), w.maven_versions.end(), [](const auto& a, const auto& b) {
    return std::tie(a.namespace_, a.publish_time, a.version) < std::tie(b.namespace_, b.publish_time, b.version);
  });
  std::sort(w.gasless.begin(), w.gasless.end(), [](const auto& a, const auto& b) {
    return std::tie(a.dns_name, a.observed, a.txt_value) < std::tie(b.dns_name, b.observed, b.txt_value);
  });
  std::sort(w.serving.begin(), w.serving.end(),
            [](const auto& a, const auto& b) { return std::tie(a.fingerprint, a.date) < std::tie(b.fingerprint, b.date); });
  sort_linkages(w.linkages);
  return w;
}

// ---------------------------------------------------------------------------
// observations

EmittedObservations emit_observations(const GroundTruthWorld& world, const NoiseModel& noise, std::uint64_t seed) {
  noise.validate();
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const DayRange win = world.window();
  EmittedObservations out;

  for (const auto& d : world.domains) {
    DomainObservations obs;
    obs.domain = d.name;
    Day free_from = win.first; // first day of the current unregistered stretch
    auto negative_in = [&](Day lo, Day hi) {
      if (lo > hi || !rng.chance(noise.rdap_negative_coverage))
        return;
      out.rdap.push_back({d.name, lo + rng.between(0, hi - lo), RdapPolarity::negative, std::nullopt});
    };
    for (const auto& ep : d.epochs) {
      if (ep.start > win.last)
        break;
      negative_in(free_from, ep.start - 1);
      const Day ce = std::min(ep.end, win.last);
      for (Day day = ep.start; day <= ce; ++day) {
        if (rng.chance(noise.zone_coverage))
          obs.zone.push_back(day);
        if (rng.chance(noise.scan_coverage))
          obs.scan.push_back(day);
      }
      if (rng.chance(noise.rdap_coverage)) {
        RdapRecord r{d.name, ep.start + rng.between(0, ce - ep.start), RdapPolarity::positive, ep.start};
        if (rng.chance(noise.rdap_date_omission))
          r.registration_date.reset();
        out.rdap.push_back(std::move(r));
      }
      free_from = ep.end + 1;
    }
    negative_in(free_from, win.last);
    if (!obs.zone.empty() || !obs.scan.empty())
      out.observations.emplace(d.name, std::move(obs));
  }
  std::sort(out.rdap.begin(), out.rdap.end(), [](const auto& a, const auto& b) {
    return std::tie(a.domain, a.query_time) < std::tie(b.domain, b.query_time);
  });
  return out;
}

std::string truth_json_line(const WorldDomain& d) {
  nlohmann::ordered_json j;
  j["domain"] = d.name;
  j["epochs"] = nlohmann::ordered_json::array();
  for (const auto& e : d.epochs)
    j["epochs"].push_back({{"start", e.start.iso()}, {"end", e.end.iso()}});
  return j.dump();
}

namespace {

nlohmann::ordered_json params_json(const SynthParams& p) {
  return {{"domains", p.domains},
          {"window_start", p.window_start.iso()},
          {"window_days", p.window_days},
          {"nonrenewal_per_year", p.nonrenewal_per_year},
          {"tasting_fraction", p.tasting_fraction},
          {"dropcatch_fraction", p.dropcatch_fraction},
          {"rereg_fraction", p.rereg_fraction},
          {"rereg_min_gap", p.rereg_min_gap},
          {"rereg_max_gap", p.rereg_max_gap},
          {"cert_fraction", p.cert_fraction},
          {"cert_long_fraction", p.cert_long_fraction},
          {"revocation_prob", p.revocation_prob},
          {"rereg_revocation_prob", p.rereg_revocation_prob},
          {"ens_fraction", p.ens_fraction},
          {"maven_fraction", p.maven_fraction},
          {"gasless_fraction", p.gasless_fraction},
          {"maven_zombie_publish_rate", p.maven_zombie_publish_rate},
          {"maven_live_publish_rate", p.maven_live_publish_rate},
          {"serving_live_prob", p.serving_live_prob},
          {"serving_zombie_prob", p.serving_zombie_prob},
          {"serving_interval_days", p.serving_interval_days}};
}

nlohmann::ordered_json noise_json(const NoiseModel& n) {
  return {{"zone_coverage", n.zone_coverage},
          {"scan_coverage", n.scan_coverage},
          {"rdap_coverage", n.rdap_coverage},
          {"rdap_date_omission", n.rdap_date_omission},
          {"rdap_negative_coverage", n.rdap_negative_coverage}};
}

template <typename Fn>
std::size_t write_lines(const fs::path& path, Fn&& body) {
  std::ostringstream os;
  body(os);
  const auto text = os.str();
  write_file_atomic(path, text);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

} // namespace

void write_world(const GroundTruthWorld& world, const NoiseModel& noise, const EmittedObservations& emitted,
                 const fs::path& dir) {
  namespace wf = world_files;
  fs::create_directories(dir);
  DatasetManifest m;
  auto add = [&](const char* name, std::size_t records) { m.add_file(dir, name, records); };

  add(wf::observations, write_lines(dir / wf::observations, [&](auto& os) { write_observations(os, emitted.observations); }) - 1);
  add(wf::rdap, write_lines(dir / wf::rdap, [&](auto& os) { write_rdap(os, emitted.rdap); }));
  add(wf::certificates, write_lines(dir / wf::certificates, [&](auto& os) { write_records(os, world.certificates); }));
  add(wf::ens, write_lines(dir / wf::ens, [&](auto& os) { write_records(os, world.ens_claims); }));
  add(wf::maven, write_lines(dir / wf::maven, [&](auto& os) { write_records(os, world.maven_versions); }));
  add(wf::gasless, write_lines(dir / wf::gasless, [&](auto& os) { write_records(os, world.gasless); }));
  add(wf::serving, write_lines(dir / wf::serving, [&](auto& os) { write_serving(os, world.serving); }) - 1);
  add(wf::truth, write_lines(dir / wf::truth, [&](auto& os) {
        for (const auto& d : world.domains)
          os << truth_json_line(d) << '\n';
      }));
  m.window = world.window();
  nlohmann::ordered_json cfg;
  cfg["seed"] = world.seed;
  cfg["world"] = params_json(world.params);
  cfg["noise"] = noise_json(noise);
  m.config_json = cfg.dump();
  m.save(dir / wf::manifest);
}

void load_synth_params(const fs::path& path, SynthParams& params, NoiseModel& noise) {
  const auto f = KeyValueFile::load(path);
  const std::map<std::string, double SynthParams::*> world_doubles = {
      {"nonrenewal_per_year", &SynthParams::nonrenewal_per_year},
      {"tasting_fraction", &SynthParams::tasting_fraction},
      {"dropcatch_fraction", &SynthParams::dropcatch_fraction},
      {"rereg_fraction", &SynthParams::rereg_fraction},
      {"cert_fraction", &SynthParams::cert_fraction},
      {"cert_long_fraction", &SynthParams::cert_long_fraction},
      {"revocation_prob", &SynthParams::revocation_prob},
      {"rereg_revocation_prob", &SynthParams::rereg_revocation_prob},
      {"ens_fraction", &SynthParams::ens_fraction},
      {"maven_fraction", &SynthParams::maven_fraction},
      {"gasless_fraction", &SynthParams::gasless_fraction},
      {"maven_zombie_publish_rate", &SynthParams::maven_zombie_publish_rate},
      {"maven_live_publish_rate", &SynthParams::maven_live_publish_rate},
      {"serving_live_prob", &SynthParams::serving_live_prob},
      {"serving_zombie_prob", &SynthParams::serving_zombie_prob}};
  const std::map<std::string, std::int32_t SynthParams::*> world_ints = {
      {"window_days", &SynthParams::window_days},
      {"rereg_min_gap", &SynthParams::rereg_min_gap},
      {"rereg_max_gap", &SynthParams::rereg_max_gap},
      {"serving_interval_days", &SynthParams::serving_interval_days}};
  const std::map<std::string, double NoiseModel::*> noise_doubles = {
      {"zone_coverage", &NoiseModel::zone_coverage},
      {"scan_coverage", &NoiseModel::scan_coverage},
      {"rdap_coverage", &NoiseModel::rdap_coverage},
      {"rdap_date_omission", &NoiseModel::rdap_date_omission},
      {"rdap_negative_coverage", &NoiseModel::rdap_negative_coverage}};

  auto valid_world = [&] {
    std::string s = "domains, window_start";
    for (const auto& [k, v] : world_ints)
      s += ", " + k;
    for (const auto& [k, v] : world_doubles)
      s += ", " + k;
    return s;
  };

  for (const auto& [section, entries] : f.sections) {
    for (const auto& [key, e] : entries) {
      if (section == "world" || section.empty()) {
        if (key == "domains") {
          auto v = f.get_int(e);
          if (v < 1)
            f.fail(e, "domains must be at least 1");
          params.domains = static_cast<std::size_t>(v);
        } else if (key == "window_start") {
          Day d;
          if (!Day::try_parse(e.value, d))
            f.fail(e, "window_start must be an ISO-8601 date");
          params.window_start = d;
        } else if (auto it = world_ints.find(key); it != world_ints.end()) {
          params.*(it->second) = static_cast<std::int32_t>(f.get_int(e));
        } else if (auto jt = world_doubles.find(key); jt != world_doubles.end()) {
          params.*(jt->second) = f.get_double(e);
        } else {
          f.fail(e, "unknown key '" + key + "'; valid keys: " + valid_world());
        }
      } else if (section == "noise") {
        if (auto it = noise_doubles.find(key); it != noise_doubles.end())
          noise.*(it->second) = f.get_double(e);
        else
          f.fail(e, "unknown key '" + key +
                        "'; valid keys: zone_coverage, scan_coverage, rdap_coverage, rdap_date_omission, "
                        "rdap_negative_coverage");
      } else {
        f.fail(e, "unknown section [" + section + "]; valid sections: [world], [noise]");
      }
    }
  }
  try {
    params.validate();
    noise.validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(path.string() + ": " + ex.what());
  }
}

// ---------------------------------------------------------------------------
// oracle
//
// Everything below reads true epochs directly and walks days one at a time.
// It deliberately avoids the inference and classification code paths.

namespace {

bool valid_on(const Linkage& l, Day d) { return !l.death || d <= *l.death; }

struct ClippedEpoch {
  Day start;
  Day end;
};

std::vector<ClippedEpoch> clip(const WorldDomain& d, DayRange win) {
  std::vector<ClippedEpoch> out;
  for (const auto& e : d.epochs)
    if (e.start <= win.last)
      out.push_back({e.start, std::min(e.end, win.last)});
  return out;
}

OwnershipInterval as_interval(const ClippedEpoch& e, DayRange win) {
  OwnershipInterval iv;
  iv.start = e.start;
  iv.end = e.end;
  iv.start_closed = true;
  iv.right_censored = e.end == win.last;
  return iv;
}

bool any_publish(const std::vector<Day>& days, Day from, Day to) {
  for (auto d : days)
    if (from <= d && d <= to)
      return true;
  return false;
}

} // namespace

OracleResult oracle_evaluate(const GroundTruthWorld& world, Day as_of, const OracleOptions& options) {
  const DayRange win = world.window();
  OracleResult out;
  out.as_of = as_of;

  std::unordered_map<std::string, std::vector<ClippedEpoch>> epochs;
  for (const auto& d : world.domains) {
    auto clipped = clip(d, win);
    EpochTimeline t;
    t.domain = d.name;
    t.params = options.params;
    t.window = win;
    for (const auto& e : clipped)
      t.intervals.push_back(as_interval(e, win));
    out.timelines.push_back(std::move(t));
    epochs.emplace(d.name, std::move(clipped));
  }

  for (const auto& l : world.linkages) {
    ZombieVerdict v;
    v.linkage = l;
    v.as_of = as_of;
    v.active = l.birth <= as_of && (!l.death || as_of < *l.death);
    if (l.ecosystem == Ecosystem::ens_gasless) {
      v.status = Status::exempt;
      out.verdicts.push_back(std::move(v));
      continue;
    }
    const auto& eps = epochs.at(l.dns_name);
    const ClippedEpoch* owner = nullptr;
    for (const auto& e : eps)
      if (e.start <= l.birth && l.birth <= e.end)
        owner = &e;
    if (!owner) {
      v.status = Status::indeterminate;
      out.verdicts.push_back(std::move(v));
      continue;
    }
    v.birth_epoch = as_interval(*owner, win);
    for (const auto& e : eps)
      if (e.start > owner->end && e.start <= as_of) {
        v.rereg = ReRegistrationInfo{e.start, valid_on(l, e.start)};
        break;
      }

    // first day the birth registrant no longer holds the name, while the
    // linkage is still valid and the truth is still visible in the window
    v.status = Status::live;
    for (Day d = l.birth; d <= std::min(as_of, win.last); ++d) {
      if (d <= owner->end)
        continue;
      if (valid_on(l, d)) {
        v.status = Status::zombie;
        v.zombie_birth = d;
        v.zombie_death = l.death ? std::min(*l.death, as_of) : as_of;
      }
      break;
    }
    out.verdicts.push_back(std::move(v));
  }

  for (const auto& v : out.verdicts) {
    auto& s = out.summary[v.linkage.ecosystem];
    ++s.total;
    s.active += v.active;
    s.live += v.status == Status::live;
    s.zombie += v.status == Status::zombie;
    s.zombie_unknown_start += v.status == Status::zombie && !v.zombie_birth;
    s.active_zombie += v.status == Status::zombie && v.active;
    s.indeterminate += v.status == Status::indeterminate;
    s.exempt += v.status == Status::exempt;
  }

  // daily series over [window.first, as_of], classification fixed at as_of
  {
    const DayRange range{win.first, as_of};
    std::map<Ecosystem, TimeSeries> series;
    for (const auto& v : out.verdicts) {
      auto& ts = series[v.linkage.ecosystem];
      if (ts.rows.empty()) {
        ts.ecosystem = v.linkage.ecosystem;
        for (Day d = range.first; d <= range.last; ++d)
          ts.rows.push_back({d, 0, 0, 0.0});
      }
      const auto& l = v.linkage;
      for (auto& row : ts.rows) {
        const bool alive = l.birth <= row.date && (!l.death || row.date < *l.death);
        if (!alive)
          continue;
        ++row.active;
        if (v.status == Status::zombie && *v.zombie_birth <= row.date)
          ++row.zombie;
      }
    }
    for (auto& [eco, ts] : series) {
      for (auto& row : ts.rows)
        row.fraction = row.active ? double(row.zombie) / double(row.active) : 0.0;
      out.series.push_back(std::move(ts));
    }
  }

  std::unordered_map<std::string, std::vector<const ServingObservation*>> serving;
  for (const auto& s : world.serving)
    serving[s.fingerprint].push_back(&s);

  for (const auto& v : out.verdicts) {
    const auto& l = v.linkage;
    const bool zombie = v.status == Status::zombie;

    if (zombie) {
      ++out.agp.zombies;
      const auto len = v.birth_epoch->end - v.birth_epoch->start + 1;
      ++out.agp.lifespan_histogram[len];
      out.agp.within_agp += len <= options.agp_days;
    }
    if (v.birth_epoch && v.status != Status::exempt)
      (zombie ? out.zombie_gaps : out.non_zombie_gaps).push_back(double(l.birth - v.birth_epoch->start));

    if (l.ecosystem == Ecosystem::webpki && zombie) {
      ++out.webpki_zombies;
      const bool revoked = l.death_cause == DeathCause::revoked;
      out.webpki_revoked_zombies += revoked;
      if (v.rereg && v.rereg->overlaps_linkage_validity) {
        ++out.revocation.rereg_total;
        out.revocation.rereg_revoked += revoked;
      } else {
        ++out.revocation.other_total;
        out.revocation.other_revoked += revoked;
      }
      ServedEntry e;
      e.fingerprint = l.linked_name;
      e.zombie_days = *v.zombie_death - *v.zombie_birth + 1;
      if (auto it = serving.find(l.linked_name); it != serving.end())
        for (const auto* s : it->second)
          e.days_served += s->served && *v.zombie_birth <= s->date && s->date <= *v.zombie_death;
      out.served.push_back(std::move(e));
    }

    if (l.ecosystem == Ecosystem::maven) {
      auto& b = out.maven;
      ++b.total;
      if (v.status == Status::live)
        ++b.live;
      else if (v.status == Status::indeterminate)
        ++b.indeterminate;
      else if (!v.zombie_birth)
        ++b.zombie_unknown_start;
      else {
        ++b.zombie_known_start;
        if (!any_publish(l.activity, *v.zombie_birth, as_of))
          ++b.no_changes_while_zombie;
        else {
          ++b.new_versions_while_zombie;
          if (!v.rereg)
            ++b.not_reregistered;
          else {
            ++b.reregistered;
            if (any_publish(l.activity, v.rereg->next_epoch_start, as_of))
              ++b.new_versions_after_rereg;
            else
              ++b.no_changes_after_rereg;
          }
        }
      }
    }

    auto& ev = out.evidence;
    ++ev.verdicts[l.ecosystem];
    if (zombie) {
      if (v.birth_epoch->end - v.birth_epoch->start + 1 <= options.agp_days)
        ++ev.zombies_within_agp[l.ecosystem];
      if (v.active)
        ++ev.active_zombies[l.ecosystem];
      if (l.death_cause == DeathCause::overwritten && *l.death >= *v.zombie_birth && *l.death <= as_of)
        ++ev.overwritten_while_zombie[l.ecosystem];
    }
  }
  out.agp.fraction = out.agp.zombies ? double(out.agp.within_agp) / double(out.agp.zombies) : 0.0;
  out.evidence.maven_new_versions_while_zombie = out.maven.new_versions_while_zombie;
  out.evidence.maven_new_versions_after_rereg = out.maven.new_versions_after_rereg;
  auto& r = out.revocation;
  if (r.rereg_total)
    r.rate_rereg = double(r.rereg_revoked) / double(r.rereg_total);
  if (r.other_total)
    r.rate_other = double(r.other_revoked) / double(r.other_total);
  if (r.rate_rereg && r.rate_other && *r.rate_other > 0)
    r.ratio = *r.rate_rereg / *r.rate_other;
  std::sort(out.served.begin(), out.served.end(),
            [](const auto& a, const auto& b) { return a.fingerprint < b.fingerprint; });
  std::sort(out.zombie_gaps.begin(), out.zombie_gaps.end());
  std::sort(out.non_zombie_gaps.begin(), out.non_zombie_gaps.end());
  return out;
}

} // namespace zs
