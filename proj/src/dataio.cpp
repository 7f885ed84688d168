#include "zombiescope/dataio.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace zs {

using json = nlohmann::ordered_json;

DataError::DataError(const std::string& source, std::size_t line, const std::string& msg)
    : std::runtime_error(line ? source + ":" + std::to_string(line) + ": " + msg : source + ": " + msg),
      line_(line) {}

namespace {

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DataError(path.string(), 0, "cannot open for reading");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw DataError(path.string(), 0, "cannot open for writing");
  return out;
}

void strip_cr(std::string& s) {
  if (!s.empty() && s.back() == '\r')
    s.pop_back();
}

std::string canonical_name(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c >= 'A' && c <= 'Z')
      c = static_cast<char>(c - 'A' + 'a');
  if (!out.empty() && out.back() == '.')
    out.pop_back();
  return out;
}

// Splits exactly `n` comma-separated fields; false on a different count.
bool split_fields(std::string_view line, std::string_view* fields, std::size_t n) {
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto comma = line.find(',', pos);
    if (i + 1 == n) {
      if (comma != std::string_view::npos)
        return false;
      fields[i] = line.substr(pos);
    } else {
      if (comma == std::string_view::npos)
        return false;
      fields[i] = line.substr(pos, comma - pos);
      pos = comma + 1;
    }
  }
  return true;
}

// --- strict JSON-lines helpers

struct Ctx {
  const std::string& source;
  std::size_t line;
  [[noreturn]] void fail(const std::string& msg) const { throw DataError(source, line, msg); }
};

json parse_line(const std::string& text, const Ctx& ctx) {
  try {
    auto j = json::parse(text);
    if (!j.is_object())
      ctx.fail("expected a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    ctx.fail(std::string("invalid JSON: ") + e.what());
  }
}

void check_keys(const json& j, std::initializer_list<std::string_view> required,
                std::initializer_list<std::string_view> optional, const Ctx& ctx) {
  for (auto k : required)
    if (!j.contains(std::string(k)))
      ctx.fail("missing field '" + std::string(k) + "'");
  for (const auto& [k, v] : j.items()) {
    const bool known = std::find(required.begin(), required.end(), k) != required.end() ||
                       std::find(optional.begin(), optional.end(), k) != optional.end();
    if (!known)
      ctx.fail("unexpected field '" + k + "' for this schema");
  }
}

std::string get_str(const json& j, const char* key, const Ctx& ctx) {
  const auto& v = j.at(key);
  if (!v.is_string())
    ctx.fail(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

Day get_day(const json& j, const char* key, const Ctx& ctx) {
  const auto s = get_str(j, key, ctx);
  Day d;
  if (!Day::try_parse(s, d))
    ctx.fail(std::string("field '") + key + "' is not an ISO-8601 date: " + s);
  return d;
}

std::optional<Day> get_opt_day(const json& j, const char* key, const Ctx& ctx) {
  if (!j.contains(key) || j.at(key).is_null())
    return std::nullopt;
  return get_day(j, key, ctx);
}

bool get_bool(const json& j, const char* key, const Ctx& ctx) {
  const auto& v = j.at(key);
  if (!v.is_boolean())
    ctx.fail(std::string("field '") + key + "' must be a boolean");
  return v.get<bool>();
}

std::int64_t get_int(const json& j, const char* key, const Ctx& ctx) {
  const auto& v = j.at(key);
  if (!v.is_number_integer())
    ctx.fail(std::string("field '") + key + "' must be an integer");
  return v.get<std::int64_t>();
}

template <typename Fn>
auto read_json_lines(const fs::path& path, Fn&& per_line) {
  auto in = open_in(path);
  const std::string source = path.string();
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    strip_cr(line);
    if (line.empty())
      continue;
    per_line(line, Ctx{source, no});
  }
}

} // namespace

// ---------------------------------------------------------------------------
// observations

ObservationStream::ObservationStream(std::istream& in, std::string source_name)
    : in_(in), source_(std::move(source_name)) {
  if (!std::getline(in_, line_))
    throw DataError(source_, 1, "empty file; expected header '" + std::string(kObservationHeader) + "'");
  line_no_ = 1;
  strip_cr(line_);
  if (line_ != kObservationHeader)
    throw DataError(source_, 1, "bad header '" + line_ + "'; expected '" + std::string(kObservationHeader) + "'");
}

bool ObservationStream::read_row(std::string& domain, Day& day, Source& src) {
  while (std::getline(in_, line_)) {
    ++line_no_;
    strip_cr(line_);
    if (line_.empty())
      continue;
    std::string_view f[3];
    if (!split_fields(line_, f, 3))
      throw DataError(source_, line_no_, "expected 3 fields: " + line_);
    if (f[0].empty())
      throw DataError(source_, line_no_, "empty domain");
    if (!Day::try_parse(f[1], day))
      throw DataError(source_, line_no_, "invalid date '" + std::string(f[1]) + "'");
    if (f[2] == "zone")
      src = Source::zone;
    else if (f[2] == "scan")
      src = Source::scan;
    else
      throw DataError(source_, line_no_, "unknown source '" + std::string(f[2]) + "' (expected zone or scan)");
    // grouped input repeats the same name row after row
    if (f[0] != last_raw_) {
      last_raw_.assign(f[0]);
      last_canonical_ = canonical_name(f[0]);
    }
    domain = last_canonical_;
    ++rows_;
    if (!span_)
      span_ = DayRange{day, day};
    span_->first = std::min(span_->first, day);
    span_->last = std::max(span_->last, day);
    return true;
  }
  return false;
}

bool ObservationStream::next(DomainObservations& out) {
  if (!pending_) {
    if (!read_row(pending_domain_, pending_day_, pending_src_))
      return false;
    pending_ = true;
  }
  out.domain = pending_domain_;
  out.zone.clear();
  out.scan.clear();
  if (finished_.contains(out.domain))
    throw NotGrouped(source_, line_no_, "domain " + out.domain + " reappears; rows are not grouped by domain");

  std::string domain;
  Day day;
  Source src = Source::zone;
  (pending_src_ == Source::zone ? out.zone : out.scan).push_back(pending_day_);
  pending_ = false;
  while (read_row(domain, day, src)) {
    if (domain != out.domain) {
      pending_domain_ = std::move(domain);
      pending_day_ = day;
      pending_src_ = src;
      pending_ = true;
      break;
    }
    (src == Source::zone ? out.zone : out.scan).push_back(day);
  }
  for (auto* v : {&out.zone, &out.scan}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  finished_.insert(out.domain);
  return true;
}

ObservationSet read_observations(std::istream& in, const std::string& source_name) {
  // rows need not be grouped; they are merged per domain
  std::string line;
  if (!std::getline(in, line))
    throw DataError(source_name, 1, "empty file; expected header '" + std::string(kObservationHeader) + "'");
  strip_cr(line);
  if (line != kObservationHeader)
    throw DataError(source_name, 1, "bad header '" + line + "'; expected '" + std::string(kObservationHeader) + "'");
  ObservationSet out;
  std::string domain;
  Day day;
  Source src = Source::zone;
  std::size_t no = 1;
  while (std::getline(in, line)) {
    ++no;
    strip_cr(line);
    if (line.empty())
      continue;
    std::string_view f[3];
    if (!split_fields(line, f, 3))
      throw DataError(source_name, no, "expected 3 fields: " + line);
    if (f[0].empty())
      throw DataError(source_name, no, "empty domain");
    if (!Day::try_parse(f[1], day))
      throw DataError(source_name, no, "invalid date '" + std::string(f[1]) + "'");
    if (f[2] == "zone")
      src = Source::zone;
    else if (f[2] == "scan")
      src = Source::scan;
    else
      throw DataError(source_name, no, "unknown source '" + std::string(f[2]) + "' (expected zone or scan)");
    domain = canonical_name(f[0]);
    auto& d = out[domain];
    d.domain = domain;
    (src == Source::zone ? d.zone : d.scan).push_back(day);
  }
  for (auto& [name, d] : out)
    for (auto* v : {&d.zone, &d.scan}) {
      std::sort(v->begin(), v->end());
      v->erase(std::unique(v->begin(), v->end()), v->end());
    }
  return out;
}

ObservationSet load_observations(const fs::path& path) {
  auto in = open_in(path);
  return read_observations(in, path.string());
}

void write_observations(std::ostream& out, const ObservationSet& obs) {
  out << kObservationHeader << '\n';
  for (const auto& [name, d] : obs) {
    std::size_t i = 0, j = 0;
    while (i < d.zone.size() || j < d.scan.size()) {
      if (j == d.scan.size() || (i < d.zone.size() && d.zone[i] <= d.scan[j]))
        out << name << ',' << d.zone[i++].iso() << ",zone\n";
      else
        out << name << ',' << d.scan[j++].iso() << ",scan\n";
    }
  }
}

// ---------------------------------------------------------------------------
// RDAP

std::vector<RdapRecord> read_rdap(std::istream& in, const std::string& source_name, Warnings* warnings) {
  std::vector<RdapRecord> out;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    strip_cr(line);
    if (line.empty())
      continue;
    Ctx ctx{source_name, no};
    auto j = parse_line(line, ctx);
    check_keys(j, {"domain", "query_time", "status"}, {"registration_date"}, ctx);
    RdapRecord r;
    r.domain = canonical_name(get_str(j, "domain", ctx));
    r.query_time = get_day(j, "query_time", ctx);
    const auto status = get_str(j, "status", ctx);
    if (status == "positive")
      r.polarity = RdapPolarity::positive;
    else if (status == "negative")
      r.polarity = RdapPolarity::negative;
    else
      ctx.fail("status must be positive or negative, got '" + status + "'");
    r.registration_date = get_opt_day(j, "registration_date", ctx);
    if (r.polarity == RdapPolarity::negative && r.registration_date)
      ctx.fail("negative RDAP record carries a registration date");
    if (r.registration_date && *r.registration_date > r.query_time)
      ctx.fail("registration_date is after query_time");
    if (!r.usable())
      warn(warnings, source_name + ":" + std::to_string(no) + ": positive RDAP record for " + r.domain +
                         " has no registration date; unusable for refinement");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RdapRecord> load_rdap(const fs::path& path, Warnings* warnings) {
  auto in = open_in(path);
  return read_rdap(in, path.string(), warnings);
}

std::string rdap_to_json(const RdapRecord& r) {
  json j;
  j["domain"] = r.domain;
  j["query_time"] = r.query_time.iso();
  j["status"] = r.polarity == RdapPolarity::positive ? "positive" : "negative";
  if (r.registration_date)
    j["registration_date"] = r.registration_date->iso();
  return j.dump();
}

void write_rdap(std::ostream& out, const std::vector<RdapRecord>& records) {
  for (const auto& r : records)
    out << rdap_to_json(r) << '\n';
}

// ---------------------------------------------------------------------------
// ecosystem records

std::vector<CertificateRecord> load_certificates(const fs::path& path) {
  std::vector<CertificateRecord> out;
  read_json_lines(path, [&](const std::string& line, const Ctx& ctx) {
    auto j = parse_line(line, ctx);
    check_keys(j, {"fingerprint", "fqdn", "not_before", "not_after"}, {"revocation_time"}, ctx);
    CertificateRecord r;
    r.fingerprint = get_str(j, "fingerprint", ctx);
    r.fqdn = get_str(j, "fqdn", ctx);
    r.not_before = get_day(j, "not_before", ctx);
    r.not_after = get_day(j, "not_after", ctx);
    r.revocation_time = get_opt_day(j, "revocation_time", ctx);
    if (r.not_after < r.not_before)
      ctx.fail("not_after precedes not_before");
    if (r.revocation_time && (*r.revocation_time < r.not_before || *r.revocation_time > r.not_after))
      ctx.fail("revocation_time outside the validity period");
    out.push_back(std::move(r));
  });
  return out;
}

std::string to_json_line(const CertificateRecord& r) {
  json j;
  j["fingerprint"] = r.fingerprint;
  j["fqdn"] = r.fqdn;
  j["not_before"] = r.not_before.iso();
  j["not_after"] = r.not_after.iso();
  if (r.revocation_time)
    j["revocation_time"] = r.revocation_time->iso();
  return j.dump();
}

std::vector<EnsClaimEvent> load_ens_claims(const fs::path& path) {
  std::vector<EnsClaimEvent> out;
  read_json_lines(path, [&](const std::string& line, const Ctx& ctx) {
    auto j = parse_line(line, ctx);
    check_keys(j, {"dns_name", "block_time", "wallet", "txn"}, {}, ctx);
    EnsClaimEvent e;
    e.dns_name = canonical_name(get_str(j, "dns_name", ctx));
    e.block_time = get_day(j, "block_time", ctx);
    e.wallet = get_str(j, "wallet", ctx);
    e.txn = get_str(j, "txn", ctx);
    out.push_back(std::move(e));
  });
  return out;
}

std::string to_json_line(const EnsClaimEvent& r) {
  json j;
  j["dns_name"] = r.dns_name;
  j["block_time"] = r.block_time.iso();
  j["wallet"] = r.wallet;
  j["txn"] = r.txn;
  return j.dump();
}

std::vector<MavenVersionRecord> load_maven_versions(const fs::path& path) {
  std::vector<MavenVersionRecord> out;
  read_json_lines(path, [&](const std::string& line, const Ctx& ctx) {
    auto j = parse_line(line, ctx);
    check_keys(j, {"namespace", "artifact", "version", "publish_time"}, {}, ctx);
    MavenVersionRecord r;
    r.namespace_ = get_str(j, "namespace", ctx);
    r.artifact = get_str(j, "artifact", ctx);
    r.version = get_str(j, "version", ctx);
    r.publish_time = get_day(j, "publish_time", ctx);
    out.push_back(std::move(r));
  });
  return out;
}

std::string to_json_line(const MavenVersionRecord& r) {
  json j;
  j["namespace"] = r.namespace_;
  j["artifact"] = r.artifact;
  j["version"] = r.version;
  j["publish_time"] = r.publish_time.iso();
  return j.dump();
}

std::vector<GaslessTxtRecord> load_gasless(const fs::path& path) {
  std::vector<GaslessTxtRecord> out;
  read_json_lines(path, [&](const std::string& line, const Ctx& ctx) {
    auto j = parse_line(line, ctx);
    check_keys(j, {"dns_name", "txt", "observed"}, {}, ctx);
    GaslessTxtRecord r;
    r.dns_name = canonical_name(get_str(j, "dns_name", ctx));
    r.txt_value = get_str(j, "txt", ctx);
    r.observed = get_day(j, "observed", ctx);
    out.push_back(std::move(r));
  });
  return out;
}

std::string to_json_line(const GaslessTxtRecord& r) {
  json j;
  j["dns_name"] = r.dns_name;
  j["txt"] = r.txt_value;
  j["observed"] = r.observed.iso();
  return j.dump();
}

std::vector<Linkage> load_linkages(const fs::path& path, Ecosystem ecosystem, const LinkageLoadOptions& options,
                                   Warnings* warnings) {
  const auto& rules = options.suffix_rules ? *options.suffix_rules : PublicSuffixRules::builtin();
  switch (ecosystem) {
  case Ecosystem::webpki: {
    auto certs = load_certificates(path);
    return linkages_from_certificates(certs, rules, warnings);
  }
  case Ecosystem::ens_onchain: {
    auto events = load_ens_claims(path);
    return linkages_from_ens_claims(events);
  }
  case Ecosystem::ens_gasless: {
    auto records = load_gasless(path);
    return match_gasless_txt(records, options.gasless_prefix);
  }
  case Ecosystem::maven: {
    auto versions = load_maven_versions(path);
    return linkages_from_maven_index(versions, rules, warnings);
  }
  }
  return {};
}

// ---------------------------------------------------------------------------
// serving

std::vector<ServingObservation> load_serving(const fs::path& path) {
  auto in = open_in(path);
  const std::string source = path.string();
  std::string line;
  if (!std::getline(in, line))
    throw DataError(source, 1, "empty file; expected header '" + std::string(kServingHeader) + "'");
  strip_cr(line);
  if (line != kServingHeader)
    throw DataError(source, 1, "bad header '" + line + "'; expected '" + std::string(kServingHeader) + "'");

  std::vector<ServingObservation> out;
  std::map<std::pair<std::string, Day>, std::size_t> seen;
  std::size_t no = 1;
  while (std::getline(in, line)) {
    ++no;
    strip_cr(line);
    if (line.empty())
      continue;
    std::string_view f[3];
    if (!split_fields(line, f, 3))
      throw DataError(source, no, "expected 3 fields: " + line);
    ServingObservation o;
    o.fingerprint = std::string(f[0]);
    if (o.fingerprint.empty())
      throw DataError(source, no, "empty fingerprint");
    if (!Day::try_parse(f[1], o.date))
      throw DataError(source, no, "invalid date '" + std::string(f[1]) + "'");
    if (f[2] == "true")
      o.served = true;
    else if (f[2] != "false")
      throw DataError(source, no, "served must be true or false");
    auto [it, inserted] = seen.emplace(std::make_pair(o.fingerprint, o.date), out.size());
    if (!inserted)
      throw DataError(source, no, "duplicate observation for " + o.fingerprint + " on " + o.date.iso());
    out.push_back(std::move(o));
  }
  return out;
}

void write_serving(std::ostream& out, const std::vector<ServingObservation>& rows) {
  out << kServingHeader << '\n';
  for (const auto& r : rows)
    out << r.fingerprint << ',' << r.date.iso() << ',' << (r.served ? "true" : "false") << '\n';
}

// ---------------------------------------------------------------------------
// epochs

namespace {

json interval_json(const OwnershipInterval& iv) {
  json j;
  j["start"] = iv.start.iso();
  j["end"] = iv.end.iso();
  j["start_closed"] = iv.start_closed;
  j["right_censored"] = iv.right_censored;
  j["merge_next"] = iv.merge_next;
  j["origin"] = iv.origin == IntervalOrigin::observed ? "observed" : "rdap_synthesized";
  return j;
}

OwnershipInterval interval_from(const json& j, const Ctx& ctx) {
  if (!j.is_object())
    ctx.fail("interval must be an object");
  check_keys(j, {"start", "end", "start_closed", "right_censored"}, {"merge_next", "origin"}, ctx);
  OwnershipInterval iv;
  iv.start = get_day(j, "start", ctx);
  iv.end = get_day(j, "end", ctx);
  iv.start_closed = get_bool(j, "start_closed", ctx);
  iv.right_censored = get_bool(j, "right_censored", ctx);
  if (j.contains("merge_next"))
    iv.merge_next = get_bool(j, "merge_next", ctx);
  if (j.contains("origin")) {
    const auto o = get_str(j, "origin", ctx);
    if (o == "observed")
      iv.origin = IntervalOrigin::observed;
    else if (o == "rdap_synthesized")
      iv.origin = IntervalOrigin::rdap_synthesized;
    else
      ctx.fail("unknown interval origin '" + o + "'");
  }
  if (iv.end < iv.start)
    ctx.fail("interval end precedes start");
  return iv;
}

json timeline_json(const EpochTimeline& t) {
  json j;
  j["domain"] = t.domain;
  j["window"] = {{"first", t.window.first.iso()}, {"last", t.window.last.iso()}};
  j["params"] = {{"gap_threshold", t.params.gap_threshold_days}, {"grace", t.params.grace_window_days}};
  j["intervals"] = json::array();
  for (const auto& iv : t.intervals)
    j["intervals"].push_back(interval_json(iv));
  return j;
}

EpochTimeline timeline_from(const json& j, const Ctx& ctx) {
  check_keys(j, {"domain", "intervals", "params", "window"}, {}, ctx);
  EpochTimeline t;
  t.domain = get_str(j, "domain", ctx);
  const auto& w = j.at("window");
  if (!w.is_object())
    ctx.fail("window must be an object");
  check_keys(w, {"first", "last"}, {}, ctx);
  t.window = {get_day(w, "first", ctx), get_day(w, "last", ctx)};
  const auto& p = j.at("params");
  if (!p.is_object())
    ctx.fail("params must be an object");
  check_keys(p, {"gap_threshold", "grace"}, {}, ctx);
  t.params.gap_threshold_days = static_cast<std::int32_t>(get_int(p, "gap_threshold", ctx));
  t.params.grace_window_days = static_cast<std::int32_t>(get_int(p, "grace", ctx));
  if (!j.at("intervals").is_array())
    ctx.fail("intervals must be an array");
  for (const auto& iv : j.at("intervals"))
    t.intervals.push_back(interval_from(iv, ctx));
  if (auto problem = check_timeline(t); !problem.empty())
    ctx.fail("invalid timeline for " + t.domain + ": " + problem);
  return t;
}

} // namespace

std::string to_json_line(const EpochTimeline& t) { return timeline_json(t).dump(); }

EpochTimeline timeline_from_json_line(const std::string& line) {
  const std::string src = "<epochs>";
  Ctx ctx{src, 0};
  return timeline_from(parse_line(line, ctx), ctx);
}

void save_epochs(const fs::path& path, const std::vector<EpochTimeline>& timelines) {
  std::string content;
  for (const auto& t : timelines) {
    content += to_json_line(t);
    content += '\n';
  }
  write_file_atomic(path, content);
}

std::vector<EpochTimeline> load_epochs(const fs::path& path) {
  std::vector<EpochTimeline> out;
  read_json_lines(path, [&](const std::string& line, const Ctx& ctx) {
    out.push_back(timeline_from(parse_line(line, ctx), ctx));
  });
  return out;
}

TimelineMap index_timelines(std::vector<EpochTimeline> timelines) {
  TimelineMap m;
  m.reserve(timelines.size());
  for (auto& t : timelines) {
    auto name = t.domain;
    m.emplace(std::move(name), std::move(t));
  }
  return m;
}

// ---------------------------------------------------------------------------
// linkages and verdicts

namespace {

json linkage_json(const Linkage& l) {
  json j;
  j["ecosystem"] = std::string(to_string(l.ecosystem));
  j["dns_name"] = l.dns_name;
  if (l.fqdn)
    j["fqdn"] = *l.fqdn;
  j["linked_name"] = l.linked_name;
  j["birth"] = l.birth.iso();
  if (l.death)
    j["death"] = l.death->iso();
  if (l.death_cause)
    j["death_cause"] = std::string(to_string(*l.death_cause));
  if (l.scheduled_end)
    j["scheduled_end"] = l.scheduled_end->iso();
  if (!l.activity.empty()) {
    j["activity"] = json::array();
    for (auto d : l.activity)
      j["activity"].push_back(d.iso());
  }
  if (!l.metadata.empty()) {
    j["metadata"] = json::object();
    for (const auto& [k, v] : l.metadata)
      j["metadata"][k] = v;
  }
  return j;
}

Linkage linkage_from(const json& j, const Ctx& ctx) {
  if (!j.is_object())
    ctx.fail("linkage must be an object");
  check_keys(j, {"ecosystem", "dns_name", "linked_name", "birth"},
             {"fqdn", "death", "death_cause", "scheduled_end", "activity", "metadata"}, ctx);
  Linkage l;
  try {
    l.ecosystem = parse_ecosystem(get_str(j, "ecosystem", ctx));
    if (j.contains("death_cause"))
      l.death_cause = parse_death_cause(get_str(j, "death_cause", ctx));
  } catch (const std::invalid_argument& e) {
    ctx.fail(e.what());
  }
  l.dns_name = get_str(j, "dns_name", ctx);
  if (j.contains("fqdn"))
    l.fqdn = get_str(j, "fqdn", ctx);
  l.linked_name = get_str(j, "linked_name", ctx);
  l.birth = get_day(j, "birth", ctx);
  l.death = get_opt_day(j, "death", ctx);
  l.scheduled_end = get_opt_day(j, "scheduled_end", ctx);
  if (j.contains("activity")) {
    if (!j.at("activity").is_array())
      ctx.fail("activity must be an array");
    for (const auto& d : j.at("activity")) {
      Day day;
      if (!d.is_string() || !Day::try_parse(d.get<std::string>(), day))
        ctx.fail("activity entries must be ISO-8601 dates");
      l.activity.push_back(day);
    }
  }
  if (j.contains("metadata")) {
    if (!j.at("metadata").is_object())
      ctx.fail("metadata must be an object");
    for (const auto& [k, v] : j.at("metadata").items()) {
      if (!v.is_string())
        ctx.fail("metadata values must be strings");
      l.metadata[k] = v.get<std::string>();
    }
  }
  if (l.death && *l.death < l.birth)
    ctx.fail("linkage death precedes birth");
  if (l.death.has_value() != l.death_cause.has_value())
    ctx.fail("death and death_cause must be given together");
  return l;
}

} // namespace

std::string to_json_line(const Linkage& l) { return linkage_json(l).dump(); }

Linkage linkage_from_json_line(const std::string& line) {
  const std::string src = "<linkage>";
  Ctx ctx{src, 0};
  return linkage_from(parse_line(line, ctx), ctx);
}

std::string to_json_line(const ZombieVerdict& v) {
  json j;
  j["linkage"] = linkage_json(v.linkage);
  j["status"] = std::string(to_string(v.status));
  j["as_of"] = v.as_of.iso();
  j["active"] = v.active;
  if (v.birth_epoch)
    j["birth_epoch"] = interval_json(*v.birth_epoch);
  if (v.zombie_birth)
    j["zombie_birth"] = v.zombie_birth->iso();
  if (v.zombie_death)
    j["zombie_death"] = v.zombie_death->iso();
  if (v.rereg)
    j["rereg"] = {{"next_epoch_start", v.rereg->next_epoch_start.iso()},
                  {"overlaps_linkage_validity", v.rereg->overlaps_linkage_validity}};
  return j.dump();
}

namespace {

ZombieVerdict verdict_from(const json& j, const Ctx& ctx) {
  check_keys(j, {"linkage", "status", "as_of", "active"}, {"birth_epoch", "zombie_birth", "zombie_death", "rereg"},
             ctx);
  ZombieVerdict v;
  v.linkage = linkage_from(j.at("linkage"), ctx);
  try {
    v.status = parse_status(get_str(j, "status", ctx));
  } catch (const std::invalid_argument& e) {
    ctx.fail(e.what());
  }
  v.as_of = get_day(j, "as_of", ctx);
  v.active = get_bool(j, "active", ctx);
  if (j.contains("birth_epoch"))
    v.birth_epoch = interval_from(j.at("birth_epoch"), ctx);
  v.zombie_birth = get_opt_day(j, "zombie_birth", ctx);
  v.zombie_death = get_opt_day(j, "zombie_death", ctx);
  if (j.contains("rereg")) {
    const auto& r = j.at("rereg");
    if (!r.is_object())
      ctx.fail("rereg must be an object");
    check_keys(r, {"next_epoch_start", "overlaps_linkage_validity"}, {}, ctx);
    v.rereg = ReRegistrationInfo{get_day(r, "next_epoch_start", ctx), get_bool(r, "overlaps_linkage_validity", ctx)};
  }
  if (v.zombie_birth && v.status != Status::zombie)
    ctx.fail("zombie_birth on a non-zombie verdict");
  return v;
}

} // namespace

ZombieVerdict verdict_from_json_line(const std::string& line) {
  const std::string src = "<verdict>";
  Ctx ctx{src, 0};
  return verdict_from(parse_line(line, ctx), ctx);
}

void save_verdicts(const fs::path& path, const std::vector<ZombieVerdict>& verdicts) {
  std::string content;
  for (const auto& v : verdicts) {
    content += to_json_line(v);
    content += '\n';
  }
  write_file_atomic(path, content);
}

std::vector<ZombieVerdict> load_verdicts(const fs::path& path) {
  std::vector<ZombieVerdict> out;
  read_json_lines(path, [&](const std::string& line, const Ctx& ctx) {
    out.push_back(verdict_from(parse_line(line, ctx), ctx));
  });
  return out;
}

// ---------------------------------------------------------------------------
// manifest and files

std::string sha256_file(const fs::path& path) {
  auto in = open_in(path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256 init failed");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0)
      EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

std::size_t count_lines(const fs::path& path) {
  auto in = open_in(path);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line))
    ++n;
  return n;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    auto out = open_out(tmp);
    out << content;
    out.flush();
    if (!out)
      throw DataError(tmp.string(), 0, "write failed");
  }
  fs::rename(tmp, path);
}

void DatasetManifest::add_file(const fs::path& dir, const std::string& relative, std::size_t records) {
  files.push_back({relative, records, sha256_file(dir / relative)});
}

void DatasetManifest::save(const fs::path& path) const {
  json j;
  j["files"] = json::array();
  for (const auto& f : files)
    j["files"].push_back({{"path", f.path}, {"records", f.records}, {"sha256", f.sha256}});
  if (window)
    j["window"] = {{"first", window->first.iso()}, {"last", window->last.iso()}};
  j["config"] = json::parse(config_json);
  write_file_atomic(path, j.dump(2) + "\n");
}

DatasetManifest DatasetManifest::load(const fs::path& path) {
  auto in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string src = path.string();
  Ctx ctx{src, 0};
  auto j = parse_line(ss.str(), ctx);
  DatasetManifest m;
  check_keys(j, {"files", "config"}, {"window"}, ctx);
  for (const auto& f : j.at("files")) {
    check_keys(f, {"path", "records", "sha256"}, {}, ctx);
    m.files.push_back({get_str(f, "path", ctx), static_cast<std::size_t>(get_int(f, "records", ctx)),
                       get_str(f, "sha256", ctx)});
  }
  if (j.contains("window"))
    m.window = DayRange{get_day(j.at("window"), "first", ctx), get_day(j.at("window"), "last", ctx)};
  m.config_json = j.at("config").dump();
  return m;
}

void DatasetManifest::verify(const fs::path& dir) const {
  for (const auto& f : files) {
    const auto actual = sha256_file(dir / f.path);
    if (actual != f.sha256)
      throw DataError((dir / f.path).string(), 0, "digest mismatch: manifest " + f.sha256 + ", file " + actual);
  }
}

} // namespace zs
