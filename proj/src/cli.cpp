#include "zombiescope/cli.hpp"

#include "zombiescope/config.hpp"
#include "zombiescope/dataio.hpp"
#include "zombiescope/pipeline.hpp"
#include "zombiescope/rdap_client.hpp"
#include "zombiescope/report.hpp"
#include "zombiescope/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace zs {

namespace {

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

constexpr std::size_t kMaxWarningsShown = 20;

void flush_warnings(std::ostream& err, const Warnings& w) {
  for (std::size_t i = 0; i < w.items.size() && i < kMaxWarningsShown; ++i)
    err << "warning: " << w.items[i] << '\n';
  if (w.items.size() > kMaxWarningsShown)
    err << "warning: " << (w.items.size() - kMaxWarningsShown) << " more warnings suppressed\n";
}

Day parse_day_arg(const std::string& s, const char* flag) {
  Day d;
  if (!Day::try_parse(s, d))
    throw UsageError(std::string(flag) + ": expected an ISO-8601 date, got '" + s + "'");
  return d;
}

fs::path out_dir_or_env(const std::string& given) {
  if (!given.empty())
    return given;
  if (const char* env = std::getenv("ZOMBIESCOPE_OUT_DIR"); env && *env)
    return env;
  throw UsageError("--out is required (or set ZOMBIESCOPE_OUT_DIR)");
}

// Effective configuration: file values, then flag overrides.
struct Layered {
  RunConfig config;
  json file = nullptr;
  json flags = json::object();
};

Layered layered_config(const std::string& path) {
  Layered l;
  if (!path.empty()) {
    l.config = load_config(path);
    l.file = {{"path", path}, {"values", json::parse(l.config.to_json())}};
  }
  return l;
}

json config_echo(const Layered& l) {
  return {{"file", l.file}, {"flags", l.flags}, {"effective", json::parse(l.config.to_json())}};
}

void write_text(const fs::path& path, const std::string& text) { write_file_atomic(path, text); }

std::size_t records_in(const std::string& text, bool has_header) {
  auto n = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
  return has_header && n > 0 ? n - 1 : n;
}

// Manifest for outputs in `dir`; inputs are recorded with their digests.
struct ManifestBuilder {
  fs::path dir;
  std::string command;
  json inputs = json::array();
  DatasetManifest m;

  void input(const fs::path& p) {
    if (p.empty())
      return;
    inputs.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
  }
  void output(const std::string& rel, const std::string& text, bool csv) {
    write_text(dir / rel, text);
    m.add_file(dir, rel, records_in(text, csv));
  }
  void save(const fs::path& path, const json& config, const std::vector<std::string>& args) {
    json c;
    c["command"] = command;
    c["args"] = args;
    c["inputs"] = inputs;
    c["config"] = config;
    m.config_json = c.dump();
    m.save(path);
  }
};

void write_or_print(const std::string& out_path, const std::string& text, std::ostream& out) {
  if (out_path.empty() || out_path == "-")
    out << text;
  else
    write_text(out_path, text);
}

std::vector<double> read_numbers(const fs::path& path) {
  std::ifstream in(path);
  if (!in)
    throw DataError(path.string(), 0, "cannot open for reading");
  std::vector<double> v;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty() || line.front() == '#')
      continue;
    try {
      std::size_t used = 0;
      v.push_back(std::stod(line, &used));
      if (used != line.size())
        throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      if (no == 1)
        continue; // header
      throw DataError(path.string(), no, "expected a number, got '" + line + "'");
    }
  }
  return v;
}

std::vector<SurvivalObservation> read_survival(const fs::path& path) {
  std::ifstream in(path);
  if (!in)
    throw DataError(path.string(), 0, "cannot open for reading");
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
  if (line != "time,event")
    throw DataError(path.string(), 1, "expected header 'time,event'");
  std::vector<SurvivalObservation> v;
  std::size_t no = 1;
  while (std::getline(in, line)) {
    ++no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw DataError(path.string(), no, "expected time,event");
    SurvivalObservation o;
    try {
      std::size_t used = 0;
      o.time = std::stod(line.substr(0, comma), &used);
      if (used != comma)
        throw std::invalid_argument("time");
    } catch (const std::exception&) {
      throw DataError(path.string(), no, "invalid time '" + line.substr(0, comma) + "'");
    }
    const auto ev = line.substr(comma + 1);
    if (ev == "1" || ev == "true")
      o.event = true;
    else if (ev == "0" || ev == "false")
      o.event = false;
    else
      throw DataError(path.string(), no, "event must be 1/0 or true/false");
    v.push_back(o);
  }
  return v;
}

std::vector<ZombieVerdict> load_verdict_files(const std::vector<std::string>& paths) {
  std::vector<ZombieVerdict> all;
  for (const auto& p : paths) {
    auto v = load_verdicts(p);
    all.insert(all.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  }
  sort_verdicts(all);
  return all;
}

Day common_as_of(const std::vector<ZombieVerdict>& verdicts) {
  if (verdicts.empty())
    throw DataError("verdicts", 0, "no verdicts");
  const Day a = verdicts.front().as_of;
  for (const auto& v : verdicts)
    if (v.as_of != a)
      throw DataError("verdicts", 0,
                      "verdicts carry different analysis dates (" + a.iso() + ", " + v.as_of.iso() + ")");
  return a;
}

MwuMethod parse_method(const std::string& s) {
  if (s == "auto")
    return MwuMethod::automatic;
  if (s == "normal")
    return MwuMethod::normal;
  if (s == "exact")
    return MwuMethod::exact;
  throw UsageError("--method must be auto, normal or exact");
}

// ---------------------------------------------------------------------------
// subcommand bodies

struct InferArgs {
  std::string obs, rdap, config, out, window_start, window_end;
  std::int32_t gap = 0, grace = -1;
  bool no_stream = false;
};

int do_infer(const InferArgs& a, const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  auto layered = layered_config(a.config);
  if (a.gap > 0) {
    layered.config.params.gap_threshold_days = a.gap;
    layered.flags["gap_threshold"] = a.gap;
  }
  if (a.grace >= 0) {
    layered.config.params.grace_window_days = a.grace;
    layered.flags["grace"] = a.grace;
  }
  std::optional<DayRange> window;
  if (!a.window_start.empty() || !a.window_end.empty()) {
    if (a.window_start.empty() || a.window_end.empty())
      throw UsageError("--window-start and --window-end must be given together");
    window = DayRange{parse_day_arg(a.window_start, "--window-start"), parse_day_arg(a.window_end, "--window-end")};
    if (window->last < window->first)
      throw UsageError("--window-end precedes --window-start");
    layered.flags["window"] = {window->first.iso(), window->last.iso()};
  }

  Warnings w;
  std::vector<RdapRecord> rdap;
  if (!a.rdap.empty())
    rdap = load_rdap(a.rdap, &w);

  std::vector<EpochTimeline> timelines;
  std::optional<DayRange> effective_window = window;
  bool streamed = false;
  if (!a.no_stream) {
    std::ifstream in(a.obs, std::ios::binary);
    if (!in)
      throw DataError(a.obs, 0, "cannot open for reading");
    try {
      Warnings sw;
      auto r = infer_stream(in, a.obs, rdap, layered.config, window, &sw);
      timelines = std::move(r.timelines);
      if (!timelines.empty())
        effective_window = r.window;
      w.items.insert(w.items.end(), sw.items.begin(), sw.items.end());
      streamed = true;
    } catch (const ObservationStream::NotGrouped& e) {
      err << "note: " << e.what() << "; loading the whole file instead\n";
    }
  }
  if (!streamed) {
    auto obs = load_observations(a.obs);
    if (!effective_window)
      effective_window = data_span(obs, rdap);
    timelines = infer_all(obs, rdap, layered.config, effective_window, &w);
  }

  save_epochs(a.out, timelines);
  ManifestBuilder mb;
  mb.command = "infer";
  mb.input(a.obs);
  mb.input(a.rdap);
  mb.input(a.config);
  const fs::path outp(a.out);
  mb.m.add_file(outp.parent_path().empty() ? "." : outp.parent_path(), outp.filename().string(), timelines.size());
  mb.m.window = effective_window;
  mb.save(a.out + ".manifest.json", config_echo(layered), argv);

  flush_warnings(err, w);
  std::size_t intervals = 0;
  for (const auto& t : timelines)
    intervals += t.intervals.size();
  out << "inferred " << timelines.size() << " timelines, " << intervals << " intervals";
  if (effective_window)
    out << ", window " << effective_window->first.iso() << ".." << effective_window->last.iso();
  out << '\n';
  return kExitOk;
}

struct ClassifyArgs {
  std::string epochs, linkages, ecosystem, as_of, out, config, psl;
};

int do_classify(const ClassifyArgs& a, const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  auto layered = layered_config(a.config);
  Ecosystem eco;
  try {
    eco = parse_ecosystem(a.ecosystem);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const Day as_of = parse_day_arg(a.as_of, "--as-of");

  std::optional<PublicSuffixRules> rules;
  if (!a.psl.empty())
    rules = PublicSuffixRules::load(a.psl);
  LinkageLoadOptions opts;
  opts.suffix_rules = rules ? &*rules : nullptr;
  opts.gasless_prefix = layered.config.gasless_prefix;

  Warnings w;
  const auto timelines = index_timelines(load_epochs(a.epochs));
  const auto linkages = load_linkages(a.linkages, eco, opts, &w);
  auto result = batch_classify(linkages, timelines, as_of);
  sort_verdicts(result.verdicts);
  save_verdicts(a.out, result.verdicts);

  ManifestBuilder mb;
  mb.command = "classify";
  mb.input(a.epochs);
  mb.input(a.linkages);
  mb.input(a.config);
  mb.input(a.psl);
  const fs::path outp(a.out);
  mb.m.add_file(outp.parent_path().empty() ? "." : outp.parent_path(), outp.filename().string(),
                result.verdicts.size());
  auto cfg = config_echo(layered);
  cfg["ecosystem"] = std::string(to_string(eco));
  cfg["as_of"] = as_of.iso();
  mb.save(a.out + ".manifest.json", cfg, argv);

  flush_warnings(err, w);
  out << summary_csv(result.summary);
  return kExitOk;
}

struct StatsArgs {
  std::string input, a, b, method = "auto", verdicts, epochs, from, to, out, summary;
  bool no_continuity = false;
  int width = 1;
};

std::vector<EpochTimeline> load_epochs_opt(const std::string& path) {
  if (path.empty())
    throw UsageError("--epochs is required for this analysis");
  return load_epochs(path);
}

int do_stats(const std::string& which, const StatsArgs& a, std::ostream& out, std::ostream& err) {
  Warnings w;
  if (which == "km") {
    write_or_print(a.out, km_csv(kaplan_meier(read_survival(a.input))), out);
  } else if (which == "mwu") {
    MwuOptions o;
    o.method = parse_method(a.method);
    o.continuity_correction = !a.no_continuity;
    const auto xa = read_numbers(a.a);
    const auto xb = read_numbers(a.b);
    if (xa.empty() || xb.empty())
      throw DataError(xa.empty() ? a.a : a.b, 0, "sample is empty");
    write_or_print(a.out, mwu_json(mann_whitney_u(xa, xb, o)), out);
  } else if (which == "fraction") {
    const auto verdicts = load_verdict_files({a.verdicts});
    const auto timelines = load_epochs_opt(a.epochs);
    const auto as_of = common_as_of(verdicts);
    Day first = as_of;
    for (const auto& t : timelines)
      first = std::min(first, t.window.first);
    const DayRange range{a.from.empty() ? first : parse_day_arg(a.from, "--from"),
                         a.to.empty() ? as_of : parse_day_arg(a.to, "--to")};
    if (range.last < range.first)
      throw UsageError("empty date range");
    const auto links = linkages_of(verdicts);
    write_or_print(a.out, series_csv(zombie_fraction_series(links, index_timelines(timelines), range)), out);
  } else if (which == "cohorts") {
    if (a.width < 1)
      throw UsageError("--width must be at least 1");
    const auto verdicts = load_verdict_files({a.verdicts});
    const auto links = linkages_of(verdicts);
    write_or_print(a.out, lifespans_csv(cohort_lifespans(links, index_timelines(load_epochs_opt(a.epochs)), {a.width})),
                   out);
  } else if (which == "durations") {
    const auto d = duration_distributions(load_verdict_files({a.verdicts}));
    write_or_print(a.out, durations_csv(d), out);
    if (!a.summary.empty())
      write_text(a.summary, durations_json(d));
  } else if (which == "gaps") {
    MwuOptions o;
    o.method = parse_method(a.method);
    o.continuity_correction = !a.no_continuity;
    const auto g = registration_to_linkage_gaps(load_verdict_files({a.verdicts}), o, &w);
    write_or_print(a.out, gaps_csv(g), out);
    if (!a.summary.empty())
      write_text(a.summary, gaps_json(g));
  }
  flush_warnings(err, w);
  return kExitOk;
}

struct IndicatorArgs {
  std::vector<std::string> verdicts;
  std::string serving, design, out;
  std::int32_t agp = -1;
};

int do_indicators(const IndicatorArgs& a, const std::vector<std::string>& argv, std::ostream& out,
                  std::ostream& err) {
  auto layered = layered_config(a.design);
  if (a.agp >= 0) {
    layered.config.agp_days = a.agp;
    layered.flags["agp_days"] = a.agp;
  }
  const fs::path dir = out_dir_or_env(a.out);
  fs::create_directories(dir);
  Warnings w;
  const auto verdicts = load_verdict_files(a.verdicts);

  ManifestBuilder mb;
  mb.dir = dir;
  mb.command = "indicators";
  for (const auto& v : a.verdicts)
    mb.input(v);
  mb.input(a.serving);
  mb.input(a.design);

  const auto evidence = collect_evidence(verdicts, layered.config.agp_days);
  const auto matrix = indicator_matrix(evidence, layered.config.design);
  mb.output("indicator_matrix.csv", matrix_csv(matrix), true);
  mb.output("maven_breakdown.csv", breakdown_csv(maven_activity_breakdown(verdicts)), true);
  mb.output("agp.json", agp_json(agp_death_stats(verdicts, layered.config.agp_days)), false);
  mb.output("revocation.json", revocation_json(revocation_comparison(verdicts)), false);
  if (!a.serving.empty()) {
    const auto serving = load_serving(a.serving);
    mb.output("served_after_death.csv", served_csv(served_after_death(serving, verdicts, &w)), true);
    mb.output("served_after_rereg.json", served_rereg_json(served_after_rereg(serving, verdicts)), false);
  }
  mb.save(dir / "manifest.json", config_echo(layered), argv);
  flush_warnings(err, w);
  out << matrix_csv(matrix);
  return kExitOk;
}

struct SynthArgs {
  std::string params, out;
  std::uint64_t seed = 0;
  long long domains = 0;
};

int do_synth(const SynthArgs& a, std::ostream& out) {
  SynthParams p;
  NoiseModel n;
  if (!a.params.empty())
    load_synth_params(a.params, p, n);
  if (a.domains > 0)
    p.domains = static_cast<std::size_t>(a.domains);
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const fs::path dir = out_dir_or_env(a.out);
  const auto world = generate_world(p, a.seed);
  const auto emitted = emit_observations(world, n, a.seed);
  write_world(world, n, emitted, dir);
  out << "world: " << world.domains.size() << " domains, " << world.linkages.size() << " linkages, window "
      << world.window().first.iso() << ".." << world.window().last.iso() << " -> " << dir.string() << '\n';
  return kExitOk;
}

struct FetchArgs {
  std::string domains, bootstrap, cache, out, query_day;
  bool allow_network = false;
  double rate = 0;
  int max_retries = -1;
  std::string config;
};

int do_fetch(const FetchArgs& a, const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  auto layered = layered_config(a.config);
  auto& rc = layered.config.rdap;
  if (a.allow_network) {
    rc.network_allowed = true;
    layered.flags["network_allowed"] = true;
  }
  if (a.rate > 0) {
    rc.requests_per_second = a.rate;
    layered.flags["requests_per_second"] = a.rate;
  }
  if (a.max_retries >= 0) {
    rc.max_retries = a.max_retries;
    layered.flags["max_retries"] = a.max_retries;
  }
  std::string bootstrap = a.bootstrap.empty() ? rc.bootstrap_path : a.bootstrap;
  if (bootstrap.empty())
    throw UsageError("--bootstrap (an IANA RDAP dns.json file) is required");

  std::vector<std::string> domains;
  {
    std::ifstream in(a.domains);
    if (!in)
      throw DataError(a.domains, 0, "cannot open for reading");
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r')
        line.pop_back();
      if (!line.empty() && line.front() != '#')
        domains.push_back(line);
    }
  }
  RdapFetchOptions o;
  o.network_allowed = rc.network_allowed;
  o.requests_per_second = rc.requests_per_second;
  o.max_retries = rc.max_retries;
  o.backoff_budget_seconds = rc.backoff_budget_seconds;
  o.cache_dir = a.cache.empty() ? default_cache_dir(".zombiescope-cache") : fs::path(a.cache);
  if (!a.query_day.empty())
    o.query_day = parse_day_arg(a.query_day, "--query-day");

  Warnings w;
  auto r = rdap_fetch(domains, RdapEndpointMap::load(bootstrap), o, &w);
  std::ostringstream os;
  write_rdap(os, r.records);
  write_text(a.out, os.str());

  ManifestBuilder mb;
  mb.command = "fetch-rdap";
  mb.input(a.domains);
  mb.input(bootstrap);
  const fs::path outp(a.out);
  mb.m.add_file(outp.parent_path().empty() ? "." : outp.parent_path(), outp.filename().string(), r.records.size());
  auto cfg = config_echo(layered);
  cfg["partial"] = r.partial;
  cfg["skipped"] = r.skipped;
  mb.save(a.out + ".manifest.json", cfg, argv);

  flush_warnings(err, w);
  out << "rdap: " << r.records.size() << " records, " << r.cache_hits << " cache hits, " << r.network_calls
      << " requests, " << r.skipped.size() << " skipped" << (r.partial ? " (partial)" : "") << '\n';
  return kExitOk;
}

struct ReportArgs {
  std::string in, out, config;
  int width = 1;
};

int do_report(const ReportArgs& a, const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  auto layered = layered_config(a.config);
  if (a.width < 1)
    throw UsageError("--cohort-width must be at least 1");
  const fs::path in(a.in);
  if (!fs::is_directory(in))
    throw DataError(a.in, 0, "input directory does not exist");

  std::vector<std::string> verdict_files;
  for (const auto& e : fs::directory_iterator(in)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && name.starts_with("verdicts") && name.ends_with(".jsonl"))
      verdict_files.push_back(e.path().string());
  }
  std::sort(verdict_files.begin(), verdict_files.end());
  if (verdict_files.empty())
    throw DataError(a.in, 0, "no verdicts*.jsonl files to report on");

  const fs::path dir = out_dir_or_env(a.out);
  fs::create_directories(dir);
  Warnings w;
  const auto verdicts = load_verdict_files(verdict_files);
  const auto as_of = common_as_of(verdicts);
  const auto links = linkages_of(verdicts);

  ManifestBuilder mb;
  mb.dir = dir;
  mb.command = "report";
  for (const auto& f : verdict_files)
    mb.input(f);
  mb.input(a.config);

  const auto epochs_path = in / "epochs.jsonl";
  if (fs::exists(epochs_path)) {
    mb.input(epochs_path);
    const auto timelines = load_epochs(epochs_path);
    Day first = as_of;
    for (const auto& t : timelines)
      first = std::min(first, t.window.first);
    const auto idx = index_timelines(timelines);
    mb.output("zombie_series.csv", series_csv(zombie_fraction_series(links, idx, {first, as_of})), true);
    mb.output("lifespans.csv", lifespans_csv(cohort_lifespans(links, idx, {a.width})), true);
  } else {
    w.add("no epochs.jsonl in input; zombie_series.csv and lifespans.csv skipped");
  }

  const auto durations = duration_distributions(verdicts);
  mb.output("zombie_durations.csv", durations_csv(durations), true);
  mb.output("zombie_durations.json", durations_json(durations), false);

  const auto serving_path = in / "serving.csv";
  if (fs::exists(serving_path)) {
    mb.input(serving_path);
    const auto serving = load_serving(serving_path);
    mb.output("served_after_death.csv", served_csv(served_after_death(serving, verdicts, &w)), true);
    mb.output("served_after_rereg.json", served_rereg_json(served_after_rereg(serving, verdicts)), false);
  } else {
    w.add("no serving.csv in input; served_after_death.csv skipped");
  }

  const auto matrix = indicator_matrix(collect_evidence(verdicts, layered.config.agp_days), layered.config.design);
  mb.output("indicator_matrix.csv", matrix_csv(matrix), true);
  mb.output("maven_breakdown.csv", breakdown_csv(maven_activity_breakdown(verdicts)), true);

  const auto gaps = registration_to_linkage_gaps(verdicts, {}, &w);
  mb.output("registration_gaps.csv", gaps_csv(gaps), true);
  mb.output("registration_gaps.json", gaps_json(gaps), false);

  std::map<Ecosystem, EcosystemSummary> summary;
  for (const auto& v : verdicts)
    summary[v.linkage.ecosystem] = {};
  for (auto& [eco, s] : summary) {
    std::vector<ZombieVerdict> sub;
    for (const auto& v : verdicts)
      if (v.linkage.ecosystem == eco)
        sub.push_back(v);
    s = summarize(sub);
  }
  mb.output("summary.csv", summary_csv(summary), true);
  mb.output("agp.json", agp_json(agp_death_stats(verdicts, layered.config.agp_days)), false);
  mb.output("revocation.json", revocation_json(revocation_comparison(verdicts)), false);

  auto cfg = config_echo(layered);
  cfg["as_of"] = as_of.iso();
  cfg["cohort_width"] = a.width;
  mb.save(dir / "manifest.json", cfg, argv);
  flush_warnings(err, w);
  out << "report: " << verdicts.size() << " verdicts as of " << as_of.iso() << " -> " << dir.string() << '\n';
  return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"zombiescope: ownership epochs and zombie linkages across DNS-integrated ecosystems",
               "zombiescope"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  InferArgs ia;
  auto* infer = app.add_subcommand("infer", "Infer registration epochs from daily observations and RDAP");
  infer->add_option("--obs", ia.obs, "Observation CSV (domain,date,source)")->required()->check(CLI::ExistingFile);
  infer->add_option("--rdap", ia.rdap, "RDAP JSON lines")->check(CLI::ExistingFile);
  infer->add_option("--gap-threshold", ia.gap, "Merge gap threshold t in days (>= 1, default 80)")
      ->check(CLI::Range(1, 1 << 20));
  infer->add_option("--grace", ia.grace, "RDAP grace window g in days (>= 0, default 2)")
      ->check(CLI::Range(0, 1 << 20));
  infer->add_option("--config", ia.config, "Run configuration file")->check(CLI::ExistingFile);
  infer->add_option("--window-start", ia.window_start, "Analysis window first day");
  infer->add_option("--window-end", ia.window_end, "Analysis window last day");
  infer->add_flag("--no-stream", ia.no_stream, "Load the whole observation file instead of streaming");
  infer->add_option("--out", ia.out, "Epochs JSON lines output")->required();

  ClassifyArgs ca;
  auto* classify = app.add_subcommand("classify", "Classify linkages as live, zombie, indeterminate or exempt");
  classify->add_option("--epochs", ca.epochs, "Epochs JSON lines")->required()->check(CLI::ExistingFile);
  classify->add_option("--linkages", ca.linkages, "Raw ecosystem records (JSON lines)")
      ->required()
      ->check(CLI::ExistingFile);
  classify->add_option("--ecosystem", ca.ecosystem, "webpki | ens_onchain | ens_gasless | maven")->required();
  classify->add_option("--as-of", ca.as_of, "Analysis date (YYYY-MM-DD)")->required();
  classify->add_option("--config", ca.config, "Run configuration file")->check(CLI::ExistingFile);
  classify->add_option("--psl", ca.psl, "Public suffix list file")->check(CLI::ExistingFile);
  classify->add_option("--out", ca.out, "Verdicts JSON lines output")->required();

  StatsArgs sa;
  std::string stats_which;
  auto* stats = app.add_subcommand("stats", "Survival and distribution statistics");
  stats->require_subcommand(1);
  auto* km = stats->add_subcommand("km", "Kaplan-Meier estimate from a time,event CSV");
  km->add_option("--input", sa.input, "CSV with header time,event")->required()->check(CLI::ExistingFile);
  km->add_option("--out", sa.out, "Output CSV (default stdout)");
  auto* mwu = stats->add_subcommand("mwu", "Two-sided Mann-Whitney U test");
  mwu->add_option("--a", sa.a, "Sample A, one number per line")->required()->check(CLI::ExistingFile);
  mwu->add_option("--b", sa.b, "Sample B, one number per line")->required()->check(CLI::ExistingFile);
  mwu->add_option("--method", sa.method, "auto | normal | exact");
  mwu->add_flag("--no-continuity", sa.no_continuity, "Disable the 0.5 continuity correction");
  mwu->add_option("--out", sa.out, "Output JSON (default stdout)");
  auto* frac = stats->add_subcommand("fraction", "Daily active and zombie counts per ecosystem");
  frac->add_option("--verdicts", sa.verdicts)->required()->check(CLI::ExistingFile);
  frac->add_option("--epochs", sa.epochs)->required()->check(CLI::ExistingFile);
  frac->add_option("--from", sa.from, "First day (default window start)");
  frac->add_option("--to", sa.to, "Last day (default the verdicts' as-of date)");
  frac->add_option("--out", sa.out);
  auto* coh = stats->add_subcommand("cohorts", "Kaplan-Meier DNS-name lifespans by creation-year cohort");
  coh->add_option("--verdicts", sa.verdicts)->required()->check(CLI::ExistingFile);
  coh->add_option("--epochs", sa.epochs)->required()->check(CLI::ExistingFile);
  coh->add_option("--width", sa.width, "Cohort width in years");
  coh->add_option("--out", sa.out);
  auto* dur = stats->add_subcommand("durations", "Web PKI zombie duration distributions");
  dur->add_option("--verdicts", sa.verdicts)->required()->check(CLI::ExistingFile);
  dur->add_option("--summary", sa.summary, "Also write a JSON summary here");
  dur->add_option("--out", sa.out);
  auto* gaps = stats->add_subcommand("gaps", "Registration-to-linkage gaps, zombie vs not");
  gaps->add_option("--verdicts", sa.verdicts)->required()->check(CLI::ExistingFile);
  gaps->add_option("--method", sa.method, "auto | normal | exact");
  gaps->add_flag("--no-continuity", sa.no_continuity);
  gaps->add_option("--summary", sa.summary, "Also write a JSON summary here");
  gaps->add_option("--out", sa.out);
  for (auto* sub : {km, mwu, frac, coh, dur, gaps})
    sub->callback([&stats_which, sub] { stats_which = sub->get_name(); });

  IndicatorArgs xa;
  auto* ind = app.add_subcommand("indicators", "Attack indicators and the design matrix");
  ind->add_option("--verdicts", xa.verdicts, "Verdict files (repeatable)")->required()->check(CLI::ExistingFile);
  ind->add_option("--serving", xa.serving, "Serving CSV (fingerprint,date,served)")->check(CLI::ExistingFile);
  ind->add_option("--design-config", xa.design, "Configuration with a [design] section")->check(CLI::ExistingFile);
  ind->add_option("--agp-days", xa.agp, "Add Grace Period in days")->check(CLI::NonNegativeNumber);
  ind->add_option("--out", xa.out, "Output directory (default $ZOMBIESCOPE_OUT_DIR)");

  SynthArgs ya;
  auto* synth = app.add_subcommand("synth", "Generate a ground-truth world and its observation files");
  synth->add_option("--params", ya.params, "World and noise parameters")->check(CLI::ExistingFile);
  synth->add_option("--seed", ya.seed, "RNG seed")->required();
  synth->add_option("--domains", ya.domains, "Override the domain count")->check(CLI::PositiveNumber);
  synth->add_option("--out", ya.out, "Output directory (default $ZOMBIESCOPE_OUT_DIR)");

  FetchArgs fa;
  auto* fetch = app.add_subcommand("fetch-rdap", "Query RDAP for a list of domains (cached)");
  fetch->add_option("--domains", fa.domains, "One domain per line")->required()->check(CLI::ExistingFile);
  fetch->add_option("--bootstrap", fa.bootstrap, "IANA RDAP bootstrap file (dns.json)")->check(CLI::ExistingFile);
  fetch->add_option("--cache", fa.cache, "Cache directory (default $ZOMBIESCOPE_CACHE_DIR)");
  fetch->add_flag("--allow-network", fa.allow_network, "Permit network requests");
  fetch->add_option("--rate", fa.rate, "Requests per second per endpoint")->check(CLI::PositiveNumber);
  fetch->add_option("--max-retries", fa.max_retries, "Retries after throttling")->check(CLI::NonNegativeNumber);
  fetch->add_option("--query-day", fa.query_day, "Day stamped on fresh responses (default today)");
  fetch->add_option("--config", fa.config, "Run configuration file")->check(CLI::ExistingFile);
  fetch->add_option("--out", fa.out, "RDAP JSON lines output")->required();

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "Write every report file from a results directory");
  report->add_option("--in", ra.in, "Directory with verdicts*.jsonl, epochs.jsonl, serving.csv")->required();
  report->add_option("--out", ra.out, "Output directory (default $ZOMBIESCOPE_OUT_DIR)");
  report->add_option("--config", ra.config, "Run configuration file")->check(CLI::ExistingFile);
  report->add_option("--cohort-width", ra.width, "Cohort width in years");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitUsage;
  }

  try {
    if (infer->parsed())
      return do_infer(ia, args, out, err);
    if (classify->parsed())
      return do_classify(ca, args, out, err);
    if (stats->parsed())
      return do_stats(stats_which, sa, out, err);
    if (ind->parsed())
      return do_indicators(xa, args, out, err);
    if (synth->parsed())
      return do_synth(ya, out);
    if (fetch->parsed())
      return do_fetch(fa, args, out, err);
    if (report->parsed())
      return do_report(ra, args, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const MissingDesignEntry& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitUsage;
}

} // namespace zs
