#include "zombiescope/config.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace zs {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) {
    if (!out.empty())
      out += ", ";
    out += s;
  }
  return out;
}

const std::vector<std::string> kTopKeys = {"gap_threshold", "grace", "agp_days", "gasless_prefix"};
const std::vector<std::string> kTldKeys = {"gap_threshold", "grace"};
const std::vector<std::string> kRdapKeys = {"network_allowed", "requests_per_second", "max_retries",
                                            "backoff_budget_seconds", "bootstrap"};

} // namespace

KeyValueFile KeyValueFile::parse(std::string_view text, std::string source) {
  KeyValueFile f;
  f.source = std::move(source);
  f.sections[""];
  std::string section;
  std::size_t no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++no;

    // strip comments outside quotes
    bool quoted = false;
    std::size_t cut = raw.size();
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '"')
        quoted = !quoted;
      else if (raw[i] == '#' && !quoted) {
        cut = i;
        break;
      }
    }
    auto line = trim(raw.substr(0, cut));
    if (line.empty())
      continue;
    auto where = f.source + ":" + std::to_string(no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ConfigError(where + "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      f.sections[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(where + "expected key = value");
    auto key = std::string(trim(line.substr(0, eq)));
    auto value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(where + "empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    auto [it, inserted] = f.sections[section].emplace(key, Entry{std::string(value), no});
    if (!inserted)
      throw ConfigError(where + "duplicate key '" + key + "'");
  }
  return f;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError(path.string() + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void KeyValueFile::fail(const Entry& e, const std::string& msg) const {
  throw ConfigError(source + ":" + std::to_string(e.line) + ": " + msg);
}

std::int64_t KeyValueFile::get_int(const Entry& e) const {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (ec != std::errc() || p != e.value.data() + e.value.size())
    fail(e, "expected an integer, got '" + e.value + "'");
  return v;
}

double KeyValueFile::get_double(const Entry& e) const {
  try {
    std::size_t used = 0;
    double v = std::stod(e.value, &used);
    if (used == e.value.size())
      return v;
  } catch (const std::exception&) {
  }
  fail(e, "expected a number, got '" + e.value + "'");
}

bool KeyValueFile::get_bool(const Entry& e) const {
  if (e.value == "true")
    return true;
  if (e.value == "false")
    return false;
  fail(e, "expected true or false, got '" + e.value + "'");
}

std::vector<std::string> valid_config_keys() { return kTopKeys; }

const EpochInferenceParams& RunConfig::params_for(std::string_view domain) const {
  // longest suffix first: walk label boundaries left to right
  std::size_t pos = 0;
  while (true) {
    auto dot = domain.find('.', pos);
    if (dot == std::string_view::npos)
      break;
    auto suffix = domain.substr(dot + 1);
    if (auto it = tld_params.find(std::string(suffix)); it != tld_params.end())
      return it->second;
    pos = dot + 1;
  }
  return params;
}

std::string RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["gap_threshold"] = params.gap_threshold_days;
  j["grace"] = params.grace_window_days;
  j["agp_days"] = agp_days;
  j["gasless_prefix"] = gasless_prefix;
  j["tld"] = nlohmann::ordered_json::object();
  for (const auto& [tld, p] : tld_params)
    j["tld"][tld] = {{"gap_threshold", p.gap_threshold_days}, {"grace", p.grace_window_days}};
  j["design"] = nlohmann::ordered_json::object();
  j["design"]["available_min_count"] = design.available_min_count;
  for (const auto& [key, fact] : design.facts)
    j["design"][std::string(to_string(key.second)) + "." + std::string(to_string(key.first))] =
        std::string(to_string(fact));
  j["rdap"] = {{"network_allowed", rdap.network_allowed},
               {"requests_per_second", rdap.requests_per_second},
               {"max_retries", rdap.max_retries},
               {"backoff_budget_seconds", rdap.backoff_budget_seconds},
               {"bootstrap", rdap.bootstrap_path}};
  return j.dump();
}

RunConfig parse_config(std::string_view text, const std::string& source) {
  const auto f = KeyValueFile::parse(text, source);
  RunConfig c;

  auto unknown = [&](const KeyValueFile::Entry& e, const std::string& key, const std::string& where,
                     const std::vector<std::string>& valid) {
    f.fail(e, "unknown key '" + key + "' in " + where + "; valid keys: " + join(valid));
  };
  auto to_days = [&](const KeyValueFile::Entry& e) {
    auto v = f.get_int(e);
    if (v < -1000000 || v > 1000000)
      f.fail(e, "value out of range");
    return static_cast<std::int32_t>(v);
  };

  for (const auto& [key, e] : f.sections.at("")) {
    if (key == "gap_threshold")
      c.params.gap_threshold_days = to_days(e);
    else if (key == "grace")
      c.params.grace_window_days = to_days(e);
    else if (key == "agp_days")
      c.agp_days = to_days(e);
    else if (key == "gasless_prefix")
      c.gasless_prefix = e.value;
    else
      unknown(e, key, "top level", kTopKeys);
  }
  try {
    c.params.validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(source + ": " + ex.what());
  }
  if (c.agp_days < 0)
    throw ConfigError(source + ": agp_days must be non-negative");
  if (c.gasless_prefix.empty())
    throw ConfigError(source + ": gasless_prefix must be non-empty");

  for (const auto& [name, entries] : f.sections) {
    if (name.empty())
      continue;
    if (name.starts_with("tld.")) {
      auto tld = name.substr(4);
      if (tld.empty() || tld.front() == '.')
        throw ConfigError(source + ": malformed section [" + name + "]");
      EpochInferenceParams p = c.params;
      for (const auto& [key, e] : entries) {
        if (key == "gap_threshold")
          p.gap_threshold_days = to_days(e);
        else if (key == "grace")
          p.grace_window_days = to_days(e);
        else
          unknown(e, key, "[" + name + "]", kTldKeys);
      }
      try {
        p.validate();
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(source + ": [" + name + "]: " + ex.what());
      }
      c.tld_params[tld] = p;
    } else if (name == "design") {
      // the reset must precede every fact, whatever the key order
      if (auto r = entries.find("replace_defaults"); r != entries.end() && f.get_bool(r->second))
        c.design.facts.clear();
      for (const auto& [key, e] : entries) {
        if (key == "available_min_count") {
          auto v = f.get_int(e);
          if (v < 1)
            f.fail(e, "available_min_count must be at least 1");
          c.design.available_min_count = static_cast<std::size_t>(v);
          continue;
        }
        if (key == "replace_defaults")
          continue;
        auto dot = key.find('.');
        if (dot == std::string::npos)
          f.fail(e, "design keys have the form <ecosystem>.<attack>, got '" + key + "'");
        try {
          auto eco = parse_ecosystem(key.substr(0, dot));
          auto attack = parse_attack(key.substr(dot + 1));
          c.design.facts[{attack, eco}] = parse_design_fact(e.value);
        } catch (const std::invalid_argument& ex) {
          f.fail(e, ex.what());
        }
      }
    } else if (name == "rdap") {
      for (const auto& [key, e] : entries) {
        if (key == "network_allowed")
          c.rdap.network_allowed = f.get_bool(e);
        else if (key == "requests_per_second") {
          c.rdap.requests_per_second = f.get_double(e);
          if (!(c.rdap.requests_per_second > 0))
            f.fail(e, "requests_per_second must be positive");
        } else if (key == "max_retries") {
          auto v = f.get_int(e);
          if (v < 0 || v > 100)
            f.fail(e, "max_retries must be in [0, 100]");
          c.rdap.max_retries = static_cast<int>(v);
        } else if (key == "backoff_budget_seconds") {
          c.rdap.backoff_budget_seconds = f.get_double(e);
          if (c.rdap.backoff_budget_seconds < 0)
            f.fail(e, "backoff_budget_seconds must be non-negative");
        } else if (key == "bootstrap")
          c.rdap.bootstrap_path = e.value;
        else
          unknown(e, key, "[rdap]", kRdapKeys);
      }
    } else {
      const auto& first = entries.empty() ? KeyValueFile::Entry{} : entries.begin()->second;
      throw ConfigError(source + (entries.empty() ? "" : ":" + std::to_string(first.line)) +
                        ": unknown section [" + name + "]; valid sections: [tld.<suffix>], [design], [rdap]");
    }
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError(path.string() + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

} // namespace zs
