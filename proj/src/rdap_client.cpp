#include "zombiescope/rdap_client.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace zs {

using json = nlohmann::json;

RdapEndpointMap RdapEndpointMap::from_bootstrap_json(std::string_view text) {
  RdapEndpointMap m;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError("<bootstrap>", 0, std::string("invalid JSON: ") + e.what());
  }
  if (!j.contains("services") || !j["services"].is_array())
    throw DataError("<bootstrap>", 0, "missing 'services' array");
  for (const auto& svc : j["services"]) {
    if (!svc.is_array() || svc.size() < 2 || !svc[0].is_array() || !svc[1].is_array() || svc[1].empty())
      throw DataError("<bootstrap>", 0, "malformed service entry");
    // prefer an https URL when several are listed
    std::string url = svc[1][0].get<std::string>();
    for (const auto& u : svc[1])
      if (u.get<std::string>().starts_with("https://")) {
        url = u.get<std::string>();
        break;
      }
    for (const auto& tld : svc[0])
      m.add(tld.get<std::string>(), url);
  }
  return m;
}

RdapEndpointMap RdapEndpointMap::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DataError(path.string(), 0, "cannot open bootstrap file");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_bootstrap_json(ss.str());
}

void RdapEndpointMap::add(std::string tld, std::string base_url) {
  for (auto& c : tld)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (!base_url.empty() && base_url.back() != '/')
    base_url += '/';
  urls_[std::move(tld)] = std::move(base_url);
}

const std::string* RdapEndpointMap::find(std::string_view domain) const {
  std::size_t pos = 0;
  while (true) {
    auto dot = domain.find('.', pos);
    if (dot == std::string_view::npos)
      return nullptr;
    if (auto it = urls_.find(std::string(domain.substr(dot + 1))); it != urls_.end())
      return &it->second;
    pos = dot + 1;
  }
}

RdapRecord interpret_rdap_response(const std::string& domain, int http_status, const std::string& body,
                                   Day query_day) {
  RdapRecord r;
  r.domain = domain;
  r.query_time = query_day;
  if (http_status == 404) {
    r.polarity = RdapPolarity::negative;
    return r;
  }
  if (http_status != 200)
    throw DataError("rdap:" + domain, 0, "unexpected HTTP status " + std::to_string(http_status));
  r.polarity = RdapPolarity::positive;
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw DataError("rdap:" + domain, 0, std::string("invalid JSON body: ") + e.what());
  }
  if (j.contains("events") && j["events"].is_array())
    for (const auto& ev : j["events"]) {
      if (!ev.is_object() || ev.value("eventAction", "") != "registration" || !ev.contains("eventDate") ||
          !ev["eventDate"].is_string())
        continue;
      Day d;
      if (Day::try_parse(ev["eventDate"].get<std::string>(), d))
        r.registration_date = d;
    }
  return r;
}

std::filesystem::path default_cache_dir(const std::filesystem::path& fallback) {
  if (const char* env = std::getenv("ZOMBIESCOPE_CACHE_DIR"); env && *env)
    return env;
  return fallback;
}

namespace {

struct Url {
  std::string scheme_host; // scheme://host[:port]
  std::string path;        // starts with '/'
};

Url split_url(const std::string& url) {
  auto scheme = url.find("://");
  if (scheme == std::string::npos)
    throw DataError("rdap", 0, "endpoint URL without scheme: " + url);
  auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos)
    return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

struct CachedResponse {
  Day query_day;
  int status = 0;
  std::string body;
};

std::optional<CachedResponse> read_cache(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in)
    return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    auto j = json::parse(ss.str());
    Day d;
    if (!Day::try_parse(j.at("query_time").get<std::string>(), d))
      return std::nullopt;
    return CachedResponse{d, j.at("http_status").get<int>(), j.at("body").get<std::string>()};
  } catch (const json::exception&) {
    return std::nullopt; // unreadable entry: treat as a miss
  }
}

void write_cache(const std::filesystem::path& file, const std::string& domain, const CachedResponse& r) {
  nlohmann::ordered_json j;
  j["domain"] = domain;
  j["query_time"] = r.query_day.iso();
  j["http_status"] = r.status;
  j["body"] = r.body;
  write_file_atomic(file, j.dump() + "\n");
}

} // namespace

RdapFetchResult rdap_fetch(const std::vector<std::string>& domains, const RdapEndpointMap& endpoints,
                           const RdapFetchOptions& options, Warnings* warnings) {
  if (!(options.requests_per_second > 0))
    throw std::invalid_argument("requests_per_second must be positive");
  auto sleep = options.sleep ? options.sleep : [](double s) {
    std::this_thread::sleep_for(std::chrono::duration<double>(s));
  };
  const Day today = options.query_day.value_or(Day::today_utc());
  const double min_interval = 1.0 / options.requests_per_second;

  RdapFetchResult out;
  double backoff_spent = 0;
  std::map<std::string, std::chrono::steady_clock::time_point> last_request; // per endpoint host
  std::map<std::string, std::unique_ptr<httplib::Client>> clients;

  for (const auto& domain : domains) {
    const auto cache_file = options.cache_dir.empty() ? std::filesystem::path{}
                                                      : options.cache_dir / (domain + ".json");
    if (!cache_file.empty())
      if (auto hit = read_cache(cache_file)) {
        ++out.cache_hits;
        out.records.push_back(interpret_rdap_response(domain, hit->status, hit->body, hit->query_day));
        continue;
      }

    const std::string* base = endpoints.find(domain);
    if (!base) {
      warn(warnings, "no RDAP endpoint for " + domain + "; skipped");
      out.skipped.push_back(domain);
      continue;
    }
    if (!options.network_allowed) {
      warn(warnings, "network disabled and no cached response for " + domain + "; skipped");
      out.skipped.push_back(domain);
      continue;
    }

    const auto url = split_url(*base);
    auto& client = clients[url.scheme_host];
    if (!client) {
      client = std::make_unique<httplib::Client>(url.scheme_host);
      client->set_connection_timeout(std::chrono::duration<double>(options.timeout_seconds));
      client->set_read_timeout(std::chrono::duration<double>(options.timeout_seconds));
      client->set_follow_location(true);
    }

    bool done = false;
    for (int attempt = 0; attempt <= options.max_retries && !done; ++attempt) {
      if (auto it = last_request.find(url.scheme_host); it != last_request.end()) {
        const double since =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - it->second).count();
        if (since < min_interval)
          sleep(min_interval - since);
      }
      last_request[url.scheme_host] = std::chrono::steady_clock::now();
      ++out.network_calls;
      auto res = client->Get(url.path + "domain/" + domain, {{"Accept", "application/rdap+json"}});
      if (!res) {
        warn(warnings, "RDAP request for " + domain + " failed: " + httplib::to_string(res.error()));
        continue;
      }
      if (res->status == 429 || res->status == 503) {
        double wait = 1.0 * (1 << std::min(attempt, 10));
        if (res->has_header("Retry-After"))
          try {
            wait = std::stod(res->get_header_value("Retry-After"));
          } catch (const std::exception&) {
          }
        if (attempt == options.max_retries || backoff_spent + wait > options.backoff_budget_seconds)
          break;
        backoff_spent += wait;
        sleep(wait);
        continue;
      }
      if (res->status != 200 && res->status != 404) {
        warn(warnings, "RDAP for " + domain + " returned HTTP " + std::to_string(res->status) + "; skipped");
        done = true;
        out.skipped.push_back(domain);
        break;
      }
      CachedResponse r{today, res->status, res->body};
      out.records.push_back(interpret_rdap_response(domain, r.status, r.body, r.query_day));
      if (!cache_file.empty())
        write_cache(cache_file, domain, r);
      done = true;
    }
    if (!done) {
      out.partial = true;
      out.skipped.push_back(domain);
      warn(warnings, "RDAP for " + domain + " not retrieved within the retry budget");
    }
  }
  return out;
}

} // namespace zs
