#include "zombiescope/day.hpp"

#include <charconv>
#include <cstdio>

namespace zs {

namespace {

bool parse_uint(std::string_view s, unsigned& out) {
  if (s.empty())
    return false;
  for (char c : s)
    if (c < '0' || c > '9')
      return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

} // namespace

Day Day::from_ymd(int y, unsigned m, unsigned d) {
  using namespace std::chrono;
  year_month_day ymd{std::chrono::year{y}, month{m}, day{d}};
  if (!ymd.ok())
    throw ParseError("invalid calendar date " + std::to_string(y) + "-" + std::to_string(m) + "-" +
                     std::to_string(d));
  return Day(static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count()));
}

bool Day::try_parse(std::string_view text, Day& out) noexcept {
  if (auto t = text.find('T'); t != std::string_view::npos)
    text = text.substr(0, t);
  if (text.size() != 10 || text[4] != '-' || text[7] != '-')
    return false;
  unsigned y = 0, m = 0, d = 0;
  if (!parse_uint(text.substr(0, 4), y) || !parse_uint(text.substr(5, 2), m) ||
      !parse_uint(text.substr(8, 2), d))
    return false;
  using namespace std::chrono;
  year_month_day ymd{std::chrono::year{static_cast<int>(y)}, month{m}, day{d}};
  if (!ymd.ok())
    return false;
  out = Day(static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count()));
  return true;
}

Day Day::parse(std::string_view text) {
  Day out;
  if (!try_parse(text, out))
    throw ParseError("invalid ISO-8601 date '" + std::string(text) + "'");
  return out;
}

Day Day::today_utc() {
  using namespace std::chrono;
  auto now = floor<days>(system_clock::now());
  return Day(static_cast<std::int32_t>(now.time_since_epoch().count()));
}

std::string Day::iso() const {
  using namespace std::chrono;
  year_month_day ymd{sys_days{days{value_}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

int Day::year() const {
  using namespace std::chrono;
  return static_cast<int>(year_month_day{sys_days{days{value_}}}.year());
}

} // namespace zs
