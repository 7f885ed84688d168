#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace zs {

class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A UTC calendar day, stored as days since 1970-01-01.
///
/// Everything in the toolkit works at day granularity; timestamps are
/// truncated before they get here.
class Day {
public:
  constexpr Day() = default;
  constexpr explicit Day(std::int32_t days_since_epoch) : value_(days_since_epoch) {}

  static Day from_ymd(int y, unsigned m, unsigned d);
  /// Parses `YYYY-MM-DD`. A trailing `T...` time component is truncated.
  static Day parse(std::string_view text);
  static bool try_parse(std::string_view text, Day& out) noexcept;
  static Day today_utc();

  constexpr std::int32_t value() const { return value_; }
  std::string iso() const;
  int year() const;

  constexpr auto operator<=>(const Day&) const = default;

  constexpr Day operator+(std::int32_t days) const { return Day(value_ + days); }
  constexpr Day operator-(std::int32_t days) const { return Day(value_ - days); }
  constexpr std::int32_t operator-(Day other) const { return value_ - other.value_; }
  constexpr Day& operator+=(std::int32_t days) {
    value_ += days;
    return *this;
  }
  constexpr Day& operator++() {
    ++value_;
    return *this;
  }

private:
  std::int32_t value_ = 0;
};

/// Inclusive day range.
struct DayRange {
  Day first;
  Day last;

  constexpr bool contains(Day d) const { return first <= d && d <= last; }
  constexpr std::int32_t length() const { return last - first + 1; }
  constexpr bool operator==(const DayRange&) const = default;
};

} // namespace zs

template <>
struct std::hash<zs::Day> {
  std::size_t operator()(zs::Day d) const noexcept { return std::hash<std::int32_t>{}(d.value()); }
};
