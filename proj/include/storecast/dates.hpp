#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <string>

#include "storecast/errors.hpp"

namespace storecast {

// Calendar dates are days since 1970-01-01. Integer arithmetic keeps splits
// and lag bookkeeping deterministic; ISO-8601 only at the I/O boundary.
using Date = std::int32_t;

namespace detail {
inline std::chrono::year_month_day to_ymd(Date d) {
  return std::chrono::year_month_day(
      std::chrono::sys_days(std::chrono::days(d)));
}
inline Date from_ymd(std::chrono::year_month_day ymd) {
  return static_cast<Date>(
      std::chrono::sys_days(ymd).time_since_epoch().count());
}
}  // namespace detail

inline Date make_date(int year, unsigned month, unsigned day) {
  std::chrono::year_month_day ymd{std::chrono::year(year),
                                  std::chrono::month(month),
                                  std::chrono::day(day)};
  if (!ymd.ok()) {
    raise(Errc::MalformedRow, "invalid calendar date");
  }
  return detail::from_ymd(ymd);
}

/// Parse "YYYY-MM-DD", or "D/M/Y" when dmy is set.
inline Date parse_date(const std::string& text, bool dmy = false) {
  int a = 0, b = 0, c = 0;
  if (dmy) {
    if (std::sscanf(text.c_str(), "%d/%d/%d", &a, &b, &c) != 3) {
      raise(Errc::MalformedRow, "unparseable date '" + text + "'");
    }
    return make_date(c, static_cast<unsigned>(b), static_cast<unsigned>(a));
  }
  if (std::sscanf(text.c_str(), "%d-%d-%d", &a, &b, &c) != 3) {
    raise(Errc::MalformedRow, "unparseable date '" + text + "'");
  }
  return make_date(a, static_cast<unsigned>(b), static_cast<unsigned>(c));
}

inline std::string date_to_iso(Date d) {
  auto ymd = detail::to_ymd(d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

/// 0 = Monday ... 6 = Sunday.
inline int weekday(Date d) {
  std::chrono::weekday wd{std::chrono::sys_days(std::chrono::days(d))};
  return static_cast<int>(wd.iso_encoding()) - 1;
}

inline int month_of(Date d) { return static_cast<int>(unsigned(detail::to_ymd(d).month())); }
inline int monthday_of(Date d) { return static_cast<int>(unsigned(detail::to_ymd(d).day())); }
inline int year_of(Date d) { return int(detail::to_ymd(d).year()); }

/// Shift by whole calendar months; days past the target month's end snap to
/// its last day (e.g. Mar 31 - 1 month = Feb 28/29).
inline Date shift_months(Date d, int months) {
  auto ymd = detail::to_ymd(d);
  auto shifted = ymd + std::chrono::months(months);
  if (!shifted.ok()) {
    shifted = shifted.year() / shifted.month() / std::chrono::last;
  }
  return detail::from_ymd(shifted);
}

}  // namespace storecast
