#include "stlasso/errors.hpp"
#include "stlasso/io.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace stlasso {

namespace {

int digits(std::string_view text, std::size_t pos, std::size_t count) {
  if (pos + count > text.size()) throw IngestError("bad timestamp '" + std::string(text) + "'");
  int v = 0;
  const auto res = std::from_chars(text.data() + pos, text.data() + pos + count, v);
  if (res.ec != std::errc{} || res.ptr != text.data() + pos + count) {
    throw IngestError("bad timestamp '" + std::string(text) + "'");
  }
  return v;
}

void expect(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c) throw IngestError("bad timestamp '" + std::string(text) + "'");
}

}  // namespace

std::int64_t parse_timestamp(std::string_view text) {
  // YYYY-MM-DD[T ]HH[:MM[:SS]][Z]
  const int y = digits(text, 0, 4);
  expect(text, 4, '-');
  const int mo = digits(text, 5, 2);
  expect(text, 7, '-');
  const int d = digits(text, 8, 2);
  if (text.size() < 13 || (text[10] != 'T' && text[10] != ' ')) {
    throw IngestError("bad timestamp '" + std::string(text) + "'");
  }
  const int h = digits(text, 11, 2);
  std::size_t pos = 13;
  int minute = 0;
  int second = 0;
  if (pos < text.size() && text[pos] == ':') {
    minute = digits(text, pos + 1, 2);
    pos += 3;
    if (pos < text.size() && text[pos] == ':') {
      second = digits(text, pos + 1, 2);
      pos += 3;
    }
  }
  if (pos < text.size() && text[pos] == 'Z') ++pos;
  if (pos != text.size()) throw IngestError("bad timestamp '" + std::string(text) + "'");

  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || minute > 59 || second > 59) {
    throw IngestError("invalid date/time '" + std::string(text) + "'");
  }
  if (minute != 0 || second != 0) {
    throw IngestError("timestamp '" + std::string(text) + "' is not on the hourly grid");
  }
  const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 24 + h;
}

std::string format_timestamp(std::int64_t hours) {
  std::int64_t days = hours / 24;
  std::int64_t h = hours % 24;
  if (h < 0) {
    h += 24;
    --days;
  }
  const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:00:00", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(h));
  return buf;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::string_view what) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != last) {
    throw IngestError("cannot parse " + std::string(what) + " value '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace stlasso
