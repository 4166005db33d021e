// Copyright 2026 The micode Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "micode/time.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>

#include <fmt/format.h>

#include "micode/error.hpp"

namespace micode {
namespace {

// Howard Hinnant's civil-date algorithms.
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) noexcept {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Civil {
  std::int64_t y;
  unsigned m, d;
};

constexpr Civil civil_from_days(std::int64_t z) noexcept {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {y + (m <= 2), m, d};
}

int read_fixed(std::string_view s, std::size_t pos, std::size_t len, std::string_view whole) {
  int v = 0;
  if (pos + len > s.size()) throw DataError("bad_timestamp", fmt::format("truncated timestamp '{}'", whole));
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, v);
  if (ec != std::errc{} || ptr != s.data() + pos + len)
    throw DataError("bad_timestamp", fmt::format("malformed timestamp '{}'", whole));
  return v;
}

}  // namespace

Instant parse_iso8601(std::string_view text) {
  auto expect = [&](std::size_t pos, char c) {
    if (pos >= text.size() || text[pos] != c)
      throw DataError("bad_timestamp", fmt::format("malformed timestamp '{}'", text));
  };
  const int year = read_fixed(text, 0, 4, text);
  expect(4, '-');
  const int month = read_fixed(text, 5, 2, text);
  expect(7, '-');
  const int day = read_fixed(text, 8, 2, text);
  if (text.size() <= 10 || (text[10] != 'T' && text[10] != ' '))
    throw DataError("bad_timestamp", fmt::format("malformed timestamp '{}'", text));
  const int hour = read_fixed(text, 11, 2, text);
  expect(13, ':');
  const int minute = read_fixed(text, 14, 2, text);
  expect(16, ':');
  const int second = read_fixed(text, 17, 2, text);
  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
  }
  const std::string_view zone = text.substr(pos);
  if (zone != "Z" && zone != "+00:00" && zone != "z")
    throw DataError("bad_timestamp", fmt::format("timestamp '{}' is not UTC", text));
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60)
    throw DataError("bad_timestamp", fmt::format("timestamp '{}' out of range", text));

  const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
  return Instant{days * kSecondsPerDay + hour * 3600 + minute * 60 + second};
}

std::string format_iso8601(Instant t) {
  std::int64_t days = t.seconds / kSecondsPerDay;
  std::int64_t rem = t.seconds % kSecondsPerDay;
  if (rem < 0) {
    rem += kSecondsPerDay;
    --days;
  }
  const Civil c = civil_from_days(days);
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", c.y, c.m, c.d, rem / 3600, (rem / 60) % 60,
                     rem % 60);
}

Instant now_utc() {
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    std::int64_t v = 0;
    const std::string_view s(epoch);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && ptr == s.data() + s.size()) return Instant{v};
  }
  const auto now = std::chrono::system_clock::now();
  return Instant{std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count()};
}

}  // namespace micode
