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

#pragma once

#include <cstdint>
#include <compare>
#include <string>
#include <string_view>

namespace micode {

// UTC instant at one-second precision.
struct Instant {
  std::int64_t seconds = 0;  // since 1970-01-01T00:00:00Z

  friend constexpr auto operator<=>(Instant, Instant) = default;
};

inline constexpr std::int64_t kSecondsPerDay = 86400;

// Accepts "YYYY-MM-DDTHH:MM:SSZ", optional fractional seconds (truncated) and
// "+00:00" offsets. Throws DataError on anything else.
Instant parse_iso8601(std::string_view text);
std::string format_iso8601(Instant t);

// Wall clock, or SOURCE_DATE_EPOCH when that variable is set.
Instant now_utc();

}  // namespace micode
