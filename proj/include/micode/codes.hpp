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

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace micode {

// The 17-code MI framework. Order is the canonical enumeration order used
// for every per-code array in the library.
enum class MiCode : std::uint8_t {
  GivingInformation,
  Reflection,
  Support,
  Affirm,
  ClosedQuestion,
  OpenQuestion,
  Persuade,
  SeekingCollaboration,
  Inappropriate,
  Direct,
  EmphasizingAutonomy,
  Grounding,
  PersonalDisclosure,
  Introduction,
  Conclusion,
  ChitChat,
  Other,
};

inline constexpr std::size_t kNumCodes = 17;

enum class MiCategory : std::uint8_t { MiConsistent, MiInconsistent, Other };

inline constexpr std::array<MiCode, kNumCodes> kAllCodes = {
    MiCode::GivingInformation, MiCode::Reflection,     MiCode::Support,
    MiCode::Affirm,            MiCode::ClosedQuestion, MiCode::OpenQuestion,
    MiCode::Persuade,          MiCode::SeekingCollaboration,
    MiCode::Inappropriate,     MiCode::Direct,         MiCode::EmphasizingAutonomy,
    MiCode::Grounding,         MiCode::PersonalDisclosure,
    MiCode::Introduction,      MiCode::Conclusion,     MiCode::ChitChat,
    MiCode::Other,
};

constexpr std::size_t index_of(MiCode c) noexcept { return static_cast<std::size_t>(c); }

// Canonical identifier used in files and over the wire, e.g. "OpenQuestion".
std::string_view code_name(MiCode c) noexcept;
// Human-facing label, e.g. "Open Question".
std::string_view display_name(MiCode c) noexcept;
std::optional<MiCode> parse_code(std::string_view name) noexcept;

MiCategory category_of(MiCode c) noexcept;
std::string_view category_name(MiCategory c) noexcept;

// Small value-type set of codes backed by a bitmask.
class CodeSet {
 public:
  constexpr CodeSet() = default;
  CodeSet(std::initializer_list<MiCode> codes) {
    for (auto c : codes) insert(c);
  }

  constexpr void insert(MiCode c) noexcept { bits_ |= bit(c); }
  constexpr void erase(MiCode c) noexcept { bits_ &= ~bit(c); }
  constexpr bool contains(MiCode c) const noexcept { return (bits_ & bit(c)) != 0; }
  constexpr std::size_t size() const noexcept { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  constexpr std::uint32_t bits() const noexcept { return bits_; }
  constexpr bool is_subset_of(CodeSet other) const noexcept { return (bits_ & ~other.bits_) == 0; }

  // Codes in canonical order.
  std::vector<MiCode> to_vector() const;

  friend constexpr bool operator==(CodeSet, CodeSet) = default;

 private:
  static constexpr std::uint32_t bit(MiCode c) noexcept { return 1u << index_of(c); }
  std::uint32_t bits_ = 0;
};

// Comma-separated canonical names, e.g. "Introduction,OpenQuestion".
std::string to_string(CodeSet s);

}  // namespace micode
