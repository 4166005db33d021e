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

#include "micode/codes.hpp"

namespace micode {
namespace {

struct CodeInfo {
  std::string_view name;
  std::string_view display;
  MiCategory category;
};

constexpr std::array<CodeInfo, kNumCodes> kInfo = {{
    {"GivingInformation", "Giving Information", MiCategory::Other},
    {"Reflection", "Reflection", MiCategory::MiConsistent},
    {"Support", "Support", MiCategory::Other},
    {"Affirm", "Affirm", MiCategory::MiConsistent},
    {"ClosedQuestion", "Closed Question", MiCategory::MiConsistent},
    {"OpenQuestion", "Open Question", MiCategory::MiConsistent},
    {"Persuade", "Persuade", MiCategory::MiConsistent},
    {"SeekingCollaboration", "Seeking Collaboration", MiCategory::MiConsistent},
    {"Inappropriate", "Inappropriate", MiCategory::MiInconsistent},
    {"Direct", "Direct", MiCategory::MiInconsistent},
    {"EmphasizingAutonomy", "Emphasizing Autonomy", MiCategory::MiConsistent},
    {"Grounding", "Grounding", MiCategory::Other},
    {"PersonalDisclosure", "Personal Disclosure", MiCategory::Other},
    {"Introduction", "Introduction", MiCategory::Other},
    {"Conclusion", "Conclusion", MiCategory::Other},
    {"ChitChat", "Chit-Chat", MiCategory::Other},
    {"Other", "Other", MiCategory::Other},
}};

}  // namespace

std::string_view code_name(MiCode c) noexcept { return kInfo[index_of(c)].name; }

std::string_view display_name(MiCode c) noexcept { return kInfo[index_of(c)].display; }

std::optional<MiCode> parse_code(std::string_view name) noexcept {
  for (auto c : kAllCodes)
    if (kInfo[index_of(c)].name == name) return c;
  return std::nullopt;
}

MiCategory category_of(MiCode c) noexcept { return kInfo[index_of(c)].category; }

std::string_view category_name(MiCategory c) noexcept {
  switch (c) {
    case MiCategory::MiConsistent: return "MI-Consistent";
    case MiCategory::MiInconsistent: return "MI-Inconsistent";
    case MiCategory::Other: return "Other";
  }
  return "Other";
}

std::vector<MiCode> CodeSet::to_vector() const {
  std::vector<MiCode> out;
  for (auto c : kAllCodes)
    if (contains(c)) out.push_back(c);
  return out;
}

std::string to_string(CodeSet s) {
  std::string out;
  for (auto c : s.to_vector()) {
    if (!out.empty()) out += ',';
    out += code_name(c);
  }
  return out;
}

}  // namespace micode
