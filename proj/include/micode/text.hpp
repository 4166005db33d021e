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

#include <string>
#include <string_view>
#include <vector>

namespace micode {

// Marker placed between utterances of a context window. It is reserved:
// ingestion rewrites any occurrence in transcript text to kMarkerEscape.
inline constexpr std::string_view kContextMarker = "⟂";
inline constexpr std::string_view kContextSeparator = " ⟂ ";
inline constexpr std::string_view kMarkerEscape = "⊥";

// NFC normalization, outer-whitespace trim and marker escaping.
std::string normalize_transcript_text(std::string_view text);

std::string nfc(std::string_view text);
std::string trim(std::string_view text);
std::string to_lower(std::string_view text);

// Splits lowercased text into word tokens (runs of letters, digits and
// apostrophes). The context marker becomes its own token.
std::vector<std::string> word_tokens(std::string_view lowered);

// Code points of a UTF-8 string as individual UTF-8 strings.
std::vector<std::string> utf8_chars(std::string_view text);

}  // namespace micode
