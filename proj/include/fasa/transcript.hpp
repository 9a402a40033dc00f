// Copyright 2026 The fasa Authors
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

// Transcript ingestion: loads plain-text or CHAT transcripts and normalizes
// them into a TokenSeq with a parallel table of original surface forms.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fasa/core.hpp"

namespace fasa {

enum class TranscriptFormat { kPlain, kChat };

std::string_view ToString(TranscriptFormat format);
TranscriptFormat TranscriptFormatFromString(std::string_view name);

struct TranscriptLine {
  std::optional<std::string> speaker;
  std::string text;

  friend bool operator==(const TranscriptLine&, const TranscriptLine&) = default;
};

struct RawTranscript {
  std::string source_path;
  TranscriptFormat format = TranscriptFormat::kPlain;
  std::vector<TranscriptLine> lines;
};

struct NormalizedTranscript {
  TokenSeq tokens;
  // Surface form of each token as it appeared in the source (case and
  // punctuation kept).
  std::vector<std::string> originals;
  // Index into RawTranscript::lines for each token; non-decreasing.
  std::vector<std::size_t> line_index;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

// Splits `text` into lines per `format`. Plain text keeps every line; CHAT
// keeps only main tiers (`*SPK:`), folding tab-continued lines into the tier
// they continue. Throws ParseError on invalid UTF-8 or when no line carries
// content.
RawTranscript ParseTranscript(std::string_view text, TranscriptFormat format,
                              std::string source_path = {});

// Reads and parses a transcript file. Throws IoError if unreadable.
RawTranscript LoadTranscript(const std::string& path, TranscriptFormat format);

// Keeps only lines spoken by `speaker`; "all" keeps everything.
RawTranscript FilterSpeakers(RawTranscript raw, std::string_view speaker);

// Removes CHAT surface annotations: bracketed codes, &-prefixed fillers and
// fragments, retrace angle brackets, @-suffixes, time bullets and the
// untranscribed-speech markers xxx/yyy/www.
std::string StripChatAnnotations(std::string_view line);

// Lowercases a whitespace-delimited word and deletes every character that is
// not an ASCII letter or digit. May return an empty string.
std::string NormalizeWord(std::string_view word);

// Normalizes free text (no CHAT stripping) into tokens.
TokenSeq NormalizeText(std::string_view text);

// Normalizes every line of a transcript. Throws ParseError if nothing is left.
NormalizedTranscript Normalize(const RawTranscript& raw);

// Normalized tokens of a record's gt_text (empty if absent).
TokenSeq GtTokens(const AlignmentRecord& record);

bool IsValidUtf8(std::string_view text);

}  // namespace fasa
