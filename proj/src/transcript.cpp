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

#include "fasa/transcript.hpp"

#include <fstream>
#include <sstream>

namespace fasa {
namespace {

bool IsSpace(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

std::vector<std::string_view> SplitWords(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !IsSpace(text[j])) ++j;
    if (j > i) words.push_back(text.substr(i, j - i));
    i = j;
  }
  return words;
}

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = nl + 1;
  }
  return lines;
}

bool HasContent(std::string_view s) {
  for (char c : s) {
    if (!IsSpace(c)) return true;
  }
  return false;
}

}  // namespace

std::string_view ToString(TranscriptFormat format) {
  return format == TranscriptFormat::kPlain ? "plain" : "chat";
}

TranscriptFormat TranscriptFormatFromString(std::string_view name) {
  if (name == "plain") return TranscriptFormat::kPlain;
  if (name == "chat") return TranscriptFormat::kChat;
  throw ConfigError("unknown transcript format '" + std::string(name) + "'");
}

bool IsValidUtf8(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    auto c = static_cast<unsigned char>(text[i]);
    std::size_t extra;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= text.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates, out of range.
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
      return false;
    }
    i += extra + 1;
  }
  return true;
}

RawTranscript ParseTranscript(std::string_view text, TranscriptFormat format, std::string source_path) {
  if (!IsValidUtf8(text)) throw ParseError(source_path + ": not valid UTF-8");
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  RawTranscript raw;
  raw.source_path = std::move(source_path);
  raw.format = format;

  if (format == TranscriptFormat::kPlain) {
    for (auto line : SplitLines(text)) raw.lines.push_back({std::nullopt, std::string(line)});
    bool any = false;
    for (const auto& l : raw.lines) any = any || HasContent(l.text);
    if (!any) throw ParseError(raw.source_path + ": transcript is empty");
    return raw;
  }

  // CHAT: main tiers look like "*CHI:\tthe dog ran ." and may continue on
  // following lines that start with a tab.
  bool in_main_tier = false;
  for (auto line : SplitLines(text)) {
    if (line.empty()) {
      in_main_tier = false;
      continue;
    }
    if (line.front() == '\t' || line.front() == ' ') {
      if (in_main_tier) {
        raw.lines.back().text += ' ';
        raw.lines.back().text += std::string(line.substr(1));
      }
      continue;
    }
    if (line.front() != '*') {
      in_main_tier = false;  // @header or %dependent tier
      continue;
    }
    auto colon = line.find(':');
    if (colon == std::string_view::npos || colon < 2) {
      throw ParseError(raw.source_path + ": malformed main tier '" + std::string(line) + "'");
    }
    std::string speaker(line.substr(1, colon - 1));
    std::string_view body = line.substr(colon + 1);
    while (!body.empty() && IsSpace(body.front())) body.remove_prefix(1);
    raw.lines.push_back({std::move(speaker), std::string(body)});
    in_main_tier = true;
  }
  bool any = false;
  for (const auto& l : raw.lines) any = any || HasContent(l.text);
  if (!any) throw ParseError(raw.source_path + ": no main-tier content");
  return raw;
}

RawTranscript LoadTranscript(const std::string& path, TranscriptFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read transcript '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseTranscript(buf.str(), format, path);
}

RawTranscript FilterSpeakers(RawTranscript raw, std::string_view speaker) {
  if (speaker == "all") return raw;
  std::erase_if(raw.lines, [&](const TranscriptLine& l) { return !l.speaker || *l.speaker != speaker; });
  if (raw.lines.empty()) {
    throw ParseError(raw.source_path + ": no lines for speaker '" + std::string(speaker) + "'");
  }
  return raw;
}

std::string StripChatAnnotations(std::string_view line) {
  std::string cleaned;
  cleaned.reserve(line.size());
  // Drop [codes] and \x15time bullets\x15 first; they may contain spaces.
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (c == '[') {
      auto close = line.find(']', i);
      if (close == std::string_view::npos) break;
      cleaned += ' ';
      i = close;
    } else if (c == '\x15') {
      auto close = line.find('\x15', i + 1);
      if (close == std::string_view::npos) break;
      cleaned += ' ';
      i = close;
    } else if (c == '<' || c == '>') {
      cleaned += ' ';
    } else {
      cleaned += c;
    }
  }

  std::string out;
  for (auto word : SplitWords(cleaned)) {
    if (word.front() == '&') continue;
    if (word == "xxx" || word == "yyy" || word == "www") continue;
    if (auto at = word.find('@'); at != std::string_view::npos && at > 0) word = word.substr(0, at);
    if (!out.empty()) out += ' ';
    out += word;
  }
  return out;
}

std::string NormalizeWord(std::string_view word) {
  std::string token;
  for (char c : word) {
    if (c >= 'A' && c <= 'Z') {
      token += static_cast<char>(c - 'A' + 'a');
    } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      token += c;
    }
  }
  return token;
}

TokenSeq NormalizeText(std::string_view text) {
  std::vector<std::string> tokens;
  for (auto word : SplitWords(text)) {
    auto token = NormalizeWord(word);
    if (!token.empty()) tokens.push_back(std::move(token));
  }
  return TokenSeq(std::move(tokens));
}

NormalizedTranscript Normalize(const RawTranscript& raw) {
  std::vector<std::string> tokens;
  NormalizedTranscript out;
  for (std::size_t li = 0; li < raw.lines.size(); ++li) {
    std::string text = raw.format == TranscriptFormat::kChat ? StripChatAnnotations(raw.lines[li].text)
                                                             : raw.lines[li].text;
    for (auto word : SplitWords(text)) {
      auto token = NormalizeWord(word);
      if (token.empty()) continue;
      tokens.push_back(std::move(token));
      out.originals.emplace_back(word);
      out.line_index.push_back(li);
    }
  }
  if (tokens.empty()) throw ParseError(raw.source_path + ": transcript has no tokens after normalization");
  out.tokens = TokenSeq(std::move(tokens));
  return out;
}

TokenSeq GtTokens(const AlignmentRecord& record) {
  if (!record.gt_text) return {};
  std::vector<std::string> tokens;
  for (const auto& surface : *record.gt_text) {
    auto token = NormalizeWord(surface);
    if (!token.empty()) tokens.push_back(std::move(token));
  }
  return TokenSeq(std::move(tokens));
}

}  // namespace fasa
