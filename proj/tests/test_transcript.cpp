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

#include <doctest.h>

#include <algorithm>
#include <random>
#include <regex>

#include "fasa/transcript.hpp"
#include "test_util.hpp"

using namespace fasa;
using fasa::testing::TempDir;

TEST_CASE("plain transcript yields one line per newline") {
  TempDir dir;
  fasa::testing::Spit(dir.path() / "t.txt", "hello there\nbye");
  auto raw = LoadTranscript(dir / "t.txt", TranscriptFormat::kPlain);
  REQUIRE(raw.lines.size() == 2);
  CHECK(raw.lines[0] == TranscriptLine{std::nullopt, "hello there"});
  CHECK(raw.lines[1] == TranscriptLine{std::nullopt, "bye"});
}

TEST_CASE("plain transcript handles CRLF and a trailing newline") {
  auto raw = ParseTranscript("a b\r\nc\r\n", TranscriptFormat::kPlain);
  REQUIRE(raw.lines.size() == 2);
  CHECK(raw.lines[0].text == "a b");
  CHECK(raw.lines[1].text == "c");
}

TEST_CASE("chat keeps only main tiers") {
  auto raw = ParseTranscript("@Begin\n*CHI:\tthe dog ran .\n%mor: ...\n@End", TranscriptFormat::kChat);
  REQUIRE(raw.lines.size() == 1);
  CHECK(raw.lines[0].speaker == "CHI");
  CHECK(raw.lines[0].text == "the dog ran .");
}

TEST_CASE("chat continuation lines join their tier") {
  auto raw = ParseTranscript(
      "@UTF8\n*INV:\twhat is\n\tthat ?\n%com:\tpoints\n\tat picture\n*CHI:\ta dog .\n", TranscriptFormat::kChat);
  REQUIRE(raw.lines.size() == 2);
  CHECK(raw.lines[0].speaker == "INV");
  CHECK(raw.lines[0].text == "what is that ?");
  CHECK(raw.lines[1].text == "a dog .");
}

TEST_CASE("chat without main tiers is an error") {
  CHECK_THROWS_WITH_AS(ParseTranscript("@Begin\n%mor: n|dog\n@End\n", TranscriptFormat::kChat),
                       doctest::Contains("no main-tier content"), ParseError);
}

TEST_CASE("empty and unreadable transcripts") {
  CHECK_THROWS_AS(ParseTranscript("  \n\n", TranscriptFormat::kPlain), ParseError);
  CHECK_THROWS_AS(LoadTranscript("/nonexistent/file.txt", TranscriptFormat::kPlain), IoError);
  CHECK_THROWS_WITH_AS(ParseTranscript("ok \xC3\x28", TranscriptFormat::kPlain), doctest::Contains("UTF-8"),
                       ParseError);
  auto punct_only = ParseTranscript("... !!!\n", TranscriptFormat::kPlain);
  CHECK_THROWS_AS(Normalize(punct_only), ParseError);
}

TEST_CASE("utf-8 validation") {
  CHECK(IsValidUtf8("plain ascii"));
  CHECK(IsValidUtf8("caf\xC3\xA9 \xE2\x82\xAC \xF0\x9F\x98\x80"));
  CHECK_FALSE(IsValidUtf8("\xC0\xAF"));  // overlong
  CHECK_FALSE(IsValidUtf8("\xED\xA0\x80"));  // surrogate
  CHECK_FALSE(IsValidUtf8("abc\xE2\x82"));  // truncated
  CHECK_FALSE(IsValidUtf8("\xFF"));
}

TEST_CASE("normalize examples") {
  CHECK(NormalizeText("Hello, World!") == TokenSeq{"hello", "world"});
  CHECK(NormalizeText("don't stop") == TokenSeq{"dont", "stop"});
  CHECK(NormalizeText("ice-cream 3 cones") == TokenSeq{"icecream", "3", "cones"});

  RawTranscript raw;
  raw.format = TranscriptFormat::kChat;
  raw.lines = {{"CHI", "the dog [!] &uh ran ."}};
  auto norm = Normalize(raw);
  CHECK(norm.tokens == TokenSeq{"the", "dog", "ran"});
}

TEST_CASE("chat annotation stripping") {
  CHECK(StripChatAnnotations("<the dog> [/] the dog ran .") == "the dog the dog ran .");
  CHECK(StripChatAnnotations("I want xxx cookie@c [* s:r] .") == "I want cookie .");
  CHECK(StripChatAnnotations("go home . \x15" "1234_5678\x15") == "go home .");
  CHECK(StripChatAnnotations("&=laughs okay &-um yes") == "okay yes");
}

TEST_CASE("normalized transcript keeps originals and line provenance") {
  auto raw = ParseTranscript("Hello, World!\n\nIt's  me.\n", TranscriptFormat::kPlain);
  auto norm = Normalize(raw);
  CHECK(norm.tokens == TokenSeq{"hello", "world", "its", "me"});
  CHECK(norm.originals == std::vector<std::string>{"Hello,", "World!", "It's", "me."});
  CHECK(norm.line_index == std::vector<std::size_t>{0, 0, 2, 2});
}

TEST_CASE("speaker filter") {
  auto raw = ParseTranscript("*CHI:\tone two .\n*MOT:\tthree .\n*CHI:\tfour .\n", TranscriptFormat::kChat);
  CHECK(FilterSpeakers(raw, "all").lines.size() == 3);
  auto chi = FilterSpeakers(raw, "CHI");
  CHECK(Normalize(chi).tokens == TokenSeq{"one", "two", "four"});
  CHECK_THROWS_AS(FilterSpeakers(raw, "FAT"), ParseError);
}

TEST_CASE("GtTokens normalizes surface words") {
  AlignmentRecord r;
  r.gt_text = std::vector<std::string>{"Hello,", "World!"};
  CHECK(GtTokens(r) == TokenSeq{"hello", "world"});
  r.gt_text.reset();
  CHECK(GtTokens(r).empty());
}

namespace {

const std::string kPunct = ".,;:!?'\"-()[]{}/\\@#$%^&*_+=~`|<>";

std::string RandomMessyText(std::mt19937_64& rng) {
  static const std::string letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  std::string out;
  std::size_t n = rng() % 60;
  for (std::size_t i = 0; i < n; ++i) {
    auto r = rng() % 10;
    if (r < 6) {
      out += letters[rng() % letters.size()];
    } else if (r < 8) {
      out += kPunct[rng() % kPunct.size()];
    } else if (r < 9) {
      out += ' ';
    } else {
      out += "\xC3\xA9";  // non-ASCII letter
    }
  }
  return out;
}

}  // namespace

TEST_CASE("normalize properties (random inputs)") {
  std::mt19937_64 rng(7);
  const std::regex token_re("[a-z0-9]+");
  for (int iter = 0; iter < 2000; ++iter) {
    std::string text = RandomMessyText(rng);
    TokenSeq tokens = NormalizeText(text);

    for (const auto& t : tokens) CHECK(std::regex_match(t, token_re));

    // Idempotent on its own output.
    CHECK(NormalizeText(tokens.Joined()) == tokens);

    // Token count is invariant when punctuation characters are permuted
    // among their positions.
    std::vector<std::size_t> slots;
    std::string chars;
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (kPunct.find(text[i]) != std::string::npos) {
        slots.push_back(i);
        chars += text[i];
      }
    }
    std::shuffle(chars.begin(), chars.end(), rng);
    std::string permuted = text;
    for (std::size_t k = 0; k < slots.size(); ++k) permuted[slots[k]] = chars[k];
    CHECK(NormalizeText(permuted).size() == tokens.size());
    // Replacing punctuation with other punctuation too.
    for (auto s : slots) permuted[s] = kPunct[rng() % kPunct.size()];
    CHECK(NormalizeText(permuted).size() == tokens.size());
  }
}

TEST_CASE("normalized transcript invariants (random inputs)") {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 200; ++iter) {
    std::string text = "start\n";
    for (int l = 0; l < 8; ++l) text += RandomMessyText(rng) + "\n";
    auto norm = Normalize(ParseTranscript(text, TranscriptFormat::kPlain));
    CHECK(norm.tokens.size() == norm.originals.size());
    CHECK(norm.tokens.size() == norm.line_index.size());
    CHECK(std::is_sorted(norm.line_index.begin(), norm.line_index.end()));
    for (std::size_t k = 0; k < norm.size(); ++k) CHECK(NormalizeWord(norm.originals[k]) == norm.tokens[k]);
  }
}
