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

#include "fasa/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "fasa/aligner.hpp"
#include "fasa/json.hpp"

namespace fasa::sim {

using nlohmann::json;

std::uint64_t SplitMix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) {
  for (auto& s : s_) s = SplitMix64(seed);
}

std::uint64_t Rng::Next() {
  auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::Uniform() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::Below(std::uint64_t n) {
  if (n == 0) throw DomainError("Rng::Below(0)");
  // Reject the low tail so every residue is equally likely.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    std::uint64_t r = Next();
    if (r >= threshold) return r % n;
  }
}

std::uint64_t DeriveSeed(std::uint64_t seed, Stream stream, std::uint64_t index) {
  std::uint64_t state = seed;
  std::uint64_t a = SplitMix64(state);
  state = a ^ (static_cast<std::uint64_t>(stream) * 0xD1B54A32D192ED03ULL);
  std::uint64_t b = SplitMix64(state);
  state = b ^ (index * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL);
  return SplitMix64(state);
}

namespace {

constexpr std::string_view kConsonants = "bcdfghjklmnprstvwxyz";
constexpr std::string_view kVowels = "aeiou";
constexpr std::size_t kSyllables = 100;  // |consonants| * |vowels|

std::size_t SyllablesFor(std::size_t vocab_size) {
  std::size_t n = 2;
  std::size_t capacity = kSyllables * kSyllables;
  while (capacity < vocab_size) {
    ++n;
    capacity *= kSyllables;
  }
  return n;
}

}  // namespace

std::string VocabWord(std::size_t id, std::size_t vocab_size) {
  const std::size_t n = SyllablesFor(vocab_size);
  std::string word(2 * n, ' ');
  for (std::size_t k = n; k-- > 0;) {
    std::size_t syl = id % kSyllables;
    id /= kSyllables;
    word[2 * k] = kConsonants[syl / kVowels.size()];
    word[2 * k + 1] = kVowels[syl % kVowels.size()];
  }
  return word;
}

TokenSeq Corpus::Transcript() const {
  std::vector<std::string> all;
  for (const auto& s : sentences) all.insert(all.end(), s.begin(), s.end());
  return TokenSeq(std::move(all));
}

Corpus GenerateCorpus(std::size_t n_sentences, std::size_t min_len, std::size_t max_len, std::size_t vocab_size,
                      std::uint64_t seed) {
  if (min_len < 1 || min_len > max_len) throw DomainError("sentence length range must satisfy 1 <= min <= max");
  if (vocab_size < n_sentences) throw DomainError("vocab_size must be at least n_sentences");
  if (vocab_size == n_sentences && max_len > 1) {
    throw DomainError("no shared vocabulary left for sentences longer than one token");
  }

  Corpus corpus;
  corpus.vocab.reserve(vocab_size);
  for (std::size_t id = 0; id < vocab_size; ++id) corpus.vocab.push_back(VocabWord(id, vocab_size));

  const std::size_t pool = vocab_size - n_sentences;
  std::size_t offset = 0;
  for (std::size_t k = 0; k < n_sentences; ++k) {
    Rng rng(DeriveSeed(seed, Stream::kSentence, k));
    std::size_t len = min_len + rng.Below(max_len - min_len + 1);
    if (pool == 0) len = 1;
    std::size_t marker_at = rng.Below(len);
    std::vector<std::string> tokens;
    tokens.reserve(len);
    for (std::size_t i = 0; i < len; ++i) {
      tokens.push_back(i == marker_at ? corpus.vocab[k] : corpus.vocab[n_sentences + rng.Below(pool)]);
    }
    corpus.sentences.emplace_back(std::move(tokens));
    corpus.spans.push_back({offset, len});
    offset += len;
  }
  return corpus;
}

void CorruptionSpec::Validate() const {
  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in_unit(token_error_rate) || !in_unit(sentence_drop_rate)) {
    throw ConfigError("corruption rates must lie in [0, 1]");
  }
}

CorruptedTranscript CorruptTranscript(std::span<const TokenSeq> sentences, const CorruptionSpec& spec) {
  spec.Validate();
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < sentences.size(); ++k) {
    Rng rng(DeriveSeed(spec.seed, Stream::kDrop, k));
    if (rng.Uniform() >= spec.sentence_drop_rate) order.push_back(k);
  }
  if (spec.shuffle_sentences && order.size() > 1) {
    Rng rng(DeriveSeed(spec.seed, Stream::kShuffle, 0));
    for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.Below(i + 1)]);
  }

  CorruptedTranscript out;
  out.spans.assign(sentences.size(), std::nullopt);
  std::vector<std::string> tokens;
  for (std::size_t line = 0; line < order.size(); ++line) {
    const TokenSeq& s = sentences[order[line]];
    out.spans[order[line]] = Span{tokens.size(), s.size()};
    for (const auto& t : s) {
      tokens.push_back(t);
      out.transcript.originals.push_back(t);
      out.transcript.line_index.push_back(line);
    }
  }
  out.transcript.tokens = TokenSeq(std::move(tokens));
  return out;
}

std::string SegmentId(std::size_t index) { return fmt::format("seg{:05}", index); }

HypothesisSet SynthHypotheses(std::span<const TokenSeq> sentences, std::span<const std::string> substitution_vocab,
                              double token_error_rate, std::uint64_t seed, const std::string& audio_id) {
  if (token_error_rate < 0.0 || token_error_rate > 1.0) throw ConfigError("token_error_rate must lie in [0, 1]");
  if (token_error_rate > 0.0 && substitution_vocab.empty()) throw DomainError("substitution vocabulary is empty");

  // Times are kept in deciseconds so they are exact and platform-independent.
  constexpr std::int64_t kTokenDs = 4;
  constexpr std::int64_t kGapDs = 2;
  HypothesisSet set;
  set.audio_id = audio_id;
  std::int64_t t = 0;
  for (std::size_t k = 0; k < sentences.size(); ++k) {
    Rng rng(DeriveSeed(seed, Stream::kNoise, k));
    HypothesisSegment seg;
    seg.segment_id = SegmentId(k);
    seg.start_s = static_cast<double>(t) / 10.0;
    std::vector<WordStamp> words;
    std::string text;
    for (const auto& token : sentences[k]) {
      std::string word = token;
      if (rng.Uniform() < token_error_rate) word = substitution_vocab[rng.Below(substitution_vocab.size())];
      words.push_back({word, static_cast<double>(t) / 10.0, static_cast<double>(t + kTokenDs) / 10.0});
      if (!text.empty()) text += ' ';
      text += word;
      t += kTokenDs;
    }
    if (sentences[k].empty()) t += kTokenDs;
    seg.end_s = static_cast<double>(t) / 10.0;
    seg.text = std::move(text);
    seg.words = std::move(words);
    set.segments.push_back(std::move(seg));
    t += kGapDs;
  }
  return set;
}

json Truth::ToJson() const {
  json j;
  j["corpus_id"] = corpus_id;
  j["segment_ids"] = segment_ids;
  j["sentences"] = sentences;
  auto& arr = j["spans"] = json::array();
  for (const auto& s : spans) {
    arr.push_back(s ? json::array({s->start, s->length}) : json(nullptr));
  }
  return j;
}

Truth Truth::FromJson(const json& j) {
  Truth t;
  t.corpus_id = RequireField<std::string>(j, "corpus_id");
  t.segment_ids = RequireField<std::vector<std::string>>(j, "segment_ids");
  t.sentences = RequireField<std::vector<TokenSeq>>(j, "sentences");
  if (!j.contains("spans") || !j["spans"].is_array()) throw ParseError("missing field 'spans'");
  for (const auto& s : j["spans"]) {
    if (s.is_null()) {
      t.spans.emplace_back();
    } else if (s.is_array() && s.size() == 2) {
      t.spans.push_back(Span{s[0].get<std::size_t>(), s[1].get<std::size_t>()});
    } else {
      throw ParseError("bad field 'spans': entries must be [start, length] or null");
    }
  }
  if (t.segment_ids.size() != t.sentences.size() || t.spans.size() != t.sentences.size()) {
    throw ParseError("truth arrays differ in length");
  }
  return t;
}

double EvalReport::aligned_word_error_pct() const {
  return aligned_words ? 100.0 * static_cast<double>(aligned_word_errors) / static_cast<double>(aligned_words) : 0.0;
}

double EvalReport::span_recovery_rate() const {
  return surviving_segments ? static_cast<double>(recovered_spans) / static_cast<double>(surviving_segments) : 0.0;
}

std::string EvalReport::Render() const {
  std::string out = "AU | VU | AU Error | AW | AW Error (%)\n";
  out += fmt::format("{} | {} | {} | {} | {} ({:.2f}%)\n", aligned_count, verify_count, aligned_errors,
                     aligned_words, aligned_word_errors, aligned_word_error_pct());
  out += fmt::format("Span recovery: {}/{} ({:.4f})\n", recovered_spans, surviving_segments, span_recovery_rate());
  out += fmt::format("False alignments: {}\n", false_alignment_count);
  return out;
}

EvalReport Evaluate(std::span<const AlignmentRecord> records, const Truth& truth) {
  std::map<std::string, std::size_t> sentence_of;
  for (std::size_t k = 0; k < truth.segment_ids.size(); ++k) sentence_of[truth.segment_ids[k]] = k;

  EvalReport report;
  for (const auto& rec : records) {
    auto it = sentence_of.find(rec.segment_id);
    if (it == sentence_of.end()) throw DomainError("segment '" + rec.segment_id + "' is not in the truth file");
    const std::size_t k = it->second;
    const auto& true_span = truth.spans[k];
    const bool survived = true_span.has_value();

    if (survived) {
      ++report.surviving_segments;
      if (rec.has_window() && *rec.window_start == true_span->start && *rec.window_len == true_span->length) {
        ++report.recovered_spans;
      }
    }
    if (rec.status == Status::kVerify) ++report.verify_count;
    if (rec.status != Status::kAligned) continue;

    ++report.aligned_count;
    if (!survived) ++report.false_alignment_count;
    TokenSeq gt = GtTokens(rec);
    report.aligned_words += gt.size();
    std::size_t errors = EditDistance(truth.sentences[k], gt);
    report.aligned_word_errors += errors;
    if (errors > 0) ++report.aligned_errors;
  }
  return report;
}

EvalReport Evaluate(const DatasetManifest& manifest, const Truth& truth) {
  if (!manifest.entries.empty() && manifest.audio_id != truth.corpus_id) {
    throw DomainError("manifest audio '" + manifest.audio_id + "' does not match truth corpus '" +
                      truth.corpus_id + "'");
  }
  std::vector<AlignmentRecord> records;
  records.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) records.push_back(e.record);
  return Evaluate(records, truth);
}

}  // namespace fasa::sim
