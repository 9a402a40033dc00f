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

// Synthetic corpora for desk-scale evaluation: generates ground-truth
// sentences, corrupts the transcript (sentence drop, shuffle), synthesizes
// noisy hypotheses and scores alignment output against the truth.
//
// Randomness comes from xoshiro256** seeded through splitmix64, so fixtures
// are reproducible across platforms and reimplementations:
//   splitmix64: x += 0x9E3779B97F4A7C15;
//               z = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9;
//               z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
//               return z ^ (z >> 31);
//   xoshiro256** state s[0..3] = four successive splitmix64 outputs.
// Per-sentence streams use DeriveSeed(seed, stream, index), so results do not
// depend on evaluation order.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fasa/core.hpp"
#include "fasa/hypothesis.hpp"
#include "fasa/transcript.hpp"

namespace fasa::sim {

std::uint64_t SplitMix64(std::uint64_t& state);

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t Next();
  // Uniform in [0, 1) with 53 bits of precision.
  double Uniform();
  // Uniform integer in [0, n); n > 0. Unbiased (rejection sampling).
  std::uint64_t Below(std::uint64_t n);

 private:
  std::uint64_t s_[4];
};

// Independent stream seeds.
enum class Stream : std::uint64_t { kSentence = 1, kDrop = 2, kShuffle = 3, kNoise = 4 };
std::uint64_t DeriveSeed(std::uint64_t seed, Stream stream, std::uint64_t index);

struct Span {
  std::size_t start = 0;
  std::size_t length = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

// Pronounceable word for vocabulary id `id` (consonant-vowel syllables, at
// least two). Distinct ids give distinct words for a fixed vocab_size.
std::string VocabWord(std::size_t id, std::size_t vocab_size);

struct Corpus {
  std::vector<TokenSeq> sentences;
  std::vector<Span> spans;          // span of each sentence in the full transcript
  std::vector<std::string> vocab;   // index = vocabulary id; ids < n are markers

  TokenSeq Transcript() const;
};

// Sentence k carries marker word vocab[k] exactly once and nowhere else;
// the remaining tokens are drawn uniformly from vocab[n, vocab_size).
// Throws DomainError for infeasible parameters.
Corpus GenerateCorpus(std::size_t n_sentences, std::size_t min_len, std::size_t max_len, std::size_t vocab_size,
                      std::uint64_t seed);

struct CorruptionSpec {
  double token_error_rate = 0.0;
  double sentence_drop_rate = 0.0;
  bool shuffle_sentences = false;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct CorruptedTranscript {
  // One line per surviving sentence, in output order.
  NormalizedTranscript transcript;
  // Span of original sentence k in the corrupted transcript; nullopt if dropped.
  std::vector<std::optional<Span>> spans;
};

CorruptedTranscript CorruptTranscript(std::span<const TokenSeq> sentences, const CorruptionSpec& spec);

std::string SegmentId(std::size_t index);

// One segment per sentence. Each token lasts 0.4 s and segments are
// separated by 0.2 s gaps. Every token is independently replaced by a uniform
// draw from `substitution_vocab` with probability token_error_rate.
HypothesisSet SynthHypotheses(std::span<const TokenSeq> sentences, std::span<const std::string> substitution_vocab,
                              double token_error_rate, std::uint64_t seed, const std::string& audio_id = "sim");

// Ground truth written by `fasa simulate` and read by `fasa evaluate`.
struct Truth {
  std::string corpus_id;
  std::vector<std::string> segment_ids;  // segment_ids[k] spoke sentences[k]
  std::vector<TokenSeq> sentences;
  std::vector<std::optional<Span>> spans;  // in the corrupted transcript

  nlohmann::json ToJson() const;
  static Truth FromJson(const nlohmann::json& j);
};

struct EvalReport {
  std::size_t aligned_count = 0;        // AU
  std::size_t verify_count = 0;         // VU
  std::size_t aligned_errors = 0;       // AU Error
  std::size_t aligned_words = 0;        // AW
  std::size_t aligned_word_errors = 0;  // AW Error
  std::size_t surviving_segments = 0;
  std::size_t recovered_spans = 0;
  std::size_t false_alignment_count = 0;

  double aligned_word_error_pct() const;
  double span_recovery_rate() const;

  // Header "AU | VU | AU Error | AW | AW Error (%)", one value row, then the
  // span-recovery and false-alignment lines.
  std::string Render() const;
};

// Scores records against the truth. Throws DomainError when a record names a
// segment the truth does not know.
EvalReport Evaluate(std::span<const AlignmentRecord> records, const Truth& truth);

// Same, but first checks the manifest's audio id against the truth's corpus id.
EvalReport Evaluate(const DatasetManifest& manifest, const Truth& truth);

}  // namespace fasa::sim
