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

// Shared domain types and configuration. Nothing in here touches the
// filesystem; serialization lives in fasa/json.hpp.

#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fasa {

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user-supplied configuration or flags. The CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input file (transcript, hypothesis file, manifest, decision log).
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Invalid arguments to an algorithmic operation (empty transcript, undefined
// WER, inverted spans, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// TokenSeq

// Ordered sequence of normalized word tokens. Every token matches [a-z0-9]+.
class TokenSeq {
 public:
  TokenSeq() = default;
  explicit TokenSeq(std::vector<std::string> tokens);
  TokenSeq(std::initializer_list<std::string> tokens);

  static bool IsValidToken(std::string_view token);

  const std::vector<std::string>& tokens() const { return tokens_; }
  std::span<const std::string> view() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens_[i]; }
  auto begin() const { return tokens_.begin(); }
  auto end() const { return tokens_.end(); }

  // Tokens joined by single spaces.
  std::string Joined() const;

  friend bool operator==(const TokenSeq&, const TokenSeq&) = default;

 private:
  std::vector<std::string> tokens_;
};

// ---------------------------------------------------------------------------
// Hypotheses

struct WordStamp {
  std::string word;
  double start_s = 0.0;
  double end_s = 0.0;

  friend bool operator==(const WordStamp&, const WordStamp&) = default;
};

// One ASR-predicted utterance.
struct HypothesisSegment {
  std::string segment_id;
  double start_s = 0.0;
  double end_s = 0.0;
  std::string text;
  std::optional<std::vector<WordStamp>> words;

  double duration_s() const { return end_s - start_s; }

  // Throws ParseError on negative/inverted spans or word stamps that are out
  // of order or outside the segment (10 ms tolerance).
  void Validate() const;

  friend bool operator==(const HypothesisSegment&, const HypothesisSegment&) = default;
};

inline constexpr double kWordSpanToleranceS = 0.010;

// ---------------------------------------------------------------------------
// Alignment results

enum class Status { kAligned, kVerify, kDropped };

std::string_view ToString(Status status);
Status StatusFromString(std::string_view name);

enum class ReviewAction { kAcceptGt, kAcceptPred, kCustom, kReject };

std::string_view ToString(ReviewAction action);
ReviewAction ReviewActionFromString(std::string_view name);

// One utterance's resolved alignment.
//
// gt_text holds the transcript's original surface forms over the matched
// window (one entry per window token); each entry normalizes to exactly one
// token. pred_text is the normalized prediction.
struct AlignmentRecord {
  std::string segment_id;
  Status status = Status::kDropped;
  double start_s = 0.0;
  double end_s = 0.0;
  std::optional<std::size_t> window_start;
  std::optional<std::size_t> window_len;
  std::optional<std::vector<std::string>> gt_text;
  TokenSeq pred_text;
  std::optional<std::size_t> distance;
  std::optional<double> wer;
  // Set once a reviewer decision has been merged into the record;
  // candidate_gt keeps the window text the reviewer was shown.
  std::optional<ReviewAction> review;
  std::optional<std::vector<std::string>> candidate_gt;

  bool has_window() const { return window_start.has_value() && window_len.has_value(); }

  friend bool operator==(const AlignmentRecord&, const AlignmentRecord&) = default;
};

// ---------------------------------------------------------------------------
// Configuration

enum class DistanceUnit { kToken, kCharacter };

std::string_view ToString(DistanceUnit unit);
DistanceUnit DistanceUnitFromString(std::string_view name);

struct AlignConfig {
  double sigma_a = 0.1;
  double sigma_i = 0.3;
  std::size_t window_slack = 3;
  std::size_t pgc_tolerance = 1;
  bool allow_overlap = true;
  DistanceUnit distance_unit = DistanceUnit::kToken;

  // Throws ConfigError unless 0 <= sigma_a <= sigma_i.
  void Validate() const;

  friend bool operator==(const AlignConfig&, const AlignConfig&) = default;
};

// Routes a WER value into Aligned / Verify / Dropped. WER is used unclamped.
Status RouteByWer(double wer, const AlignConfig& cfg);

// ---------------------------------------------------------------------------
// Manifest

// A manifest line: the alignment record plus where its clip lives.
struct ManifestEntry {
  AlignmentRecord record;
  std::string audio_id;
  std::string speaker;
  // File stem ("<speaker>-<i>") shared by the record's .wav and .txt; empty
  // for records that were never written out.
  std::string stem;
  // Clip path relative to the dataset root, when a clip was written.
  std::optional<std::string> clip;
  // Sample offsets of the clip in the source audio: [sample_begin, sample_end).
  std::optional<std::int64_t> sample_begin;
  std::optional<std::int64_t> sample_end;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::string audio_id;
  std::vector<ManifestEntry> entries;

  std::size_t total_aligned() const;  // AU
  std::size_t total_verify() const;   // VU
  // Sum of (end_s - start_s) over Aligned records.
  double total_duration_s() const;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

}  // namespace fasa
