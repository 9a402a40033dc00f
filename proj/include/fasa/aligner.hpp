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

// Sliding-window alignment of ASR hypothesis segments against a transcript.
//
// For every segment the searcher finds the transcript window T[a, a+len)
// closest to the normalized prediction in Levenshtein distance, with len
// constrained to |pred| +/- window_slack. The window's WER against the
// prediction then routes the segment to Aligned (wer < sigma_a), Verify
// (sigma_a <= wer < sigma_i) or Dropped.

#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fasa/core.hpp"
#include "fasa/hypothesis.hpp"
#include "fasa/transcript.hpp"

namespace fasa {

// Levenshtein distance over arbitrary random-access sequences with unit
// insertion, deletion and substitution costs.
template <typename Seq>
std::size_t Levenshtein(const Seq& a, const Seq& b) {
  const std::size_t n = std::size(b);
  std::vector<std::size_t> row(n + 1);
  for (std::size_t j = 0; j <= n; ++j) row[j] = j;
  std::size_t i = 0;
  for (const auto& x : a) {
    ++i;
    std::size_t diag = row[0];
    row[0] = i;
    std::size_t j = 0;
    for (const auto& y : b) {
      ++j;
      std::size_t up = row[j];
      row[j] = std::min({up + 1, row[j - 1] + 1, diag + (x == y ? 0 : 1)});
      diag = up;
    }
  }
  return row[n];
}

std::size_t EditDistance(std::span<const std::string> a, std::span<const std::string> b);
std::size_t EditDistance(const TokenSeq& a, const TokenSeq& b);

// Character-level distance between the space-joined token strings.
std::size_t CharEditDistance(const TokenSeq& a, const TokenSeq& b);

// edit_distance(reference, hypothesis) / |reference|. May exceed 1.
// Throws DomainError when the reference is empty.
double Wer(const TokenSeq& reference, const TokenSeq& hypothesis);

struct WindowMatch {
  std::size_t start = 0;
  std::size_t length = 0;
  std::size_t distance = 0;

  friend bool operator==(const WindowMatch&, const WindowMatch&) = default;
};

// Inclusive window-length range searched for a prediction of `pred_len`
// tokens: [max(1, pred_len - slack), min(pred_len + slack, transcript_len)].
// When pred_len - slack exceeds the transcript, the lower bound collapses to
// the transcript length.
std::pair<std::size_t, std::size_t> WindowLengthRange(std::size_t pred_len, std::size_t transcript_len,
                                                      std::size_t slack);

// Precomputed transcript view reused across many segment searches.
class WindowSearcher {
 public:
  explicit WindowSearcher(const TokenSeq& transcript, DistanceUnit unit = DistanceUnit::kToken);

  // Best window for `pred` with ties broken by smallest start, then smallest
  // length. Windows touching a token flagged in `claimed` are skipped; returns
  // nullopt only when every candidate window is excluded that way.
  std::optional<WindowMatch> Find(const TokenSeq& pred, std::size_t slack,
                                  std::span<const bool> claimed = {}) const;

  std::size_t transcript_size() const { return ids_.size(); }

 private:
  std::optional<WindowMatch> FindTokens(const TokenSeq& pred, std::size_t slack,
                                        std::span<const bool> claimed) const;
  std::optional<WindowMatch> FindChars(const TokenSeq& pred, std::size_t slack,
                                       std::span<const bool> claimed) const;
  std::uint32_t Lookup(const std::string& token) const;

  const TokenSeq* transcript_;
  DistanceUnit unit_;
  std::vector<std::uint32_t> ids_;
  std::vector<std::pair<std::string, std::uint32_t>> vocab_;  // sorted by token
};

// Convenience wrapper. Requires non-empty pred and transcript.
WindowMatch BestWindow(const TokenSeq& pred, const TokenSeq& transcript, std::size_t slack,
                       DistanceUnit unit = DistanceUnit::kToken);

// Aligns one segment. A prediction that normalizes to nothing is Dropped with
// no window.
AlignmentRecord AlignSegment(const HypothesisSegment& segment, const NormalizedTranscript& transcript,
                             const WindowSearcher& searcher, const AlignConfig& cfg,
                             std::span<const bool> claimed = {});

// Aligns every segment, in segment order. With allow_overlap the segments are
// independent and are spread over `threads` workers (0 = hardware
// concurrency); without it they run sequentially and each Aligned/Verify
// window claims its tokens. Output does not depend on the thread count.
std::vector<AlignmentRecord> AlignCorpus(const HypothesisSet& hyps, const NormalizedTranscript& transcript,
                                         const AlignConfig& cfg, unsigned threads = 1);

}  // namespace fasa
