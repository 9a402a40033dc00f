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

#include "fasa/aligner.hpp"

#include <atomic>
#include <exception>
#include <memory>
#include <limits>
#include <numeric>
#include <thread>
#include <unordered_map>

#include <spdlog/spdlog.h>

namespace fasa {

std::size_t EditDistance(std::span<const std::string> a, std::span<const std::string> b) {
  return Levenshtein(a, b);
}

std::size_t EditDistance(const TokenSeq& a, const TokenSeq& b) { return Levenshtein(a.view(), b.view()); }

std::size_t CharEditDistance(const TokenSeq& a, const TokenSeq& b) {
  return Levenshtein(a.Joined(), b.Joined());
}

double Wer(const TokenSeq& reference, const TokenSeq& hypothesis) {
  if (reference.empty()) throw DomainError("WER is undefined for an empty reference");
  return static_cast<double>(EditDistance(reference, hypothesis)) / static_cast<double>(reference.size());
}

std::pair<std::size_t, std::size_t> WindowLengthRange(std::size_t pred_len, std::size_t transcript_len,
                                                      std::size_t slack) {
  std::size_t hi = std::min(pred_len + slack, transcript_len);
  std::size_t lo = pred_len > slack ? pred_len - slack : 1;
  lo = std::max<std::size_t>(lo, 1);
  return {std::min(lo, hi), hi};
}

namespace {

constexpr std::uint32_t kUnknownId = std::numeric_limits<std::uint32_t>::max();

// Scores pred (rows) against every prefix of `cols` that ends on a token
// boundary. ends[l-1] is the column count covering the first l tokens. Updates
// `best` under the strict-less rule so earlier (start, length) pairs win ties.
// Column minima never decrease, so the scan stops once no later prefix can
// beat the current best.
template <typename Sym>
void ScanFrom(std::size_t start, std::span<const Sym> rows, std::span<const Sym> cols,
              std::span<const std::size_t> ends, std::size_t min_len, std::vector<std::size_t>& col,
              std::optional<WindowMatch>& best) {
  const std::size_t p = rows.size();
  col.resize(p + 1);
  std::iota(col.begin(), col.end(), std::size_t{0});
  std::size_t next = 0;
  for (std::size_t j = 1; j <= cols.size() && next < ends.size(); ++j) {
    const Sym c = cols[j - 1];
    std::size_t diag = col[0];
    col[0] = j;
    std::size_t col_min = j;
    for (std::size_t i = 1; i <= p; ++i) {
      std::size_t up = col[i];
      std::size_t v = std::min(up + 1, col[i - 1] + 1);
      v = std::min(v, diag + (rows[i - 1] == c ? 0 : 1));
      col[i] = v;
      diag = up;
      col_min = std::min(col_min, v);
    }
    if (ends[next] == j) {
      std::size_t len = next + 1;
      if (len >= min_len && (!best || col[p] < best->distance)) best = WindowMatch{start, len, col[p]};
      ++next;
    }
    if (best && col_min >= best->distance) break;
  }
}

// Longest window starting at `a` that stays inside the transcript, inside the
// length cap and clear of claimed tokens.
std::size_t UsableLength(std::size_t a, std::size_t cap, std::size_t m, std::span<const bool> claimed) {
  std::size_t hi = std::min(cap, m - a);
  if (!claimed.empty()) {
    for (std::size_t k = 0; k < hi; ++k) {
      if (claimed[a + k]) return k;
    }
  }
  return hi;
}

}  // namespace

WindowSearcher::WindowSearcher(const TokenSeq& transcript, DistanceUnit unit)
    : transcript_(&transcript), unit_(unit) {
  std::unordered_map<std::string, std::uint32_t> index;
  ids_.reserve(transcript.size());
  for (const auto& t : transcript) {
    auto [it, inserted] = index.emplace(t, static_cast<std::uint32_t>(index.size()));
    ids_.push_back(it->second);
  }
  vocab_.assign(index.begin(), index.end());
  std::sort(vocab_.begin(), vocab_.end());
}

std::uint32_t WindowSearcher::Lookup(const std::string& token) const {
  auto it = std::lower_bound(vocab_.begin(), vocab_.end(), token,
                             [](const auto& entry, const std::string& key) { return entry.first < key; });
  if (it != vocab_.end() && it->first == token) return it->second;
  return kUnknownId;
}

std::optional<WindowMatch> WindowSearcher::Find(const TokenSeq& pred, std::size_t slack,
                                                std::span<const bool> claimed) const {
  if (pred.empty()) throw DomainError("cannot search for an empty prediction");
  if (ids_.empty()) throw DomainError("cannot search an empty transcript");
  if (!claimed.empty() && claimed.size() != ids_.size()) throw DomainError("claimed mask size mismatch");
  return unit_ == DistanceUnit::kToken ? FindTokens(pred, slack, claimed) : FindChars(pred, slack, claimed);
}

std::optional<WindowMatch> WindowSearcher::FindTokens(const TokenSeq& pred, std::size_t slack,
                                                      std::span<const bool> claimed) const {
  const std::size_t m = ids_.size();
  const auto [min_len, max_len] = WindowLengthRange(pred.size(), m, slack);

  std::vector<std::uint32_t> rows;
  rows.reserve(pred.size());
  for (const auto& t : pred) rows.push_back(Lookup(t));

  std::vector<std::size_t> ends(max_len);
  std::iota(ends.begin(), ends.end(), std::size_t{1});

  std::optional<WindowMatch> best;
  std::vector<std::size_t> col;
  for (std::size_t a = 0; a + min_len <= m; ++a) {
    std::size_t hi = UsableLength(a, max_len, m, claimed);
    if (hi < min_len) continue;
    ScanFrom<std::uint32_t>(a, rows, std::span(ids_).subspan(a, hi), std::span(ends).first(hi), min_len, col,
                            best);
    if (best && best->distance == 0) break;
  }
  return best;
}

std::optional<WindowMatch> WindowSearcher::FindChars(const TokenSeq& pred, std::size_t slack,
                                                     std::span<const bool> claimed) const {
  const std::size_t m = ids_.size();
  const auto [min_len, max_len] = WindowLengthRange(pred.size(), m, slack);

  const std::string rows = pred.Joined();
  std::string joined;
  std::vector<std::size_t> offset(m), token_end(m);
  for (std::size_t k = 0; k < m; ++k) {
    if (k) joined += ' ';
    offset[k] = joined.size();
    joined += (*transcript_)[k];
    token_end[k] = joined.size();
  }

  std::optional<WindowMatch> best;
  std::vector<std::size_t> col;
  std::vector<std::size_t> ends;
  for (std::size_t a = 0; a + min_len <= m; ++a) {
    std::size_t hi = UsableLength(a, max_len, m, claimed);
    if (hi < min_len) continue;
    ends.clear();
    for (std::size_t l = 1; l <= hi; ++l) ends.push_back(token_end[a + l - 1] - offset[a]);
    std::span<const char> cols(joined.data() + offset[a], ends.back());
    ScanFrom<char>(a, std::span<const char>(rows), cols, ends, min_len, col, best);
    if (best && best->distance == 0) break;
  }
  return best;
}

WindowMatch BestWindow(const TokenSeq& pred, const TokenSeq& transcript, std::size_t slack, DistanceUnit unit) {
  WindowSearcher searcher(transcript, unit);
  auto match = searcher.Find(pred, slack);
  // Without a claimed mask there is always at least one window.
  return *match;
}

AlignmentRecord AlignSegment(const HypothesisSegment& segment, const NormalizedTranscript& transcript,
                             const WindowSearcher& searcher, const AlignConfig& cfg,
                             std::span<const bool> claimed) {
  AlignmentRecord rec;
  rec.segment_id = segment.segment_id;
  rec.start_s = segment.start_s;
  rec.end_s = segment.end_s;
  rec.pred_text = NormalizeText(segment.text);
  rec.status = Status::kDropped;
  if (rec.pred_text.empty()) return rec;

  auto match = searcher.Find(rec.pred_text, cfg.window_slack, claimed);
  if (!match) return rec;

  const auto& all = transcript.tokens.tokens();
  TokenSeq gt(std::vector<std::string>(all.begin() + match->start, all.begin() + match->start + match->length));
  double wer = Wer(gt, rec.pred_text);

  rec.window_start = match->start;
  rec.window_len = match->length;
  rec.distance = match->distance;
  rec.wer = wer;
  rec.status = RouteByWer(wer, cfg);
  if (rec.status != Status::kDropped) {
    rec.gt_text = std::vector<std::string>(transcript.originals.begin() + match->start,
                                           transcript.originals.begin() + match->start + match->length);
  }
  return rec;
}

std::vector<AlignmentRecord> AlignCorpus(const HypothesisSet& hyps, const NormalizedTranscript& transcript,
                                         const AlignConfig& cfg, unsigned threads) {
  cfg.Validate();
  if (transcript.empty()) throw DomainError("cannot align against an empty transcript");

  WindowSearcher searcher(transcript.tokens, cfg.distance_unit);
  const auto& segs = hyps.segments;
  std::vector<AlignmentRecord> records(segs.size());

  if (!cfg.allow_overlap) {
    // std::vector<bool> is not contiguous, so the mask lives in a plain array.
    auto claimed = std::make_unique<bool[]>(transcript.size());
    for (std::size_t k = 0; k < segs.size(); ++k) {
      records[k] = AlignSegment(segs[k], transcript, searcher, cfg,
                                std::span<const bool>(claimed.get(), transcript.size()));
      const auto& r = records[k];
      if (r.status != Status::kDropped && r.has_window()) {
        for (std::size_t t = *r.window_start; t < *r.window_start + *r.window_len; ++t) claimed[t] = true;
      }
    }
    return records;
  }

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(segs.size(), 1)));

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(segs.size());
  auto work = [&] {
    for (std::size_t k = next++; k < segs.size(); k = next++) {
      try {
        records[k] = AlignSegment(segs[k], transcript, searcher, cfg);
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  spdlog::debug("aligned {} segments against {} transcript tokens", segs.size(), transcript.size());
  return records;
}

}  // namespace fasa
