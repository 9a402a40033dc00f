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

// Human review of Verify records: an HTTP service that serves the items and
// their clips and appends reviewer decisions to a log, plus the offline merge
// that folds the log back into the manifest.
//
// HTTP:
//   GET  /api/items        [{id, gt_text, pred_text, wer, duration_s}], wer descending
//   GET  /api/audio/{id}   clip bytes (audio/wav)
//   POST /api/decision     {id, action, custom_text?, reviewer?}
//   GET  /                 review UI assets

#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fasa/core.hpp"

namespace fasa {

inline constexpr const char* kDecisionLogName = "decisions.jsonl";
inline constexpr const char* kRejectedDir = "_rejected";

struct ReviewDecision {
  std::string record_id;
  ReviewAction action = ReviewAction::kReject;
  std::optional<std::string> custom_text;
  std::optional<std::string> reviewer;
  std::string timestamp;  // ISO 8601, UTC

  // custom requires non-empty custom_text that normalizes to at least one
  // token; every other action forbids it. Throws ParseError.
  void Validate() const;

  friend bool operator==(const ReviewDecision&, const ReviewDecision&) = default;
};

void to_json(nlohmann::json& j, const ReviewDecision& d);
void from_json(const nlohmann::json& j, ReviewDecision& d);

std::string UtcTimestamp();

std::vector<ReviewDecision> ParseDecisionLog(std::string_view jsonl, const std::string& source = "<memory>");
// A missing log reads as empty.
std::vector<ReviewDecision> LoadDecisionLog(const std::string& path);

// Append-only decision log. Appends are serialized and flushed to disk before
// returning.
class DecisionLog {
 public:
  explicit DecisionLog(std::string path) : path_(std::move(path)) {}

  void Append(const ReviewDecision& decision);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::mutex mu_;
};

// Applies decisions (last one per record wins) to Verify records, or to
// records a previous merge already touched:
//   accept_gt   -> Aligned, gt_text = the candidate window text
//   accept_pred -> Aligned, gt_text = pred_text
//   custom      -> Aligned, gt_text = normalize(custom_text)
//   reject      -> Dropped
// Throws DomainError for unknown ids or ids of records that were never in
// the Verify queue.
DatasetManifest MergeDecisions(DatasetManifest manifest, std::span<const ReviewDecision> decisions);

struct MergeSummary {
  std::size_t promoted = 0;
  std::size_t rejected = 0;
};

// Merges <dir>/decisions.jsonl into <dir>/manifest.jsonl and moves the
// affected files: promoted clips into the speaker directory (with a fresh
// .txt), rejected ones into _rejected/.
MergeSummary MergeDatasetDecisions(const std::string& dataset_dir);

// JSON body of GET /api/items.
nlohmann::json ReviewItems(const DatasetManifest& manifest);

class ReviewServer {
 public:
  // Loads <dataset_dir>/manifest.jsonl; throws IoError if it is missing.
  // Static UI assets are served from ui_dir when given and present, else a
  // built-in page is served at /.
  explicit ReviewServer(std::string dataset_dir, std::optional<std::string> ui_dir = std::nullopt);
  ~ReviewServer();

  ReviewServer(const ReviewServer&) = delete;
  ReviewServer& operator=(const ReviewServer&) = delete;

  // Binds to host:port (port 0 picks a free port) and returns the bound
  // port. Throws IoError if the port is unavailable.
  int Bind(const std::string& host, int port);
  // Serves until Stop(). Call after Bind.
  void Serve();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fasa
