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

#include "fasa/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fasa/json.hpp"

namespace fasa {

using nlohmann::json;

TokenSeq::TokenSeq(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (const auto& t : tokens_) {
    if (!IsValidToken(t)) throw DomainError("invalid token '" + t + "'");
  }
}

TokenSeq::TokenSeq(std::initializer_list<std::string> tokens)
    : TokenSeq(std::vector<std::string>(tokens)) {}

bool TokenSeq::IsValidToken(std::string_view token) {
  if (token.empty()) return false;
  return std::all_of(token.begin(), token.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
  });
}

std::string TokenSeq::Joined() const {
  std::string out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (i) out += ' ';
    out += tokens_[i];
  }
  return out;
}

void HypothesisSegment::Validate() const {
  if (!std::isfinite(start_s) || !std::isfinite(end_s)) {
    throw ParseError("segment '" + segment_id + "': non-finite time");
  }
  if (start_s < 0.0) throw ParseError("segment '" + segment_id + "': negative start");
  if (!(start_s < end_s)) throw ParseError("segment '" + segment_id + "': inverted span");
  if (!words) return;
  double prev = -1.0;
  for (const auto& w : *words) {
    if (!(w.start_s <= w.end_s)) {
      throw ParseError("segment '" + segment_id + "': inverted word span for '" + w.word + "'");
    }
    if (w.start_s < prev) {
      throw ParseError("segment '" + segment_id + "': word stamps out of order at '" + w.word + "'");
    }
    if (w.start_s < start_s - kWordSpanToleranceS || w.end_s > end_s + kWordSpanToleranceS) {
      throw ParseError("segment '" + segment_id + "': word '" + w.word + "' outside segment span");
    }
    prev = w.start_s;
  }
}

std::string_view ToString(Status status) {
  switch (status) {
    case Status::kAligned: return "aligned";
    case Status::kVerify: return "verify";
    case Status::kDropped: return "dropped";
  }
  return "dropped";
}

Status StatusFromString(std::string_view name) {
  if (name == "aligned") return Status::kAligned;
  if (name == "verify") return Status::kVerify;
  if (name == "dropped") return Status::kDropped;
  throw ParseError("unknown status '" + std::string(name) + "'");
}

std::string_view ToString(ReviewAction action) {
  switch (action) {
    case ReviewAction::kAcceptGt: return "accept_gt";
    case ReviewAction::kAcceptPred: return "accept_pred";
    case ReviewAction::kCustom: return "custom";
    case ReviewAction::kReject: return "reject";
  }
  return "reject";
}

ReviewAction ReviewActionFromString(std::string_view name) {
  if (name == "accept_gt") return ReviewAction::kAcceptGt;
  if (name == "accept_pred") return ReviewAction::kAcceptPred;
  if (name == "custom") return ReviewAction::kCustom;
  if (name == "reject") return ReviewAction::kReject;
  throw ParseError("unknown action '" + std::string(name) + "'");
}

std::string_view ToString(DistanceUnit unit) {
  return unit == DistanceUnit::kToken ? "token" : "character";
}

DistanceUnit DistanceUnitFromString(std::string_view name) {
  if (name == "token") return DistanceUnit::kToken;
  if (name == "character") return DistanceUnit::kCharacter;
  throw ConfigError("unknown distance unit '" + std::string(name) + "'");
}

void AlignConfig::Validate() const {
  if (!std::isfinite(sigma_a) || !std::isfinite(sigma_i)) {
    throw ConfigError("thresholds must be finite");
  }
  if (sigma_a < 0.0) throw ConfigError("sigma_a must be >= 0");
  if (sigma_a > sigma_i) throw ConfigError("sigma_a must not exceed sigma_i");
}

Status RouteByWer(double wer, const AlignConfig& cfg) {
  if (wer < cfg.sigma_a) return Status::kAligned;
  if (wer < cfg.sigma_i) return Status::kVerify;
  return Status::kDropped;
}

std::size_t DatasetManifest::total_aligned() const {
  return std::count_if(entries.begin(), entries.end(),
                       [](const ManifestEntry& e) { return e.record.status == Status::kAligned; });
}

std::size_t DatasetManifest::total_verify() const {
  return std::count_if(entries.begin(), entries.end(),
                       [](const ManifestEntry& e) { return e.record.status == Status::kVerify; });
}

double DatasetManifest::total_duration_s() const {
  double total = 0.0;
  for (const auto& e : entries) {
    if (e.record.status == Status::kAligned) total += e.record.end_s - e.record.start_s;
  }
  return total;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(json& j, const TokenSeq& t) { j = t.tokens(); }

void from_json(const json& j, TokenSeq& t) {
  if (!j.is_array()) throw ParseError("token list must be an array");
  try {
    t = TokenSeq(j.get<std::vector<std::string>>());
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
}

void to_json(json& j, const WordStamp& w) {
  j = json{{"word", w.word}, {"start", w.start_s}, {"end", w.end_s}};
}

void from_json(const json& j, WordStamp& w) {
  w.word = RequireField<std::string>(j, "word");
  w.start_s = RequireField<double>(j, "start");
  w.end_s = RequireField<double>(j, "end");
}

void to_json(json& j, const HypothesisSegment& s) {
  j = json{{"id", s.segment_id}, {"start", s.start_s}, {"end", s.end_s}, {"text", s.text}};
  if (s.words) j["words"] = *s.words;
}

void from_json(const json& j, HypothesisSegment& s) {
  s.segment_id = RequireField<std::string>(j, "id");
  s.start_s = RequireField<double>(j, "start");
  s.end_s = RequireField<double>(j, "end");
  s.text = RequireField<std::string>(j, "text");
  s.words = OptionalField<std::vector<WordStamp>>(j, "words");
}

void to_json(json& j, const AlignmentRecord& r) {
  j = json::object();
  j["segment_id"] = r.segment_id;
  j["status"] = ToString(r.status);
  j["start"] = r.start_s;
  j["end"] = r.end_s;
  if (r.window_start) j["window_start"] = *r.window_start;
  if (r.window_len) j["window_len"] = *r.window_len;
  if (r.gt_text) j["gt_text"] = *r.gt_text;
  j["pred_text"] = r.pred_text;
  if (r.distance) j["distance"] = *r.distance;
  if (r.wer) j["wer"] = *r.wer;
  if (r.review) j["review"] = ToString(*r.review);
  if (r.candidate_gt) j["candidate_gt"] = *r.candidate_gt;
}

void from_json(const json& j, AlignmentRecord& r) {
  r.segment_id = RequireField<std::string>(j, "segment_id");
  r.status = StatusFromString(RequireField<std::string>(j, "status"));
  r.start_s = RequireField<double>(j, "start");
  r.end_s = RequireField<double>(j, "end");
  r.window_start = OptionalField<std::size_t>(j, "window_start");
  r.window_len = OptionalField<std::size_t>(j, "window_len");
  r.gt_text = OptionalField<std::vector<std::string>>(j, "gt_text");
  r.pred_text = RequireField<TokenSeq>(j, "pred_text");
  r.distance = OptionalField<std::size_t>(j, "distance");
  r.wer = OptionalField<double>(j, "wer");
  if (auto review = OptionalField<std::string>(j, "review")) {
    r.review = ReviewActionFromString(*review);
  } else {
    r.review.reset();
  }
  r.candidate_gt = OptionalField<std::vector<std::string>>(j, "candidate_gt");
}

void to_json(json& j, const AlignConfig& c) {
  j = json{{"sigma_a", c.sigma_a},
           {"sigma_i", c.sigma_i},
           {"window_slack", c.window_slack},
           {"pgc_tolerance", c.pgc_tolerance},
           {"allow_overlap", c.allow_overlap},
           {"distance_unit", ToString(c.distance_unit)}};
}

void from_json(const json& j, AlignConfig& c) {
  c.sigma_a = RequireField<double>(j, "sigma_a");
  c.sigma_i = RequireField<double>(j, "sigma_i");
  c.window_slack = RequireField<std::size_t>(j, "window_slack");
  c.pgc_tolerance = RequireField<std::size_t>(j, "pgc_tolerance");
  c.allow_overlap = RequireField<bool>(j, "allow_overlap");
  c.distance_unit = DistanceUnitFromString(RequireField<std::string>(j, "distance_unit"));
}

void to_json(json& j, const ManifestEntry& e) {
  to_json(j, e.record);
  j["audio"] = e.audio_id;
  j["speaker"] = e.speaker;
  if (!e.stem.empty()) j["stem"] = e.stem;
  if (e.clip) j["clip"] = *e.clip;
  if (e.sample_begin) j["sample_begin"] = *e.sample_begin;
  if (e.sample_end) j["sample_end"] = *e.sample_end;
}

void from_json(const json& j, ManifestEntry& e) {
  from_json(j, e.record);
  e.audio_id = RequireField<std::string>(j, "audio");
  e.speaker = RequireField<std::string>(j, "speaker");
  e.stem = OptionalField<std::string>(j, "stem").value_or("");
  e.clip = OptionalField<std::string>(j, "clip");
  e.sample_begin = OptionalField<std::int64_t>(j, "sample_begin");
  e.sample_end = OptionalField<std::int64_t>(j, "sample_end");
}

}  // namespace fasa
