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

// Hypothesis ingestion: the file contract with the external ASR backend.
//
// File format (UTF-8 JSON):
//   {"audio": "...", "sample_rate": 16000,
//    "segments": [{"id": "...", "start": 0.0, "end": 2.5, "text": "...",
//                  "words": [{"word": "...", "start": 0.0, "end": 0.4}]}]}
// "sample_rate" and "words" are optional.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fasa/core.hpp"

namespace fasa {

struct HypothesisSet {
  std::string audio_id;
  std::optional<int> sample_rate_hz;
  // Sorted by start_s; ids unique.
  std::vector<HypothesisSegment> segments;

  const HypothesisSegment* Find(std::string_view segment_id) const;

  friend bool operator==(const HypothesisSet&, const HypothesisSet&) = default;
};

// Raised when the backend command fails. Carries the exit code and whatever
// the command wrote to stderr.
class BackendError : public Error {
 public:
  BackendError(const std::string& what, int exit_code, std::string stderr_text)
      : Error(what), exit_code_(exit_code), stderr_text_(std::move(stderr_text)) {}

  int exit_code() const { return exit_code_; }
  const std::string& stderr_text() const { return stderr_text_; }

 private:
  int exit_code_;
  std::string stderr_text_;
};

// Parses and validates a hypothesis document. Segments that arrive out of
// time order are stably re-sorted (with a warning). Throws ParseError on
// malformed JSON, missing/mistyped fields, bad spans or duplicate ids.
HypothesisSet ParseHypotheses(std::string_view json_text, const std::string& source = "<memory>");

HypothesisSet LoadHypotheses(const std::string& path);

std::string SerializeHypotheses(const HypothesisSet& set);
void SaveHypotheses(const HypothesisSet& set, const std::string& path);

// Throws DomainError if any segment ends after `duration_s` (10 ms slack).
void CheckAgainstDuration(const HypothesisSet& set, double duration_s);

// Substitutes {audio} and {out} in `command_template` with shell-quoted
// paths. Throws ConfigError if either placeholder is missing.
std::string ExpandBackendCommand(std::string_view command_template, const std::string& audio_path,
                                 const std::string& out_path);

// Runs the backend through /bin/sh inside `workdir`, then loads the file it
// wrote to {out}. Throws BackendError on non-zero exit or a missing output
// file, ParseError on malformed output.
HypothesisSet RunBackend(std::string_view command_template, const std::string& audio_path,
                         const std::string& workdir);

}  // namespace fasa
