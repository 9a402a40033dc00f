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

// Dataset emission: cuts clips for aligned records and lays them out in a
// LibriSpeech-like tree.
//
//   <out>/<speaker>/<speaker>-<i>.wav   Aligned clip (16-bit PCM)
//   <out>/<speaker>/<speaker>-<i>.txt   gt_text joined by single spaces
//   <out>/_verify/<speaker>-<i>.wav     Verify clip
//   <out>/_verify/<speaker>-<i>.txt     "gt: ...\npred: ...\n"
//   <out>/manifest.jsonl                one record per line, every status
//
// <i> is the record's index in the alignment output, so names stay stable
// when review promotes a Verify record.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fasa/audio.hpp"
#include "fasa/core.hpp"
#include "fasa/hypothesis.hpp"
#include "fasa/pgc.hpp"

namespace fasa {

inline constexpr const char* kManifestName = "manifest.jsonl";
inline constexpr const char* kVerifyDir = "_verify";
inline constexpr const char* kPgcRemovedDir = "_pgc_removed";
inline constexpr const char* kPgcReportName = "pgc_report.json";
inline constexpr double kWordTrimPadS = 0.050;

struct EmitOptions {
  std::string speaker_id;
  std::string audio_id;
  // Replace the tree of a previous run in out_dir instead of refusing.
  bool overwrite = false;
  unsigned threads = 1;
};

// Writes the tree above. `audio` may be null, in which case only text files
// and the manifest are written. Throws IoError if out_dir holds anything and
// overwrite is off, DomainError if a clip rounds to zero samples.
DatasetManifest EmitDataset(std::span<const AlignmentRecord> records, const AudioBuffer* audio,
                            const EmitOptions& options, const std::string& out_dir);

// Tightens record boundaries to the first/last word stamp of their segment,
// padded by `pad_s` and clamped to the segment span. Records whose segment
// has no word stamps are left alone.
void TrimToWords(std::vector<AlignmentRecord>& records, const HypothesisSet& hyps, double pad_s = kWordTrimPadS);

// Clip file stem for record `index`: "<speaker>-<index>".
std::string ClipStem(const std::string& speaker, std::size_t index);

std::string SerializeManifest(const DatasetManifest& manifest);
DatasetManifest ParseManifest(std::string_view jsonl, const std::string& source = "<memory>");
DatasetManifest LoadManifest(const std::string& path);
// Replaces `path` atomically (write to a sibling temp file, then rename).
void SaveManifest(const DatasetManifest& manifest, const std::string& path);

// "H:MM:SS" with unpadded hours; seconds are rounded to the nearest whole
// second.
std::string FormatDuration(double seconds);

struct DatasetStats {
  std::size_t aligned = 0;
  std::size_t verify = 0;
  std::size_t dropped = 0;
  double duration_s = 0.0;
};

DatasetStats ComputeStats(const DatasetManifest& manifest);

// Fixed-order key:value block:
//   AU: <n>
//   VU: <n>
//   Dropped: <n>
//   Time: <H:MM:SS>
std::string FormatStats(const DatasetStats& stats);

// Applies a PGC report to an emitted dataset: removed records leave the
// manifest and their files move to _pgc_removed/; the report is written to
// pgc_report.json. Returns the rewritten manifest.
DatasetManifest ApplyPgcToDataset(const std::string& dataset_dir, const PgcReport& report);

}  // namespace fasa
