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

#include "fasa/dataset.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fasa/json.hpp"

namespace fasa {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string JoinSurface(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void MoveIfExists(const fs::path& from, const fs::path& to) {
  if (!fs::exists(from)) return;
  fs::create_directories(to.parent_path());
  fs::rename(from, to);
}

}  // namespace

std::string ClipStem(const std::string& speaker, std::size_t index) {
  return speaker + "-" + std::to_string(index);
}

DatasetManifest EmitDataset(std::span<const AlignmentRecord> records, const AudioBuffer* audio,
                            const EmitOptions& options, const std::string& out_dir) {
  if (options.speaker_id.empty() || options.speaker_id.find('/') != std::string::npos ||
      options.speaker_id.front() == '_' || options.speaker_id.front() == '.') {
    throw ConfigError("speaker id must be a non-empty plain name not starting with '_' or '.'");
  }
  const fs::path root(out_dir);
  const fs::path speaker_dir = root / options.speaker_id;
  const fs::path verify_dir = root / kVerifyDir;

  if (fs::exists(root) && !fs::is_empty(root)) {
    if (!options.overwrite) throw IoError("output directory '" + out_dir + "' is not empty");
    fs::remove_all(speaker_dir);
    fs::remove_all(verify_dir);
    fs::remove_all(root / kPgcRemovedDir);
    fs::remove(root / kManifestName);
    fs::remove(root / kPgcReportName);
  }
  fs::create_directories(speaker_dir);
  fs::create_directories(verify_dir);

  DatasetManifest manifest;
  manifest.audio_id = options.audio_id;
  manifest.entries.resize(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& e = manifest.entries[i];
    e.record = records[i];
    e.audio_id = options.audio_id;
    e.speaker = options.speaker_id;
    if (e.record.status == Status::kDropped) continue;
    if (!e.record.gt_text) throw DomainError("record '" + e.record.segment_id + "' has no gt_text");
    const std::string dir = e.record.status == Status::kAligned ? options.speaker_id : kVerifyDir;
    const std::string stem = ClipStem(options.speaker_id, i);
    e.stem = stem;
    if (audio) {
      e.clip = dir + "/" + stem + ".wav";
      e.sample_begin = FrameAt(*audio, e.record.start_s);
      e.sample_end = FrameAt(*audio, e.record.end_s);
    }
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(records.size());
  auto work = [&] {
    for (std::size_t i = next++; i < records.size(); i = next++) {
      const auto& e = manifest.entries[i];
      if (e.record.status == Status::kDropped) continue;
      try {
        const bool aligned = e.record.status == Status::kAligned;
        const fs::path dir = aligned ? speaker_dir : verify_dir;
        const std::string& stem = e.stem;
        std::string text = JoinSurface(*e.record.gt_text) + "\n";
        if (!aligned) text = "gt: " + JoinSurface(*e.record.gt_text) + "\npred: " + e.record.pred_text.Joined() + "\n";
        WriteText(dir / (stem + ".txt"), text);
        if (audio) WriteWav(CutClip(*audio, e.record.start_s, e.record.end_s), (dir / (stem + ".wav")).string());
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  unsigned threads = std::max(1u, options.threads);
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  SaveManifest(manifest, (root / kManifestName).string());
  return manifest;
}

void TrimToWords(std::vector<AlignmentRecord>& records, const HypothesisSet& hyps, double pad_s) {
  for (auto& rec : records) {
    const HypothesisSegment* seg = hyps.Find(rec.segment_id);
    if (!seg || !seg->words || seg->words->empty()) continue;
    double start = std::max(seg->start_s, seg->words->front().start_s - pad_s);
    double end = std::min(seg->end_s, seg->words->back().end_s + pad_s);
    if (start < end) {
      rec.start_s = start;
      rec.end_s = end;
    }
  }
}

std::string SerializeManifest(const DatasetManifest& manifest) {
  std::string out;
  for (const auto& e : manifest.entries) {
    out += json(e).dump();
    out += '\n';
  }
  return out;
}

DatasetManifest ParseManifest(std::string_view jsonl, const std::string& source) {
  DatasetManifest manifest;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::set<std::string> seen;
  while (pos < jsonl.size()) {
    std::size_t nl = jsonl.find('\n', pos);
    if (nl == std::string_view::npos) nl = jsonl.size();
    std::string_view line = jsonl.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      ManifestEntry e = json::parse(line).get<ManifestEntry>();
      if (!seen.insert(e.record.segment_id).second) {
        throw ParseError("duplicate segment id '" + e.record.segment_id + "'");
      }
      if (manifest.entries.empty()) manifest.audio_id = e.audio_id;
      manifest.entries.push_back(std::move(e));
    } catch (const json::exception& e) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return manifest;
}

DatasetManifest LoadManifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read manifest '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseManifest(buf.str(), path);
}

void SaveManifest(const DatasetManifest& manifest, const std::string& path) {
  const std::string tmp = path + ".tmp";
  WriteText(tmp, SerializeManifest(manifest));
  fs::rename(tmp, path);
}

std::string FormatDuration(double seconds) {
  auto total = static_cast<long long>(std::llround(std::max(0.0, seconds)));
  return fmt::format("{}:{:02}:{:02}", total / 3600, (total / 60) % 60, total % 60);
}

DatasetStats ComputeStats(const DatasetManifest& manifest) {
  DatasetStats s;
  s.aligned = manifest.total_aligned();
  s.verify = manifest.total_verify();
  s.dropped = manifest.entries.size() - s.aligned - s.verify;
  s.duration_s = manifest.total_duration_s();
  return s;
}

std::string FormatStats(const DatasetStats& stats) {
  return fmt::format("AU: {}\nVU: {}\nDropped: {}\nTime: {}\n", stats.aligned, stats.verify, stats.dropped,
                     FormatDuration(stats.duration_s));
}

DatasetManifest ApplyPgcToDataset(const std::string& dataset_dir, const PgcReport& report) {
  const fs::path root(dataset_dir);
  DatasetManifest manifest = LoadManifest((root / kManifestName).string());
  std::set<std::string> removed(report.removed.begin(), report.removed.end());

  DatasetManifest kept;
  kept.audio_id = manifest.audio_id;
  for (auto& e : manifest.entries) {
    if (!removed.count(e.record.segment_id)) {
      kept.entries.push_back(std::move(e));
      continue;
    }
    const fs::path to_dir = root / kPgcRemovedDir;
    if (e.clip) MoveIfExists(root / *e.clip, to_dir / fs::path(*e.clip).filename());
    if (!e.stem.empty()) MoveIfExists(root / e.speaker / (e.stem + ".txt"), to_dir / (e.stem + ".txt"));
    spdlog::info("pgc removed '{}'", e.record.segment_id);
  }

  WriteText(root / kPgcReportName, report.ToJson().dump(2) + "\n");
  SaveManifest(kept, (root / kManifestName).string());
  return kept;
}

}  // namespace fasa
