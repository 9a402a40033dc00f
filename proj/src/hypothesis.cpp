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

#include "fasa/hypothesis.hpp"

#include <spawn.h>
#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "fasa/json.hpp"

extern char** environ;

namespace fasa {

namespace fs = std::filesystem;
using nlohmann::json;

const HypothesisSegment* HypothesisSet::Find(std::string_view segment_id) const {
  for (const auto& s : segments) {
    if (s.segment_id == segment_id) return &s;
  }
  return nullptr;
}

HypothesisSet ParseHypotheses(std::string_view json_text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError(source + ": top level must be an object");

  HypothesisSet set;
  try {
    set.audio_id = RequireField<std::string>(doc, "audio");
    set.sample_rate_hz = OptionalField<int>(doc, "sample_rate");
    if (!doc.contains("segments") || !doc["segments"].is_array()) {
      throw ParseError("missing field 'segments'");
    }
    const auto& segs = doc["segments"];
    for (std::size_t i = 0; i < segs.size(); ++i) {
      try {
        set.segments.push_back(segs[i].get<HypothesisSegment>());
      } catch (const ParseError& e) {
        throw ParseError("segments[" + std::to_string(i) + "]: " + e.what());
      }
    }
  } catch (const ParseError& e) {
    throw ParseError(source + ": " + e.what());
  }
  if (set.sample_rate_hz && *set.sample_rate_hz <= 0) {
    throw ParseError(source + ": bad field 'sample_rate': must be positive");
  }

  std::set<std::string> seen;
  for (const auto& s : set.segments) {
    try {
      s.Validate();
    } catch (const ParseError& e) {
      throw ParseError(source + ": " + e.what());
    }
    if (!seen.insert(s.segment_id).second) {
      throw ParseError(source + ": duplicate segment id '" + s.segment_id + "'");
    }
  }

  auto by_start = [](const HypothesisSegment& a, const HypothesisSegment& b) { return a.start_s < b.start_s; };
  if (!std::is_sorted(set.segments.begin(), set.segments.end(), by_start)) {
    spdlog::warn("{}: segments out of time order; re-sorting by start time", source);
    std::stable_sort(set.segments.begin(), set.segments.end(), by_start);
  }
  return set;
}

HypothesisSet LoadHypotheses(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read hypothesis file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseHypotheses(buf.str(), path);
}

std::string SerializeHypotheses(const HypothesisSet& set) {
  json doc;
  doc["audio"] = set.audio_id;
  if (set.sample_rate_hz) doc["sample_rate"] = *set.sample_rate_hz;
  doc["segments"] = set.segments;
  return doc.dump(2) + "\n";
}

void SaveHypotheses(const HypothesisSet& set, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write hypothesis file '" + path + "'");
  out << SerializeHypotheses(set);
  if (!out) throw IoError("write failed for '" + path + "'");
}

void CheckAgainstDuration(const HypothesisSet& set, double duration_s) {
  for (const auto& s : set.segments) {
    if (s.end_s > duration_s + kWordSpanToleranceS) {
      throw DomainError("segment '" + s.segment_id + "' ends at " + std::to_string(s.end_s) +
                        " s, past the audio end (" + std::to_string(duration_s) + " s)");
    }
  }
}

namespace {

std::string ShellQuote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += "'";
  return out;
}

void ReplaceAll(std::string& s, std::string_view from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string ExpandBackendCommand(std::string_view command_template, const std::string& audio_path,
                                 const std::string& out_path) {
  if (command_template.find("{audio}") == std::string_view::npos ||
      command_template.find("{out}") == std::string_view::npos) {
    throw ConfigError("backend command must contain {audio} and {out} placeholders");
  }
  std::string cmd(command_template);
  ReplaceAll(cmd, "{audio}", ShellQuote(audio_path));
  ReplaceAll(cmd, "{out}", ShellQuote(out_path));
  return cmd;
}

HypothesisSet RunBackend(std::string_view command_template, const std::string& audio_path,
                         const std::string& workdir) {
  fs::create_directories(workdir);
  const fs::path out_path = fs::absolute(fs::path(workdir) / "hypotheses.json");
  const fs::path err_path = fs::absolute(fs::path(workdir) / "backend.stderr");
  fs::remove(out_path);

  std::string cmd = ExpandBackendCommand(command_template, fs::absolute(audio_path).string(), out_path.string());
  spdlog::info("running backend: {}", cmd);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, err_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  std::string sh = "/bin/sh";
  std::string dash_c = "-c";
  char* argv[] = {sh.data(), dash_c.data(), cmd.data(), nullptr};
  pid_t pid = 0;
  int rc = posix_spawn(&pid, sh.c_str(), &actions, nullptr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) throw BackendError("failed to spawn backend: " + std::string(std::strerror(rc)), -1, "");

  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw BackendError("waitpid failed", -1, "");
  }
  std::string err_text = ReadFile(err_path);
  int exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  if (exit_code != 0) {
    throw BackendError("backend exited with code " + std::to_string(exit_code) +
                           (err_text.empty() ? "" : ": " + err_text),
                       exit_code, err_text);
  }
  if (!fs::exists(out_path)) {
    throw BackendError("backend did not write " + out_path.string(), 0, err_text);
  }
  return LoadHypotheses(out_path.string());
}

}  // namespace fasa
