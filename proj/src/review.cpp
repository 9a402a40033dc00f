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

#include "fasa/review.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "fasa/dataset.hpp"
#include "fasa/json.hpp"
#include "fasa/transcript.hpp"

namespace fasa {

namespace fs = std::filesystem;
using nlohmann::json;

void ReviewDecision::Validate() const {
  if (record_id.empty()) throw ParseError("decision without record id");
  if (action == ReviewAction::kCustom) {
    if (!custom_text || custom_text->empty()) throw ParseError("custom decision needs custom_text");
    if (NormalizeText(*custom_text).empty()) throw ParseError("custom_text has no words");
  } else if (custom_text) {
    throw ParseError("custom_text is only allowed with action 'custom'");
  }
}

void to_json(json& j, const ReviewDecision& d) {
  j = json{{"id", d.record_id}, {"action", ToString(d.action)}, {"timestamp", d.timestamp}};
  if (d.custom_text) j["custom_text"] = *d.custom_text;
  if (d.reviewer) j["reviewer"] = *d.reviewer;
}

void from_json(const json& j, ReviewDecision& d) {
  d.record_id = RequireField<std::string>(j, "id");
  d.action = ReviewActionFromString(RequireField<std::string>(j, "action"));
  d.custom_text = OptionalField<std::string>(j, "custom_text");
  d.reviewer = OptionalField<std::string>(j, "reviewer");
  d.timestamp = OptionalField<std::string>(j, "timestamp").value_or("");
}

std::string UtcTimestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<ReviewDecision> ParseDecisionLog(std::string_view jsonl, const std::string& source) {
  std::vector<ReviewDecision> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < jsonl.size()) {
    std::size_t nl = jsonl.find('\n', pos);
    if (nl == std::string_view::npos) nl = jsonl.size();
    std::string_view line = jsonl.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      auto d = json::parse(line).get<ReviewDecision>();
      d.Validate();
      out.push_back(std::move(d));
    } catch (const json::exception& e) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<ReviewDecision> LoadDecisionLog(const std::string& path) {
  if (!fs::exists(path)) return {};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read decision log '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseDecisionLog(buf.str(), path);
}

void DecisionLog::Append(const ReviewDecision& decision) {
  decision.Validate();
  std::string line = json(decision).dump() + "\n";
  std::lock_guard lock(mu_);
  int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) throw IoError("cannot open decision log '" + path_ + "'");
  std::size_t done = 0;
  while (done < line.size()) {
    ssize_t n = ::write(fd, line.data() + done, line.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw IoError("write failed for '" + path_ + "'");
    }
    done += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
}

DatasetManifest MergeDecisions(DatasetManifest manifest, std::span<const ReviewDecision> decisions) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) index[manifest.entries[i].record.segment_id] = i;

  std::map<std::string, const ReviewDecision*> last;
  for (const auto& d : decisions) {
    if (!index.count(d.record_id)) throw DomainError("decision for unknown record '" + d.record_id + "'");
    last[d.record_id] = &d;
  }

  for (const auto& [id, d] : last) {
    AlignmentRecord& r = manifest.entries[index[id]].record;
    if (r.status != Status::kVerify && !r.review) {
      throw DomainError("record '" + id + "' is not in the verify queue");
    }
    if (!r.candidate_gt) r.candidate_gt = r.gt_text;
    r.review = d->action;
    switch (d->action) {
      case ReviewAction::kAcceptGt:
        r.status = Status::kAligned;
        r.gt_text = r.candidate_gt;
        break;
      case ReviewAction::kAcceptPred:
        r.status = Status::kAligned;
        r.gt_text = r.pred_text.tokens();
        break;
      case ReviewAction::kCustom:
        r.status = Status::kAligned;
        r.gt_text = NormalizeText(*d->custom_text).tokens();
        break;
      case ReviewAction::kReject:
        r.status = Status::kDropped;
        r.gt_text.reset();
        break;
    }
  }
  return manifest;
}

namespace {

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
}

// Moves `name` into `target` from whichever of `dirs` holds it.
std::optional<fs::path> Relocate(const fs::path& root, const std::vector<std::string>& dirs, const std::string& target,
                                 const std::string& name) {
  const fs::path dest = root / target / name;
  for (const auto& d : dirs) {
    const fs::path src = root / d / name;
    if (d != target && fs::exists(src)) {
      fs::create_directories(dest.parent_path());
      fs::rename(src, dest);
      return dest;
    }
  }
  if (fs::exists(dest)) return dest;
  return std::nullopt;
}

std::string Join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

}  // namespace

MergeSummary MergeDatasetDecisions(const std::string& dataset_dir) {
  const fs::path root(dataset_dir);
  const std::string manifest_path = (root / kManifestName).string();
  DatasetManifest before = LoadManifest(manifest_path);
  auto decisions = LoadDecisionLog((root / kDecisionLogName).string());
  DatasetManifest after = MergeDecisions(before, decisions);

  MergeSummary summary;
  for (std::size_t i = 0; i < after.entries.size(); ++i) {
    auto& e = after.entries[i];
    if (!e.record.review || e.stem.empty()) continue;
    const bool was_verify = before.entries[i].record.status == Status::kVerify;
    const bool promoted = e.record.status == Status::kAligned;
    if (was_verify) ++(promoted ? summary.promoted : summary.rejected);

    const std::vector<std::string> dirs = {kVerifyDir, e.speaker, kRejectedDir};
    const std::string target = promoted ? e.speaker : kRejectedDir;
    if (e.clip) {
      if (auto moved = Relocate(root, dirs, target, e.stem + ".wav")) {
        e.clip = fs::relative(*moved, root).generic_string();
      }
    }
    if (promoted) {
      fs::create_directories(root / target);
      WriteFile(root / target / (e.stem + ".txt"), Join(*e.record.gt_text) + "\n");
      fs::remove(root / kVerifyDir / (e.stem + ".txt"));
      fs::remove(root / kRejectedDir / (e.stem + ".txt"));
    } else {
      Relocate(root, dirs, target, e.stem + ".txt");
    }
  }
  SaveManifest(after, manifest_path);
  return summary;
}

json ReviewItems(const DatasetManifest& manifest) {
  json items = json::array();
  for (const auto& e : manifest.entries) {
    const auto& r = e.record;
    if (r.status != Status::kVerify) continue;
    items.push_back({{"id", r.segment_id},
                     {"gt_text", r.gt_text ? Join(*r.gt_text) : std::string()},
                     {"pred_text", r.pred_text.Joined()},
                     {"wer", r.wer.value_or(0.0)},
                     {"duration_s", r.end_s - r.start_s}});
  }
  // Worst matches first.
  std::stable_sort(items.begin(), items.end(),
                   [](const json& a, const json& b) { return a["wer"].get<double>() > b["wer"].get<double>(); });
  return items;
}

// ---------------------------------------------------------------------------
// Server

namespace {

constexpr const char* kBuiltinPage = R"html(<!doctype html>
<html><head><meta charset="utf-8"><title>fasa review</title>
<style>body{font-family:sans-serif;max-width:900px;margin:2em auto}li{margin:1em 0}
.done{opacity:.4}code{background:#eee;padding:0 .3em}</style></head>
<body><h1>Verify queue</h1><p id="status"></p><ol id="items"></ol>
<script>
async function decide(id, action, li) {
  const body = {id, action};
  if (action === 'custom') {
    const text = prompt('Transcription');
    if (!text) return;
    body.custom_text = text;
  }
  const res = await fetch('/api/decision', {method: 'POST', headers: {'Content-Type': 'application/json'},
                                            body: JSON.stringify(body)});
  if (res.ok) li.classList.add('done'); else alert('error ' + res.status + ': ' + await res.text());
}
async function load() {
  const status = document.getElementById('status');
  try {
    const items = await (await fetch('/api/items')).json();
    items.sort((a, b) => b.wer - a.wer);
    status.textContent = items.length ? items.length + ' items' : 'nothing to review';
    const ol = document.getElementById('items');
    for (const it of items) {
      const li = document.createElement('li');
      li.innerHTML = '<div>wer ' + it.wer.toFixed(3) + '</div><div>gt: <code></code></div>' +
                     '<div>pred: <code></code></div><audio controls preload="none"></audio><div></div>';
      const codes = li.querySelectorAll('code');
      codes[0].textContent = it.gt_text;
      codes[1].textContent = it.pred_text;
      li.querySelector('audio').src = '/api/audio/' + encodeURIComponent(it.id);
      for (const action of ['accept_gt', 'accept_pred', 'custom', 'reject']) {
        const b = document.createElement('button');
        b.textContent = action;
        b.onclick = () => decide(it.id, action, li);
        li.lastChild.appendChild(b);
      }
      ol.appendChild(li);
    }
  } catch (e) {
    status.textContent = 'cannot reach server: ' + e;
  }
}
load();
</script></body></html>
)html";

void SendError(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(json{{"error", message}}.dump(), "application/json");
}

}  // namespace

struct ReviewServer::Impl {
  fs::path root;
  DatasetManifest manifest;
  std::map<std::string, std::size_t> by_id;
  DecisionLog log;
  httplib::Server server;

  explicit Impl(std::string dir)
      : root(dir), manifest(LoadManifest((root / kManifestName).string())), log((root / kDecisionLogName).string()) {
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) by_id[manifest.entries[i].record.segment_id] = i;
  }
};

ReviewServer::ReviewServer(std::string dataset_dir, std::optional<std::string> ui_dir)
    : impl_(std::make_unique<Impl>(std::move(dataset_dir))) {
  Impl* s = impl_.get();
  // SO_REUSEADDR only: the default also sets SO_REUSEPORT, which would let a
  // second server silently share a port that is already in use.
  s->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });

  s->server.Get("/api/items", [s](const httplib::Request&, httplib::Response& res) {
    res.set_content(ReviewItems(s->manifest).dump(), "application/json");
  });

  s->server.Get(R"(/api/audio/([^/]+))", [s](const httplib::Request& req, httplib::Response& res) {
    auto it = s->by_id.find(req.matches[1]);
    if (it == s->by_id.end()) return SendError(res, 404, "unknown id");
    const auto& e = s->manifest.entries[it->second];
    if (!e.clip) return SendError(res, 404, "record has no clip");
    std::ifstream in(s->root / *e.clip, std::ios::binary);
    if (!in) return SendError(res, 404, "clip file missing");
    std::ostringstream buf;
    buf << in.rdbuf();
    res.set_content(buf.str(), "audio/wav");
  });

  s->server.Post("/api/decision", [s](const httplib::Request& req, httplib::Response& res) {
    ReviewDecision d;
    try {
      d = json::parse(req.body).get<ReviewDecision>();
      d.timestamp = UtcTimestamp();
      d.Validate();
    } catch (const json::exception& e) {
      return SendError(res, 400, e.what());
    } catch (const ParseError& e) {
      return SendError(res, 400, e.what());
    }
    auto it = s->by_id.find(d.record_id);
    if (it == s->by_id.end() || s->manifest.entries[it->second].record.status != Status::kVerify) {
      return SendError(res, 404, "no verify record '" + d.record_id + "'");
    }
    try {
      s->log.Append(d);
    } catch (const IoError& e) {
      return SendError(res, 500, e.what());
    }
    res.set_content(json{{"ok", true}}.dump(), "application/json");
  });

  if (ui_dir && fs::is_directory(*ui_dir)) {
    s->server.set_mount_point("/", *ui_dir);
  } else {
    s->server.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(kBuiltinPage, "text/html; charset=utf-8");
    });
  }
}

ReviewServer::~ReviewServer() { Stop(); }

int ReviewServer::Bind(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void ReviewServer::Serve() {
  if (!impl_->server.listen_after_bind()) spdlog::warn("review server stopped with an error");
}

void ReviewServer::Stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace fasa
