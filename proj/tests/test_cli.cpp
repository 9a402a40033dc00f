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

#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <map>

#include "fasa/dataset.hpp"
#include "fasa/hypothesis.hpp"
#include "fasa/json.hpp"
#include "fasa/review.hpp"
#include "test_util.hpp"

using namespace fasa;
using fasa::testing::Slurp;
using fasa::testing::Spit;
using fasa::testing::TempDir;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Fasa(const TempDir& dir, const std::string& args) {
  const std::string out = dir / "stdout.txt";
  const std::string err = dir / "stderr.txt";
  std::string cmd = std::string("'") + FASA_CLI_PATH + "' " + args + " >'" + out + "' 2>'" + err + "'";
  int status = std::system(cmd.c_str());
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, Slurp(out), Slurp(err)};
}

std::map<std::string, std::string> ReadTree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    out[fs::relative(e.path(), root).string()] = e.is_regular_file() ? Slurp(e.path()) : "<dir>";
  }
  return out;
}

// Small corpus with audio.
void MakeFixture(const TempDir& dir) {
  REQUIRE(Fasa(dir, "simulate --sentences 30 --vocab 500 --drop-rate 0.1 --shuffle --seed 3 --silent-audio --out '" +
                        (dir / "sim") + "'")
              .code == 0);
}

}  // namespace

TEST_CASE("help lists flags and defaults") {
  TempDir dir;
  auto top = Fasa(dir, "--help");
  CHECK(top.code == 0);
  for (const char* sub : {"align", "pgc", "emit", "stats", "simulate", "evaluate", "review"}) {
    CHECK(top.out.find(sub) != std::string::npos);
  }
  auto align = Fasa(dir, "align --help");
  CHECK(align.code == 0);
  for (const char* flag : {"--audio", "--transcript", "--transcript-format", "--hypotheses", "--backend-cmd",
                           "--sigma-a", "--sigma-i", "--window-slack", "--pgc-tolerance", "--no-overlap",
                           "--speaker-id", "--out", "--threads"}) {
    CHECK_MESSAGE(align.out.find(flag) != std::string::npos, flag);
  }
  CHECK(align.out.find("0.1") != std::string::npos);
  CHECK(align.out.find("0.3") != std::string::npos);
  auto sim = Fasa(dir, "simulate --help");
  CHECK(sim.out.find("--seed") != std::string::npos);
  auto serve = Fasa(dir, "review serve --help");
  CHECK(serve.out.find("--port") != std::string::npos);
  CHECK(serve.out.find("8765") != std::string::npos);
}

TEST_CASE("usage and configuration errors exit 2") {
  TempDir dir;
  MakeFixture(dir);
  const std::string base = "align --transcript '" + (dir / "sim/transcript.txt") + "' --out '" + (dir / "out") + "'";
  CHECK(Fasa(dir, "").code == 2);
  CHECK(Fasa(dir, "bogus").code == 2);
  CHECK(Fasa(dir, "align").code == 2);
  auto both = Fasa(dir, base + " --hypotheses '" + (dir / "sim/hypotheses.json") + "' --backend-cmd 'x {audio} {out}'");
  CHECK(both.code == 2);
  CHECK(Fasa(dir, base).code == 2);
  CHECK(Fasa(dir, base + " --hypotheses '" + (dir / "sim/hypotheses.json") + "' --sigma-a 0.5 --sigma-i 0.2").code == 2);
  CHECK(Fasa(dir, base + " --hypotheses '" + (dir / "sim/hypotheses.json") + "' --threads 0").code == 2);
  CHECK(Fasa(dir, base + " --hypotheses '" + (dir / "sim/hypotheses.json") + "' --transcript-format xml").code == 2);
  CHECK(Fasa(dir, "simulate --drop-rate 2 --out '" + (dir / "bad") + "'").code == 2);
}

TEST_CASE("runtime errors exit 1") {
  TempDir dir;
  MakeFixture(dir);
  auto missing = Fasa(dir, "align --transcript '" + (dir / "nope.txt") + "' --hypotheses '" +
                               (dir / "sim/hypotheses.json") + "' --out '" + (dir / "out") + "'");
  CHECK(missing.code == 1);
  CHECK(missing.err.find("nope.txt") != std::string::npos);
  Spit(dir.path() / "bad.json", "{\"audio\":\"a\",\"segments\":[{\"id\":\"x\",\"start\":0}]}");
  auto bad = Fasa(dir, "align --transcript '" + (dir / "sim/transcript.txt") + "' --hypotheses '" + (dir / "bad.json") +
                           "' --out '" + (dir / "out") + "'");
  CHECK(bad.code == 1);
  CHECK(bad.err.find("end") != std::string::npos);
  CHECK(Fasa(dir, "stats --dataset '" + (dir / "nowhere") + "'").code == 1);
}

TEST_CASE("align, stats, evaluate on a synthetic fixture") {
  TempDir dir;
  MakeFixture(dir);
  auto align = Fasa(dir, "align --audio '" + (dir / "sim/audio.wav") + "' --transcript '" +
                             (dir / "sim/transcript.txt") + "' --hypotheses '" + (dir / "sim/hypotheses.json") +
                             "' --out '" + (dir / "ds") + "' --threads 2");
  REQUIRE(align.code == 0);
  CHECK(align.out.find("AU: ") == 0);
  CHECK(align.out.find("Time: ") != std::string::npos);

  auto manifest = LoadManifest(dir / "ds/manifest.jsonl");
  CHECK(manifest.entries.size() == 30);
  CHECK(manifest.audio_id == "sim-3");
  CHECK(fs::is_directory(dir.path() / "ds" / "sim-3"));

  auto stats = Fasa(dir, "stats --dataset '" + (dir / "ds") + "'");
  CHECK(stats.code == 0);
  CHECK(stats.out == align.out);
  CHECK(Fasa(dir, "stats --manifest '" + (dir / "ds/manifest.jsonl") + "'").out == align.out);

  auto eval = Fasa(dir, "evaluate --truth '" + (dir / "sim/truth.json") + "' --manifest '" +
                            (dir / "ds/manifest.jsonl") + "'");
  CHECK(eval.code == 0);
  CHECK(eval.out.rfind("AU | VU | AU Error | AW | AW Error (%)\n", 0) == 0);
  CHECK(eval.out.find("False alignments: 0") != std::string::npos);

  // Refuses to overwrite without --force.
  const std::string again = "align --transcript '" + (dir / "sim/transcript.txt") + "' --hypotheses '" +
                            (dir / "sim/hypotheses.json") + "' --out '" + (dir / "ds") + "'";
  CHECK(Fasa(dir, again).code == 1);
  CHECK(Fasa(dir, again + " --force").code == 0);
}

TEST_CASE("default thresholds route a 0.2 WER segment to Verify") {
  TempDir dir;
  Spit(dir.path() / "t.txt", "one two three four five six seven eight nine ten\nalpha beta gamma delta\n");
  Spit(dir.path() / "h.json", R"({"audio":"fx","segments":[
    {"id":"a","start":0.0,"end":1.0,"text":"one two three four five six seven eight nine ten"},
    {"id":"b","start":1.0,"end":2.0,"text":"one two three four five six seven XX nine YY"},
    {"id":"c","start":2.0,"end":3.0,"text":"one XX three XX five XX"}]})");
  auto res = Fasa(dir, "align --transcript '" + (dir / "t.txt") + "' --hypotheses '" + (dir / "h.json") +
                           "' --out '" + (dir / "ds") + "'");
  REQUIRE(res.code == 0);
  CHECK(res.out == "AU: 1\nVU: 1\nDropped: 1\nTime: 0:00:01\n");
  auto m = LoadManifest(dir / "ds/manifest.jsonl");
  CHECK(m.entries[1].record.status == Status::kVerify);
  CHECK(fs::exists(dir.path() / "ds" / "fx" / "fx-0.txt"));
  CHECK(Slurp(dir.path() / "ds" / "_verify" / "fx-1.txt").rfind("gt: ", 0) == 0);

  // Thresholds from a config file; flags on the command line still win.
  Spit(dir.path() / "cfg.toml", "[align]\nsigma-a = 0.25\nsigma-i = 0.7\n");
  auto cfg = Fasa(dir, "--config '" + (dir / "cfg.toml") + "' align --transcript '" + (dir / "t.txt") +
                           "' --hypotheses '" + (dir / "h.json") + "' --out '" + (dir / "ds2") + "'");
  CHECK(cfg.code == 0);
  CHECK(cfg.out.find("AU: 2\nVU: 1\n") == 0);
  auto flag = Fasa(dir, "--config '" + (dir / "cfg.toml") + "' align --sigma-i 0.3 --transcript '" + (dir / "t.txt") +
                            "' --hypotheses '" + (dir / "h.json") + "' --out '" + (dir / "ds3") + "'");
  CHECK(flag.code == 0);
  CHECK(flag.out.find("AU: 2\nVU: 0\n") == 0);
}

TEST_CASE("chat transcript with a speaker filter") {
  TempDir dir;
  Spit(dir.path() / "t.cha",
       "@Begin\n*CHI:\tthe dog [!] ran away .\n*MOT:\twhere did it go ?\n%com:\tpoints\n*CHI:\tover there .\n@End\n");
  Spit(dir.path() / "h.json", R"({"audio":"c","segments":[
    {"id":"a","start":0.0,"end":1.0,"text":"The dog ran away."},
    {"id":"b","start":1.0,"end":2.0,"text":"where did it go"}]})");
  auto res = Fasa(dir, "align --transcript '" + (dir / "t.cha") + "' --transcript-format chat --speakers CHI" +
                           " --hypotheses '" + (dir / "h.json") + "' --out '" + (dir / "ds") + "'");
  REQUIRE(res.code == 0);
  auto m = LoadManifest(dir / "ds/manifest.jsonl");
  CHECK(m.entries[0].record.status == Status::kAligned);
  CHECK(m.entries[1].record.status == Status::kDropped);
}

TEST_CASE("backend command") {
  TempDir dir;
  MakeFixture(dir);
  Spit(dir.path() / "asr.sh", "#!/bin/sh\ncp '" + (dir / "sim/hypotheses.json") + "' \"$2\"\n");
  fs::permissions(dir.path() / "asr.sh", fs::perms::owner_all);
  const std::string common = "align --audio '" + (dir / "sim/audio.wav") + "' --transcript '" +
                             (dir / "sim/transcript.txt") + "' --threads 1";
  auto res = Fasa(dir, common + " --backend-cmd \"'" + (dir / "asr.sh") + "' {audio} {out}\" --out '" +
                           (dir / "ds") + "'");
  REQUIRE(res.code == 0);
  CHECK(fs::exists(dir.path() / "ds.backend" / "hypotheses.json"));
  REQUIRE(Fasa(dir, common + " --hypotheses '" + (dir / "sim/hypotheses.json") + "' --out '" + (dir / "ds2") + "'")
              .code == 0);
  CHECK(ReadTree(dir.path() / "ds") == ReadTree(dir.path() / "ds2"));

  Spit(dir.path() / "fail.sh", "#!/bin/sh\necho 'no gpu' >&2\nexit 3\n");
  fs::permissions(dir.path() / "fail.sh", fs::perms::owner_all);
  auto fail = Fasa(dir, common + " --backend-cmd \"'" + (dir / "fail.sh") + "' {audio} {out}\" --out '" +
                            (dir / "ds3") + "'");
  CHECK(fail.code == 1);
  CHECK(fail.err.find("no gpu") != std::string::npos);
  CHECK(Fasa(dir, common + " --backend-cmd 'asr {audio}' --out '" + (dir / "ds4") + "'").code == 2);
}

TEST_CASE("pgc subcommand") {
  TempDir dir;
  MakeFixture(dir);
  REQUIRE(Fasa(dir, "align --audio '" + (dir / "sim/audio.wav") + "' --transcript '" + (dir / "sim/transcript.txt") +
                        "' --hypotheses '" + (dir / "sim/hypotheses.json") + "' --out '" + (dir / "ds") + "'")
              .code == 0);
  auto before = LoadManifest(dir / "ds/manifest.jsonl");
  HypothesisSet second{"sim-3", std::nullopt, {}};
  std::size_t aligned_seen = 0;
  for (const auto& e : before.entries) {
    if (e.record.status != Status::kAligned) continue;
    std::string text;
    for (const auto& w : *e.record.gt_text) text += w + " ";
    if (aligned_seen++ < 2) text += "extra words here";
    second.segments.push_back({e.record.segment_id, e.record.start_s, e.record.end_s, text, std::nullopt});
  }
  REQUIRE(aligned_seen >= 3);
  SaveHypotheses(second, dir / "second.json");
  auto res = Fasa(dir, "pgc --dataset '" + (dir / "ds") + "' --second-pass '" + (dir / "second.json") + "'");
  REQUIRE(res.code == 0);
  CHECK(res.out.rfind("PGCU: 2\n", 0) == 0);
  auto after = LoadManifest(dir / "ds/manifest.jsonl");
  CHECK(after.total_aligned() == before.total_aligned() - 2);
  CHECK(fs::exists(dir.path() / "ds" / kPgcReportName));
  CHECK(Fasa(dir, "pgc --dataset '" + (dir / "ds") + "' --second-pass '" + (dir / "second.json") + "' --tolerance 5")
            .out.rfind("PGCU: 0\n", 0) == 0);
}

TEST_CASE("emit subcommand rebuilds the tree from a manifest") {
  TempDir dir;
  MakeFixture(dir);
  REQUIRE(Fasa(dir, "align --audio '" + (dir / "sim/audio.wav") + "' --transcript '" + (dir / "sim/transcript.txt") +
                        "' --hypotheses '" + (dir / "sim/hypotheses.json") + "' --out '" + (dir / "ds") + "'")
              .code == 0);
  auto res = Fasa(dir, "emit --manifest '" + (dir / "ds/manifest.jsonl") + "' --audio '" + (dir / "sim/audio.wav") +
                           "' --out '" + (dir / "copy") + "'");
  REQUIRE(res.code == 0);
  CHECK(ReadTree(dir.path() / "ds") == ReadTree(dir.path() / "copy"));
}

TEST_CASE("review merge subcommand") {
  TempDir dir;
  Spit(dir.path() / "t.txt", "one two three four five six seven eight nine ten\n");
  Spit(dir.path() / "h.json", R"({"audio":"fx","segments":[
    {"id":"b","start":0.0,"end":1.0,"text":"one two XX four five six seven YY nine ten"}]})");
  REQUIRE(Fasa(dir, "align --transcript '" + (dir / "t.txt") + "' --hypotheses '" + (dir / "h.json") + "' --out '" +
                        (dir / "ds") + "'")
              .code == 0);
  Spit(dir.path() / "ds" / kDecisionLogName, "{\"id\":\"b\",\"action\":\"accept_gt\",\"timestamp\":\"t\"}\n");
  auto res = Fasa(dir, "review merge --dataset '" + (dir / "ds") + "'");
  REQUIRE(res.code == 0);
  CHECK(res.out.rfind("promoted: 1\nrejected: 0\nAU: 1\n", 0) == 0);
  CHECK(Slurp(dir.path() / "ds" / "fx" / "fx-0.txt") == "one two three four five six seven eight nine ten\n");

  Spit(dir.path() / "ds" / kDecisionLogName, "{\"id\":\"zzz\",\"action\":\"reject\",\"timestamp\":\"t\"}\n");
  CHECK(Fasa(dir, "review merge --dataset '" + (dir / "ds") + "'").code == 1);
}

TEST_CASE("align output does not depend on the thread count") {
  TempDir dir;
  REQUIRE(Fasa(dir, "simulate --sentences 60 --drop-rate 0.1 --shuffle --seed 5 --silent-audio --out '" +
                        (dir / "sim") + "'")
              .code == 0);
  const std::string common = "align --audio '" + (dir / "sim/audio.wav") + "' --transcript '" +
                             (dir / "sim/transcript.txt") + "' --hypotheses '" + (dir / "sim/hypotheses.json") + "'";
  REQUIRE(Fasa(dir, common + " --threads 1 --out '" + (dir / "a") + "'").code == 0);
  REQUIRE(Fasa(dir, common + " --threads 4 --out '" + (dir / "b") + "'").code == 0);
  CHECK(ReadTree(dir.path() / "a") == ReadTree(dir.path() / "b"));

  REQUIRE(Fasa(dir, "simulate --sentences 60 --drop-rate 0.1 --shuffle --seed 5 --silent-audio --out '" +
                        (dir / "sim2") + "'")
              .code == 0);
  CHECK(ReadTree(dir.path() / "sim") == ReadTree(dir.path() / "sim2"));
}
