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

// fasa: align long audio with a noisy transcript and emit a segmented
// dataset.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "fasa/aligner.hpp"
#include "fasa/audio.hpp"
#include "fasa/dataset.hpp"
#include "fasa/hypothesis.hpp"
#include "fasa/json.hpp"
#include "fasa/pgc.hpp"
#include "fasa/review.hpp"
#include "fasa/sim.hpp"
#include "fasa/transcript.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

unsigned DefaultThreads() { return std::max(1u, std::thread::hardware_concurrency()); }

struct AlignArgs {
  std::string audio;
  std::string transcript;
  std::string transcript_format = "plain";
  std::string speakers = "all";
  std::string hypotheses;
  std::string backend_cmd;
  std::string backend_workdir;
  double sigma_a = 0.1;
  double sigma_i = 0.3;
  std::size_t window_slack = 3;
  std::size_t pgc_tolerance = 1;
  bool no_overlap = false;
  std::string distance_unit = "token";
  std::string speaker_id;
  std::string out;
  unsigned threads = DefaultThreads();
  bool trim_to_words = false;
  bool force = false;
};

struct PgcArgs {
  std::string dataset;
  std::string second_pass;
  std::size_t tolerance = 1;
};

struct EmitArgs {
  std::string manifest;
  std::string audio;
  std::string speaker_id;
  std::string out;
  unsigned threads = DefaultThreads();
  bool force = false;
};

struct StatsArgs {
  std::string dataset;
  std::string manifest;
};

struct SimulateArgs {
  std::size_t sentences = 100;
  std::size_t min_len = 8;
  std::size_t max_len = 15;
  std::size_t vocab = 5000;
  double token_error_rate = 0.05;
  double drop_rate = 0.1;
  bool shuffle = false;
  std::uint64_t seed = 7;
  std::string out;
  bool silent_audio = false;
};

struct EvaluateArgs {
  std::string truth;
  std::string manifest;
};

struct ReviewArgs {
  std::string dataset;
  std::string host = "127.0.0.1";
  int port = 8765;
  std::string ui_dir;
};

std::string SanitizeName(const std::string& raw) {
  std::string out;
  for (char c : fs::path(raw).stem().string()) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-') ? c : '_';
  }
  while (!out.empty() && (out.front() == '_' || out.front() == '.')) out.erase(out.begin());
  return out.empty() ? "speaker" : out;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw fasa::IoError("cannot write '" + path.string() + "'");
  out << text;
}

int RunAlign(const AlignArgs& a) {
  fasa::AlignConfig cfg;
  cfg.sigma_a = a.sigma_a;
  cfg.sigma_i = a.sigma_i;
  cfg.window_slack = a.window_slack;
  cfg.pgc_tolerance = a.pgc_tolerance;
  cfg.allow_overlap = !a.no_overlap;
  cfg.distance_unit = fasa::DistanceUnitFromString(a.distance_unit);
  cfg.Validate();
  if (a.hypotheses.empty() == a.backend_cmd.empty()) {
    throw fasa::ConfigError("exactly one of --hypotheses and --backend-cmd is required");
  }
  if (!a.backend_cmd.empty() && a.audio.empty()) throw fasa::ConfigError("--backend-cmd needs --audio");
  const auto format = fasa::TranscriptFormatFromString(a.transcript_format);

  auto raw = fasa::FilterSpeakers(fasa::LoadTranscript(a.transcript, format), a.speakers);
  auto transcript = fasa::Normalize(raw);
  spdlog::info("transcript: {} lines, {} tokens", raw.lines.size(), transcript.size());

  fasa::HypothesisSet hyps;
  if (!a.hypotheses.empty()) {
    hyps = fasa::LoadHypotheses(a.hypotheses);
  } else {
    // Default sits next to --out so the dataset directory stays clean.
    std::string workdir = a.backend_workdir.empty() ? a.out + ".backend" : a.backend_workdir;
    hyps = fasa::RunBackend(a.backend_cmd, a.audio, workdir);
  }
  spdlog::info("hypotheses: {} segments", hyps.segments.size());

  std::optional<fasa::AudioBuffer> audio;
  if (!a.audio.empty()) {
    audio = fasa::ReadWav(a.audio);
    if (hyps.sample_rate_hz && *hyps.sample_rate_hz != audio->sample_rate_hz) {
      spdlog::warn("hypothesis sample rate {} differs from audio sample rate {}", *hyps.sample_rate_hz,
                   audio->sample_rate_hz);
    }
    fasa::CheckAgainstDuration(hyps, audio->duration_s());
  } else {
    spdlog::warn("no --audio given; writing transcripts and manifest only");
  }

  auto records = fasa::AlignCorpus(hyps, transcript, cfg, a.threads);
  if (a.trim_to_words) fasa::TrimToWords(records, hyps);

  fasa::EmitOptions opts;
  opts.speaker_id = a.speaker_id.empty() ? SanitizeName(hyps.audio_id) : a.speaker_id;
  opts.audio_id = hyps.audio_id;
  opts.overwrite = a.force;
  opts.threads = a.threads;
  auto manifest = fasa::EmitDataset(records, audio ? &*audio : nullptr, opts, a.out);
  std::cout << fasa::FormatStats(fasa::ComputeStats(manifest));
  return 0;
}

int RunPgc(const PgcArgs& a) {
  const fs::path root(a.dataset);
  auto manifest = fasa::LoadManifest((root / fasa::kManifestName).string());
  auto second = fasa::LoadHypotheses(a.second_pass);
  std::vector<fasa::AlignmentRecord> records;
  for (const auto& e : manifest.entries) records.push_back(e.record);
  auto report = fasa::PgcFilter(records, second, a.tolerance);
  auto kept = fasa::ApplyPgcToDataset(a.dataset, report);
  std::cout << "PGCU: " << report.removed_count << "\n";
  std::cout << fasa::FormatStats(fasa::ComputeStats(kept));
  return 0;
}

int RunEmit(const EmitArgs& a) {
  auto manifest = fasa::LoadManifest(a.manifest);
  std::vector<fasa::AlignmentRecord> records;
  for (const auto& e : manifest.entries) records.push_back(e.record);
  std::optional<fasa::AudioBuffer> audio;
  if (!a.audio.empty()) audio = fasa::ReadWav(a.audio);
  fasa::EmitOptions opts;
  opts.speaker_id = !a.speaker_id.empty()                 ? a.speaker_id
                    : !manifest.entries.empty()           ? manifest.entries.front().speaker
                                                          : SanitizeName(manifest.audio_id);
  opts.audio_id = manifest.audio_id;
  opts.overwrite = a.force;
  opts.threads = a.threads;
  auto out = fasa::EmitDataset(records, audio ? &*audio : nullptr, opts, a.out);
  std::cout << fasa::FormatStats(fasa::ComputeStats(out));
  return 0;
}

int RunStats(const StatsArgs& a) {
  if (a.dataset.empty() == a.manifest.empty()) throw fasa::ConfigError("give exactly one of --dataset, --manifest");
  std::string path = a.manifest.empty() ? (fs::path(a.dataset) / fasa::kManifestName).string() : a.manifest;
  std::cout << fasa::FormatStats(fasa::ComputeStats(fasa::LoadManifest(path)));
  return 0;
}

int RunSimulate(const SimulateArgs& a) {
  namespace sim = fasa::sim;
  auto corpus = sim::GenerateCorpus(a.sentences, a.min_len, a.max_len, a.vocab, a.seed);
  sim::CorruptionSpec corruption;
  corruption.token_error_rate = a.token_error_rate;
  corruption.sentence_drop_rate = a.drop_rate;
  corruption.shuffle_sentences = a.shuffle;
  corruption.seed = a.seed;
  corruption.Validate();
  auto corrupted = sim::CorruptTranscript(corpus.sentences, corruption);
  const std::string corpus_id = "sim-" + std::to_string(a.seed);
  // Substitutions never use marker words, so markers stay unique to their sentence.
  std::vector<std::string> substitutions(corpus.vocab.begin() + static_cast<std::ptrdiff_t>(corpus.sentences.size()),
                                         corpus.vocab.end());
  auto hyps = sim::SynthHypotheses(corpus.sentences, substitutions, a.token_error_rate, a.seed, corpus_id);

  fs::create_directories(a.out);
  const fs::path root(a.out);
  std::string transcript;
  std::size_t line = 0;
  for (std::size_t t = 0; t < corrupted.transcript.size(); ++t) {
    if (t > 0 && corrupted.transcript.line_index[t] != line) {
      transcript += '\n';
      line = corrupted.transcript.line_index[t];
    } else if (t > 0) {
      transcript += ' ';
    }
    transcript += corrupted.transcript.originals[t];
  }
  if (!transcript.empty()) transcript += '\n';
  WriteText(root / "transcript.txt", transcript);

  if (a.silent_audio) {
    hyps.sample_rate_hz = 16000;
    fasa::AudioBuffer audio;
    audio.sample_rate_hz = 16000;
    double end = hyps.segments.empty() ? 1.0 : hyps.segments.back().end_s + 0.5;
    audio.samples.assign(static_cast<std::size_t>(fasa::FrameAt(audio, end)), 0);
    fasa::WriteWav(audio, (root / "audio.wav").string());
  }
  fasa::SaveHypotheses(hyps, (root / "hypotheses.json").string());

  sim::Truth truth;
  truth.corpus_id = corpus_id;
  for (std::size_t k = 0; k < corpus.sentences.size(); ++k) truth.segment_ids.push_back(sim::SegmentId(k));
  truth.sentences = corpus.sentences;
  truth.spans = corrupted.spans;
  WriteText(root / "truth.json", truth.ToJson().dump(2) + "\n");

  std::size_t dropped = 0;
  for (const auto& s : corrupted.spans) dropped += s ? 0 : 1;
  std::cout << "sentences: " << corpus.sentences.size() << "\ndropped: " << dropped
            << "\ntranscript tokens: " << corrupted.transcript.size() << "\n";
  return 0;
}

int RunEvaluate(const EvaluateArgs& a) {
  std::ifstream in(a.truth, std::ios::binary);
  if (!in) throw fasa::IoError("cannot read truth file '" + a.truth + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw fasa::ParseError(a.truth + ": " + e.what());
  }
  auto truth = fasa::sim::Truth::FromJson(j);
  auto report = fasa::sim::Evaluate(fasa::LoadManifest(a.manifest), truth);
  std::cout << report.Render();
  return 0;
}

int RunReviewServe(const ReviewArgs& a) {
  std::optional<std::string> ui;
  if (!a.ui_dir.empty()) ui = a.ui_dir;
  fasa::ReviewServer server(a.dataset, ui);
  int port = server.Bind(a.host, a.port);
  std::cout << "review server listening on http://" << a.host << ":" << port << "/" << std::endl;
  server.Serve();
  return 0;
}

int RunReviewMerge(const ReviewArgs& a) {
  auto summary = fasa::MergeDatasetDecisions(a.dataset);
  std::cout << "promoted: " << summary.promoted << "\nrejected: " << summary.rejected << "\n";
  auto manifest = fasa::LoadManifest((fs::path(a.dataset) / fasa::kManifestName).string());
  std::cout << fasa::FormatStats(fasa::ComputeStats(manifest));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("fasa"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Align long audio with a noisy transcript and emit a segmented speech dataset"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read flags from a TOML/INI file (flags on the command line win)");
  app.option_defaults()->always_capture_default();
  bool verbose = false;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");
  app.add_flag("-q,--quiet", quiet, "Only log errors");

  AlignArgs align;
  auto* cmd_align = app.add_subcommand("align", "Align hypotheses against a transcript and emit the dataset");
  cmd_align->add_option("--audio", align.audio, "Source audio (PCM WAV)");
  cmd_align->add_option("--transcript", align.transcript, "Provided transcript")->required();
  cmd_align->add_option("--transcript-format", align.transcript_format, "Transcript format")
      ->check(CLI::IsMember({"plain", "chat"}));
  cmd_align->add_option("--speakers", align.speakers, "CHAT speaker tag to keep, or 'all'");
  auto* opt_hyp = cmd_align->add_option("--hypotheses", align.hypotheses, "Hypothesis file from the ASR backend");
  auto* opt_backend =
      cmd_align->add_option("--backend-cmd", align.backend_cmd, "Backend command template with {audio} and {out}");
  opt_hyp->excludes(opt_backend);
  cmd_align->add_option("--backend-workdir", align.backend_workdir, "Working directory for the backend (default: <out>.backend)");
  cmd_align->add_option("--sigma-a", align.sigma_a, "Alignment WER threshold");
  cmd_align->add_option("--sigma-i", align.sigma_i, "Inclusion WER threshold");
  cmd_align->add_option("--window-slack", align.window_slack, "Window length slack in tokens");
  cmd_align->add_option("--pgc-tolerance", align.pgc_tolerance, "PGC length tolerance in tokens");
  cmd_align->add_flag("--no-overlap", align.no_overlap, "Forbid two utterances claiming the same transcript tokens");
  cmd_align->add_option("--distance-unit", align.distance_unit, "Window search distance unit")
      ->check(CLI::IsMember({"token", "character"}));
  cmd_align->add_option("--speaker-id", align.speaker_id, "Speaker directory name (default: from audio id)");
  cmd_align->add_option("--out", align.out, "Output dataset directory")->required();
  cmd_align->add_option("--threads", align.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd_align->add_flag("--trim-to-words", align.trim_to_words, "Tighten clips to word stamps (+/-50 ms)");
  cmd_align->add_flag("--force", align.force, "Replace a previous dataset in --out");

  PgcArgs pgc;
  auto* cmd_pgc = app.add_subcommand("pgc", "Post-generation check against a second-pass prediction");
  cmd_pgc->add_option("--dataset", pgc.dataset, "Dataset directory")->required();
  cmd_pgc->add_option("--second-pass", pgc.second_pass, "Second-pass hypothesis file")->required();
  cmd_pgc->add_option("--tolerance", pgc.tolerance, "Maximum sentence length difference in tokens");

  EmitArgs emit;
  auto* cmd_emit = app.add_subcommand("emit", "Re-emit a dataset tree from an existing manifest");
  cmd_emit->add_option("--manifest", emit.manifest, "Manifest file")->required();
  cmd_emit->add_option("--audio", emit.audio, "Source audio (PCM WAV)");
  cmd_emit->add_option("--speaker-id", emit.speaker_id, "Speaker directory name (default: from manifest)");
  cmd_emit->add_option("--out", emit.out, "Output dataset directory")->required();
  cmd_emit->add_option("--threads", emit.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd_emit->add_flag("--force", emit.force, "Replace a previous dataset in --out");

  StatsArgs stats;
  auto* cmd_stats = app.add_subcommand("stats", "Print AU / VU / total duration");
  cmd_stats->add_option("--dataset", stats.dataset, "Dataset directory");
  cmd_stats->add_option("--manifest", stats.manifest, "Manifest file");

  SimulateArgs simulate;
  auto* cmd_sim = app.add_subcommand("simulate", "Write a synthetic corpus with controlled corruption");
  cmd_sim->add_option("--sentences", simulate.sentences, "Number of sentences");
  cmd_sim->add_option("--min-len", simulate.min_len, "Minimum sentence length");
  cmd_sim->add_option("--max-len", simulate.max_len, "Maximum sentence length");
  cmd_sim->add_option("--vocab", simulate.vocab, "Vocabulary size");
  cmd_sim->add_option("--token-error-rate", simulate.token_error_rate, "Hypothesis substitution rate");
  cmd_sim->add_option("--drop-rate", simulate.drop_rate, "Fraction of sentences dropped from the transcript");
  cmd_sim->add_flag("--shuffle", simulate.shuffle, "Shuffle transcript sentence order");
  cmd_sim->add_option("--seed", simulate.seed, "Random seed");
  cmd_sim->add_option("--out", simulate.out, "Output directory")->required();
  cmd_sim->add_flag("--silent-audio", simulate.silent_audio, "Also write a silent audio.wav covering the segments");

  EvaluateArgs evaluate;
  auto* cmd_eval = app.add_subcommand("evaluate", "Score a manifest against a simulation truth file");
  cmd_eval->add_option("--truth", evaluate.truth, "truth.json from simulate")->required();
  cmd_eval->add_option("--manifest", evaluate.manifest, "Manifest to score")->required();

  ReviewArgs review;
  auto* cmd_review = app.add_subcommand("review", "Human review of the verify queue");
  cmd_review->require_subcommand(1);
  auto* cmd_serve = cmd_review->add_subcommand("serve", "Serve the review UI and API");
  cmd_serve->add_option("--dataset", review.dataset, "Dataset directory")->required();
  cmd_serve->add_option("--host", review.host, "Bind address");
  cmd_serve->add_option("--port", review.port, "Port (0 = any free port)");
  cmd_serve->add_option("--ui-dir", review.ui_dir, "Directory with built UI assets");
  auto* cmd_merge = cmd_review->add_subcommand("merge", "Merge logged decisions into the manifest");
  cmd_merge->add_option("--dataset", review.dataset, "Dataset directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : quiet ? spdlog::level::err : spdlog::level::info);

  try {
    if (*cmd_align) return RunAlign(align);
    if (*cmd_pgc) return RunPgc(pgc);
    if (*cmd_emit) return RunEmit(emit);
    if (*cmd_stats) return RunStats(stats);
    if (*cmd_sim) return RunSimulate(simulate);
    if (*cmd_eval) return RunEvaluate(evaluate);
    if (*cmd_serve) return RunReviewServe(review);
    if (*cmd_merge) return RunReviewMerge(review);
  } catch (const fasa::ConfigError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
