// tools/awe_main.cpp

// Copyright 2026  AWE Toolkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "awe/archive.hpp"
#include "awe/dtw.hpp"
#include "awe/errors.hpp"
#include "awe/eval.hpp"
#include "awe/manifest.hpp"
#include "awe/mfcc.hpp"
#include "awe/model.hpp"
#include "awe/run_manifest.hpp"
#include "awe/synth.hpp"
#include "awe/train.hpp"
#include "awe/version.hpp"
#include "awe/wav.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitDataFormat = 3;
constexpr int kExitNumeric = 4;

int thread_count(std::size_t jobs) {
  unsigned n = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("AWE_THREADS")) {
    const long v = std::atol(env);
    if (v >= 1) n = static_cast<unsigned>(v);
  }
  if (n < 1) n = 1;
  if (n > jobs) n = static_cast<unsigned>(jobs == 0 ? 1 : jobs);
  return static_cast<int>(n);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw awe::IoError("cannot write: " + path);
  out << text;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw awe::IoError("cannot open: " + path);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string out_dir;
  awe::SynthConfig cfg;
};

int cmd_synth(const SynthArgs& args) {
  const std::vector<awe::WordSegment> segments =
      awe::synth_corpus(args.cfg, args.out_dir);
  awe::RunManifest rm;
  rm.command = "synth";
  rm.config = {{"words", args.cfg.n_words},
               {"speakers", args.cfg.n_speakers},
               {"tokens", args.cfg.tokens_per_speaker},
               {"seed", args.cfg.seed},
               {"noise", args.cfg.noise_level}};
  rm.outputs = {{"dir", args.out_dir},
                {"manifest",
                 (std::filesystem::path(args.out_dir) / "manifest.tsv").string()},
                {"segments", segments.size()}};
  rm.write(awe::run_manifest_path(args.out_dir, true));
  std::cout << "wrote " << segments.size() << " segments to " << args.out_dir
            << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// mfcc
// ---------------------------------------------------------------------------

struct MfccArgs {
  std::string manifest;
  std::string audio_root = ".";
  std::string out_archive;
  std::string config_path;
  bool allow_missing = false;
};

awe::MfccConfig parse_mfcc_config(const std::string& path) {
  awe::MfccConfig cfg;
  if (path.empty()) return cfg;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw awe::ParseError("bad MFCC config " + path + ": " + e.what());
  }
  if (j.contains("sample_rate")) cfg.sample_rate = j["sample_rate"].get<int>();
  if (j.contains("window_s")) cfg.window_s = j["window_s"].get<double>();
  if (j.contains("hop_s")) cfg.hop_s = j["hop_s"].get<double>();
  if (j.contains("fft_size")) cfg.fft_size = j["fft_size"].get<std::size_t>();
  if (j.contains("n_mels")) cfg.n_mels = j["n_mels"].get<std::size_t>();
  if (j.contains("n_ceps")) cfg.n_ceps = j["n_ceps"].get<std::size_t>();
  if (j.contains("pre_emphasis"))
    cfg.pre_emphasis = j["pre_emphasis"].get<double>();
  if (j.contains("delta_window"))
    cfg.delta_window = j["delta_window"].get<std::size_t>();
  if (j.contains("floor")) cfg.floor = j["floor"].get<double>();
  return cfg;
}

int cmd_mfcc(const MfccArgs& args) {
  const awe::MfccConfig cfg = parse_mfcc_config(args.config_path);
  cfg.validate();
  if (cfg.sample_rate != awe::kSampleRate)
    throw awe::ArgumentError("only 16 kHz audio is supported");
  const std::vector<awe::WordSegment> segments =
      awe::load_manifest(args.manifest);

  std::map<std::string, awe::FeatureMatrix> entries;
  std::size_t skipped = 0;
  for (const awe::WordSegment& seg : segments) {
    const std::string wav_path =
        (std::filesystem::path(args.audio_root) / seg.audio_path).string();
    std::vector<float> samples;
    try {
      samples = awe::read_wav_segment(wav_path, seg.start_s, seg.end_s);
    } catch (const awe::IoError& e) {
      std::cerr << "warning: skipping " << seg.segment_id << ": " << e.what()
                << "\n";
      ++skipped;
      continue;
    }
    entries[seg.segment_id] = awe::mfcc(samples, cfg);
  }
  awe::write_archive(entries, args.out_archive);

  awe::RunManifest rm;
  rm.command = "mfcc";
  rm.config = {{"sample_rate", cfg.sample_rate}, {"window_s", cfg.window_s},
               {"hop_s", cfg.hop_s},             {"fft_size", cfg.fft_size},
               {"n_mels", cfg.n_mels},           {"n_ceps", cfg.n_ceps},
               {"pre_emphasis", cfg.pre_emphasis},
               {"delta_window", cfg.delta_window},
               {"floor", cfg.floor},
               {"allow_missing", args.allow_missing}};
  rm.inputs = {{"manifest", args.manifest}, {"audio_root", args.audio_root}};
  rm.outputs = {{"archive", args.out_archive},
                {"entries", entries.size()},
                {"skipped", skipped}};
  rm.write(awe::run_manifest_path(args.out_archive, true));

  std::cout << "extracted " << entries.size() << " segments";
  if (skipped > 0) std::cout << " (" << skipped << " skipped)";
  std::cout << "\n";
  if (skipped > 0 && !args.allow_missing) {
    std::cerr << "error: " << skipped
              << " segments had missing audio (use --allow-missing to accept)\n";
    return kExitUsage;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// pairs
// ---------------------------------------------------------------------------

struct PairsArgs {
  std::string manifest;
  std::string variant = "both";
  std::uint64_t seed = 0;
  std::size_t cap = 10;
  std::string out;
};

int cmd_pairs(const PairsArgs& args) {
  const std::vector<awe::WordSegment> segments =
      awe::load_manifest(args.manifest);
  awe::Rng rng(args.seed);
  std::vector<awe::AbxTriple> triples;
  std::size_t skipped_pairs = 0, contrast_pairs = 0;
  auto run_variant = [&](awe::AbxVariant v) {
    awe::AbxTaskSet set = awe::build_abx_tasks(segments, v, rng, args.cap);
    triples.insert(triples.end(), set.triples.begin(), set.triples.end());
    skipped_pairs += set.skipped_pairs;
    contrast_pairs += set.contrast_pairs;
  };
  if (args.variant == "within" || args.variant == "both")
    run_variant(awe::AbxVariant::kWithinSpeaker);
  if (args.variant == "across" || args.variant == "both")
    run_variant(awe::AbxVariant::kAcrossSpeaker);
  if (args.variant != "within" && args.variant != "across" &&
      args.variant != "both")
    throw awe::ArgumentError("--variant must be within, across, or both");

  write_text_file(args.out, awe::abx_tasks_tsv(triples));
  awe::RunManifest rm;
  rm.command = "pairs";
  rm.config = {{"variant", args.variant}, {"seed", args.seed}, {"cap", args.cap}};
  rm.inputs = {{"manifest", args.manifest}};
  rm.outputs = {{"tasks", args.out},
                {"triples", triples.size()},
                {"contrast_pairs", contrast_pairs},
                {"skipped_pairs", skipped_pairs}};
  rm.write(awe::run_manifest_path(args.out, false));

  if (triples.empty())
    std::cerr << "warning: no ABX triples could be built from this manifest\n";
  std::cout << "wrote " << triples.size() << " triples (" << contrast_pairs
            << " contrast pairs, " << skipped_pairs << " skipped)\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string archive;
  std::string manifest;
  std::string mode = "self";
  std::string targets = "chars";
  std::size_t hidden = 100;
  std::size_t layers = 2;
  double dropout = 0.3;
  std::size_t max_frames = 400;
  std::string optimizer = "adam";
  double lr = 0.0;  // 0 = per-optimizer default
  std::string schedule;
  double step_factor = 0.5;
  int step_period = 10;
  double cyc_min = 0.01;
  double cyc_max = 0.1;
  int cyc_steps = 100;
  std::size_t batch = 32;
  int epochs = 50;
  std::uint64_t seed = 0;
  double grad_clip = 5.0;
  std::string out_model;
};

int cmd_train(const TrainArgs& args) {
  if (args.mode != "self" && args.mode != "super")
    throw awe::ArgumentError("--mode must be self or super");
  if (args.targets != "chars")
    throw awe::ArgumentError("--targets supports only 'chars'");
  const bool supervised = args.mode == "super";
  if (supervised && args.manifest.empty())
    throw awe::ArgumentError(
        "supervised training needs --manifest for word labels");

  const awe::FeatureArchive archive = awe::read_archive(args.archive);
  if (archive.entries.empty())
    throw awe::ArgumentError("archive is empty: " + args.archive);

  std::map<std::string, std::string> words;
  if (!args.manifest.empty()) {
    for (const awe::WordSegment& seg : awe::load_manifest(args.manifest))
      words[seg.segment_id] = seg.word;
  }

  std::vector<awe::TrainItem> items;
  std::vector<std::string> used_words;
  for (const auto& [id, fm] : archive.entries) {
    awe::TrainItem item;
    item.features = fm;
    if (supervised) {
      auto it = words.find(id);
      if (it == words.end())
        throw awe::ArgumentError("segment '" + id +
                                 "' has no manifest entry to take a target from");
      item.target = awe::char_target(it->second);
      used_words.push_back(it->second);
    }
    items.push_back(std::move(item));
  }

  awe::AweConfig mc;
  mc.input_dim = archive.dim;
  mc.hidden = args.hidden;
  mc.encoder_layers = args.layers;
  mc.mode = supervised ? awe::AweMode::kSupervised
                       : awe::AweMode::kSelfSupervised;
  if (supervised) mc.vocab = awe::build_char_vocab(used_words);
  mc.dropout_p = args.dropout;
  mc.max_frames = args.max_frames;

  awe::TrainConfig tc;
  tc.optimizer = args.optimizer == "sgd" ? awe::OptimizerKind::kSgd
                                         : awe::OptimizerKind::kAdam;
  if (args.optimizer != "adam" && args.optimizer != "sgd")
    throw awe::ArgumentError("--optimizer must be adam or sgd");
  tc.lr = args.lr > 0.0
              ? args.lr
              : (tc.optimizer == awe::OptimizerKind::kAdam ? 1e-3 : 0.1);
  std::string schedule = args.schedule;
  if (schedule.empty())
    schedule = tc.optimizer == awe::OptimizerKind::kAdam ? "constant" : "step";
  if (schedule == "constant")
    tc.schedule = awe::ScheduleKind::kConstant;
  else if (schedule == "step")
    tc.schedule = awe::ScheduleKind::kStep;
  else if (schedule == "cyclical")
    tc.schedule = awe::ScheduleKind::kCyclicalTriangular;
  else
    throw awe::ArgumentError("--schedule must be constant, step, or cyclical");
  tc.step_factor = args.step_factor;
  tc.step_period_epochs = args.step_period;
  tc.cyc_lr_min = args.cyc_min;
  tc.cyc_lr_max = args.cyc_max;
  tc.cyc_steps = args.cyc_steps;
  tc.batch_size = args.batch;
  tc.epochs = args.epochs;
  tc.seed = args.seed;
  tc.grad_clip = args.grad_clip;

  awe::Rng init_rng(args.seed);
  awe::AweModel model = awe::AweModel::randomized(mc, init_rng);
  const awe::TrainResult result = awe::train(model, items, tc);
  model.save_checkpoint(args.out_model);
  const std::string log_path = args.out_model + ".losses.tsv";
  awe::write_loss_log(result.log, log_path);

  awe::RunManifest rm;
  rm.command = "train";
  rm.config = {{"mode", args.mode},
               {"targets", args.targets},
               {"hidden", mc.hidden},
               {"layers", mc.encoder_layers},
               {"dropout", mc.dropout_p},
               {"max_frames", mc.max_frames},
               {"vocab_size", mc.vocab.size()},
               {"optimizer", to_string(tc.optimizer)},
               {"lr", tc.lr},
               {"schedule", to_string(tc.schedule)},
               {"batch_size", tc.batch_size},
               {"epochs", tc.epochs},
               {"seed", tc.seed},
               {"grad_clip", tc.grad_clip}};
  rm.inputs = {{"archive", args.archive}, {"manifest", args.manifest}};
  rm.outputs = {{"model", args.out_model},
                {"loss_log", log_path},
                {"best_epoch", result.best_epoch},
                {"best_loss", result.best_loss},
                {"skipped_over_length", result.skipped_over_length}};
  rm.write(awe::run_manifest_path(args.out_model, false));

  std::cout << "trained " << items.size() << " segments, best epoch "
            << result.best_epoch << " loss " << result.best_loss << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// embed
// ---------------------------------------------------------------------------

struct EmbedArgs {
  std::string model;
  std::string archive;
  std::string out_archive;
};

int cmd_embed(const EmbedArgs& args) {
  const awe::AweModel model = awe::AweModel::load_checkpoint(args.model);
  const awe::FeatureArchive archive = awe::read_archive(args.archive);
  std::map<std::string, awe::FeatureMatrix> entries;
  for (const auto& [id, fm] : archive.entries) {
    awe::Embedding e = model.embed(fm);
    awe::FeatureMatrix out;
    out.data = awe::MatF(1, e.vector.size());
    for (std::size_t i = 0; i < e.vector.size(); ++i)
      out.data(0, i) = static_cast<float>(e.vector[i]);
    out.frame_shift_s = 0.0;
    out.feature_kind = "awe-embedding";
    entries[id] = std::move(out);
  }
  awe::write_archive(entries, args.out_archive);

  awe::RunManifest rm;
  rm.command = "embed";
  rm.config = {{"hidden", model.config().hidden},
               {"layers", model.config().encoder_layers},
               {"mode", to_string(model.config().mode)},
               {"embedding_dim", model.config().embedding_dim()}};
  rm.inputs = {{"model", args.model}, {"archive", args.archive}};
  rm.outputs = {{"archive", args.out_archive}, {"entries", entries.size()}};
  rm.write(awe::run_manifest_path(args.out_archive, true));
  std::cout << "embedded " << entries.size() << " segments at dimension "
            << model.config().embedding_dim() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// abx
// ---------------------------------------------------------------------------

struct AbxArgs {
  std::string tasks;
  std::string source;
  std::string metric = "cosine";
  std::string out_report;
};

int cmd_abx(const AbxArgs& args) {
  if (args.metric != "dtw" && args.metric != "cosine")
    throw awe::ArgumentError("--metric must be dtw or cosine");
  const std::vector<awe::AbxTriple> triples =
      awe::parse_abx_tasks_tsv(read_text_file(args.tasks));
  const awe::FeatureArchive archive = awe::read_archive(args.source);

  bool all_single_frame = true;
  std::string kind;
  for (const auto& [id, fm] : archive.entries) {
    if (fm.frames() != 1) all_single_frame = false;
    kind = fm.feature_kind;
  }
  const bool embedding_archive =
      all_single_frame || kind.find("embedding") != std::string::npos;
  if (args.metric == "dtw" && embedding_archive)
    throw awe::ArgumentError(
        "dtw metric needs frame features, but the source looks like an "
        "embedding archive");
  if (args.metric == "cosine" && !all_single_frame)
    throw awe::ArgumentError(
        "cosine metric needs an embedding archive (one row per segment)");

  auto lookup = [&archive](const std::string& id) -> const awe::FeatureMatrix& {
    auto it = archive.entries.find(id);
    if (it == archive.entries.end())
      throw awe::LookupError("segment '" + id + "' not present in archive");
    return it->second;
  };

  // Unique (x, ref) pairs, computed once and in parallel when available.
  std::map<std::pair<std::string, std::string>, double> cache;
  std::vector<std::pair<std::string, std::string>> jobs;
  for (const awe::AbxTriple& t : triples) {
    for (const std::string& ref : {t.a, t.b}) {
      auto key = std::make_pair(t.x, ref);
      if (cache.emplace(key, 0.0).second) jobs.push_back(key);
    }
  }
  for (const auto& [x, ref] : jobs) {
    lookup(x);
    lookup(ref);
  }
  const awe::DtwConfig dtw_cfg;
  std::vector<double> results(jobs.size());
  auto compute = [&](std::size_t i) {
    const awe::FeatureMatrix& fx = lookup(jobs[i].first);
    const awe::FeatureMatrix& fr = lookup(jobs[i].second);
    if (args.metric == "dtw") {
      results[i] = awe::dtw_distance(fx, fr, dtw_cfg);
    } else {
      results[i] = awe::cosine_distance(fx.data.row(0), fr.data.row(0),
                                        fx.data.cols());
    }
  };
  const int n_threads = thread_count(jobs.size());
  if (n_threads <= 1 || jobs.size() < 2) {
    for (std::size_t i = 0; i < jobs.size(); ++i) compute(i);
  } else {
    std::vector<std::thread> workers;
    for (int w = 0; w < n_threads; ++w) {
      workers.emplace_back([&, w]() {
        for (std::size_t i = static_cast<std::size_t>(w); i < jobs.size();
             i += static_cast<std::size_t>(n_threads))
          compute(i);
      });
    }
    for (std::thread& t : workers) t.join();
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) cache[jobs[i]] = results[i];

  const awe::AbxReport report = awe::score_abx(
      triples, [&cache](const std::string& x, const std::string& ref) {
        return cache.at(std::make_pair(x, ref));
      });

  const std::string source_label =
      kind.empty() ? std::string("features") : kind;
  write_text_file(args.out_report, awe::abx_report_tsv(report));
  write_text_file(args.out_report + ".txt",
                  awe::abx_report_table(report, source_label));

  awe::RunManifest rm;
  rm.command = "abx";
  rm.config = {{"metric", args.metric}};
  rm.inputs = {{"tasks", args.tasks}, {"source", args.source}};
  rm.outputs = {{"report", args.out_report},
                {"table", args.out_report + ".txt"},
                {"n_triples", report.n_triples},
                {"error_rate", report.error_rate}};
  rm.write(awe::run_manifest_path(args.out_report, false));

  std::cout << awe::abx_report_table(report, source_label);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// cluster
// ---------------------------------------------------------------------------

struct ClusterArgs {
  std::string embeddings;
  std::string manifest;
  std::uint64_t seed = 0;
  int max_iter = 300;
  double tol = 1e-6;
  int restarts = 1;
  std::string out_report;
};

int cmd_cluster(const ClusterArgs& args) {
  const awe::FeatureArchive archive = awe::read_archive(args.embeddings);
  if (archive.entries.empty())
    throw awe::ArgumentError("embedding archive is empty: " + args.embeddings);
  for (const auto& [id, fm] : archive.entries) {
    if (fm.frames() != 1)
      throw awe::ArgumentError("segment '" + id +
                               "' is not an embedding (rows != 1)");
  }
  std::map<std::string, std::string> words;
  for (const awe::WordSegment& seg : awe::load_manifest(args.manifest))
    words[seg.segment_id] = seg.word;

  awe::MatD points(archive.entries.size(), archive.dim);
  std::vector<std::string> labels;
  std::size_t row = 0;
  std::set<std::string> distinct;
  for (const auto& [id, fm] : archive.entries) {
    auto it = words.find(id);
    if (it == words.end())
      throw awe::LookupError("segment '" + id + "' not present in manifest");
    for (std::size_t j = 0; j < archive.dim; ++j)
      points(row, j) = static_cast<double>(fm.data(0, j));
    labels.push_back(it->second);
    distinct.insert(it->second);
    ++row;
  }
  const std::size_t k = distinct.size();

  awe::Rng rng(args.seed);
  const awe::KmeansResult km =
      awe::kmeans(points, k, rng, args.max_iter, args.tol, args.restarts);
  awe::ClusterReport report = awe::clustering_accuracy(km.assignments, labels);
  report.k = k;
  report.iterations = km.iterations;
  report.inertia = km.inertia;

  write_text_file(args.out_report, awe::cluster_report_tsv(report));
  write_text_file(args.out_report + ".txt",
                  awe::cluster_report_table(report, "embeddings"));

  awe::RunManifest rm;
  rm.command = "cluster";
  rm.config = {{"seed", args.seed},
               {"max_iter", args.max_iter},
               {"tol", args.tol},
               {"restarts", args.restarts}};
  rm.inputs = {{"embeddings", args.embeddings}, {"manifest", args.manifest}};
  rm.outputs = {{"report", args.out_report},
                {"table", args.out_report + ".txt"},
                {"k", k},
                {"accuracy", report.accuracy}};
  rm.write(awe::run_manifest_path(args.out_report, false));

  std::cout << awe::cluster_report_table(report, "embeddings");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acoustic word embedding toolkit"};
  app.set_version_flag("--version", awe::kVersion);
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* c_synth =
      app.add_subcommand("synth", "Generate a synthetic toy corpus");
  c_synth->add_option("--out-dir", synth.out_dir, "Output directory")
      ->required();
  c_synth->add_option("--words", synth.cfg.n_words, "Word types (3-10)");
  c_synth->add_option("--speakers", synth.cfg.n_speakers, "Speaker count");
  c_synth->add_option("--tokens", synth.cfg.tokens_per_speaker,
                      "Tokens per word per speaker");
  c_synth->add_option("--seed", synth.cfg.seed, "Random seed");
  c_synth->add_option("--noise", synth.cfg.noise_level, "Noise level");

  MfccArgs mfcc;
  CLI::App* c_mfcc = app.add_subcommand("mfcc", "Extract MFCC features");
  c_mfcc->add_option("--manifest", mfcc.manifest, "Segment manifest TSV")
      ->required();
  c_mfcc->add_option("--audio-root", mfcc.audio_root,
                     "Directory audio paths are relative to");
  c_mfcc->add_option("--out-archive", mfcc.out_archive, "Output archive dir")
      ->required();
  c_mfcc->add_option("--config", mfcc.config_path, "JSON MFCC config");
  c_mfcc->add_flag("--allow-missing", mfcc.allow_missing,
                   "Exit 0 even if some audio files were missing");

  PairsArgs pairs;
  CLI::App* c_pairs = app.add_subcommand("pairs", "Build ABX task triples");
  c_pairs->add_option("--manifest", pairs.manifest, "Segment manifest TSV")
      ->required();
  c_pairs->add_option("--variant", pairs.variant, "within|across|both");
  c_pairs->add_option("--seed", pairs.seed, "Random seed");
  c_pairs->add_option("--cap", pairs.cap,
                      "Max triples per contrast pair (0 = exhaustive)");
  c_pairs->add_option("--out", pairs.out, "Output task TSV")->required();

  TrainArgs train;
  CLI::App* c_train = app.add_subcommand("train", "Train an AWE model");
  c_train->add_option("--archive", train.archive, "Feature archive dir")
      ->required();
  c_train->add_option("--manifest", train.manifest,
                      "Segment manifest (required for --mode super)");
  c_train->add_option("--mode", train.mode, "self|super");
  c_train->add_option("--targets", train.targets,
                      "Supervised target type (chars)");
  c_train->add_option("--hidden", train.hidden, "Hidden units per direction");
  c_train->add_option("--layers", train.layers, "Encoder/decoder layers");
  c_train->add_option("--dropout", train.dropout, "Input dropout probability");
  c_train->add_option("--max-frames", train.max_frames,
                      "Segments longer than this are skipped");
  c_train->add_option("--optimizer", train.optimizer, "adam|sgd");
  c_train->add_option("--lr", train.lr,
                      "Learning rate (default 1e-3 adam, 0.1 sgd)");
  c_train->add_option("--schedule", train.schedule,
                      "constant|step|cyclical (default by optimizer)");
  c_train->add_option("--step-factor", train.step_factor, "Step decay factor");
  c_train->add_option("--step-period", train.step_period,
                      "Step decay period in epochs");
  c_train->add_option("--cyc-min", train.cyc_min, "Cyclical LR minimum");
  c_train->add_option("--cyc-max", train.cyc_max, "Cyclical LR maximum");
  c_train->add_option("--cyc-steps", train.cyc_steps, "Cyclical cycle steps");
  c_train->add_option("--batch", train.batch, "Batch size");
  c_train->add_option("--epochs", train.epochs, "Training epochs");
  c_train->add_option("--seed", train.seed, "Random seed");
  c_train->add_option("--grad-clip", train.grad_clip,
                      "Global gradient norm clip (0 disables)");
  c_train->add_option("--out-model", train.out_model, "Output checkpoint")
      ->required();

  EmbedArgs embed;
  CLI::App* c_embed = app.add_subcommand("embed", "Export embeddings");
  c_embed->add_option("--model", embed.model, "Model checkpoint")->required();
  c_embed->add_option("--archive", embed.archive, "Feature archive dir")
      ->required();
  c_embed->add_option("--out-archive", embed.out_archive,
                      "Output embedding archive dir")
      ->required();

  AbxArgs abx;
  CLI::App* c_abx = app.add_subcommand("abx", "Score ABX tasks");
  c_abx->add_option("--tasks", abx.tasks, "Task TSV from pairs")->required();
  c_abx->add_option("--source", abx.source,
                    "Archive of features or embeddings")
      ->required();
  c_abx->add_option("--metric", abx.metric, "dtw|cosine");
  c_abx->add_option("--out-report", abx.out_report, "Output report TSV")
      ->required();

  ClusterArgs cluster;
  CLI::App* c_cluster =
      app.add_subcommand("cluster", "K-means clustering accuracy");
  c_cluster->add_option("--embeddings", cluster.embeddings,
                        "Embedding archive dir")
      ->required();
  c_cluster->add_option("--manifest", cluster.manifest, "Segment manifest TSV")
      ->required();
  c_cluster->add_option("--seed", cluster.seed, "Random seed");
  c_cluster->add_option("--max-iter", cluster.max_iter, "Lloyd iteration cap");
  c_cluster->add_option("--tol", cluster.tol, "Centroid movement tolerance");
  c_cluster->add_option("--restarts", cluster.restarts,
                        "Seeded k-means restarts (best inertia wins)");
  c_cluster->add_option("--out-report", cluster.out_report,
                        "Output report TSV")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*c_synth) return cmd_synth(synth);
    if (*c_mfcc) return cmd_mfcc(mfcc);
    if (*c_pairs) return cmd_pairs(pairs);
    if (*c_train) return cmd_train(train);
    if (*c_embed) return cmd_embed(embed);
    if (*c_abx) return cmd_abx(abx);
    if (*c_cluster) return cmd_cluster(cluster);
  } catch (const awe::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const awe::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataFormat;
  } catch (const awe::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataFormat;
  } catch (const awe::CorruptionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataFormat;
  } catch (const awe::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataFormat;
  } catch (const awe::RangeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataFormat;
  } catch (const awe::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
