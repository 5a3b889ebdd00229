// awe/synth.hpp

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

#ifndef AWE_SYNTH_HPP_
#define AWE_SYNTH_HPP_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "awe/errors.hpp"
#include "awe/manifest.hpp"
#include "awe/rng.hpp"
#include "awe/wav.hpp"

namespace awe {

// Toy corpus: word types are distinct three-note tone patterns, speakers
// shift the pitch, tokens jitter in duration and amplitude. Word names are
// all five characters and pairwise within edit distance 2, so every word
// pair qualifies for ABX contrast.
struct SynthConfig {
  std::size_t n_words = 5;     // 3..10
  std::size_t n_speakers = 3;
  std::size_t tokens_per_speaker = 10;  // per word
  std::uint64_t seed = 0;
  double noise_level = 0.01;

  void validate() const {
    if (n_words < 3 || n_words > 10)
      throw ArgumentError("SynthConfig: n_words must be in [3, 10]");
    if (n_speakers < 1 || n_speakers > 6)
      throw ArgumentError("SynthConfig: n_speakers must be in [1, 6]");
    if (tokens_per_speaker < 1)
      throw ArgumentError("SynthConfig: tokens_per_speaker must be >= 1");
    if (noise_level < 0.0)
      throw ArgumentError("SynthConfig: noise_level must be >= 0");
  }
};

namespace detail {

inline const char* kSynthWords[10] = {"banga", "benga", "binga", "bonga",
                                      "bunga", "danga", "denga", "dinga",
                                      "donga", "dunga"};

// Distinct note-index triples over the 5-note grid.
inline const int kSynthPatterns[10][3] = {
    {0, 2, 4}, {1, 3, 0}, {2, 4, 1}, {3, 0, 2}, {4, 1, 3},
    {0, 3, 1}, {1, 4, 2}, {2, 0, 3}, {3, 1, 4}, {4, 2, 0}};

inline const double kSynthNotesHz[5] = {220.0, 277.0, 349.0, 440.0, 554.0};

// Speaker identity is mostly timbre: each speaker weights the first four
// harmonics differently, with a pitch offset and loudness on top. That
// keeps across-speaker comparison hard for raw spectral features while the
// word stays defined by its note pattern.
struct SpeakerProfile {
  double pitch;
  double gain;
  double harmonics[4];
};

inline const SpeakerProfile kSynthSpeakers[6] = {
    {0.94, 1.00, {1.00, 0.35, 0.15, 0.05}},
    {1.00, 0.55, {0.25, 1.00, 0.30, 0.10}},
    {1.06, 0.80, {0.20, 0.35, 1.00, 0.45}},
    {0.90, 0.65, {0.60, 0.15, 0.70, 0.90}},
    {1.10, 0.90, {1.00, 0.80, 0.10, 0.30}},
    {0.98, 0.45, {0.15, 0.60, 0.25, 1.00}},
};

inline void render_note(std::vector<float>& out, double freq, double dur_s,
                        double amplitude, const SpeakerProfile& speaker,
                        Rng& rng, double noise) {
  const std::size_t n = static_cast<std::size_t>(dur_s * kSampleRate);
  const double ramp_s = 0.012;
  double weight_sum = 0.0;
  for (double w : speaker.harmonics) weight_sum += w;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kSampleRate;
    double env = 1.0;
    const double t_end = dur_s - t;
    if (t < ramp_s) env = t / ramp_s;
    if (t_end < ramp_s) env = std::min(env, t_end / ramp_s);
    const double w = 2.0 * M_PI * freq * t;
    double s = 0.0;
    for (int h = 0; h < 4; ++h)
      s += speaker.harmonics[h] * std::sin((h + 1) * w);
    s = amplitude * env * s / weight_sum;
    if (noise > 0.0) s += noise * rng.gaussian();
    out.push_back(static_cast<float>(s));
  }
}

}  // namespace detail

inline std::vector<std::string> synth_word_list(std::size_t n_words) {
  std::vector<std::string> words;
  for (std::size_t i = 0; i < n_words; ++i)
    words.push_back(detail::kSynthWords[i]);
  return words;
}

// Writes one WAV per speaker plus manifest.tsv; returns the segments.
inline std::vector<WordSegment> synth_corpus(const SynthConfig& cfg,
                                             const std::string& out_dir) {
  cfg.validate();
  std::filesystem::create_directories(out_dir);
  Rng rng(cfg.seed);
  std::vector<WordSegment> segments;

  for (std::size_t spk = 0; spk < cfg.n_speakers; ++spk) {
    const detail::SpeakerProfile& profile = detail::kSynthSpeakers[spk];
    const std::string wav_name = "spk" + std::to_string(spk) + ".wav";
    std::vector<float> audio;
    // Leading gap so no segment starts at sample 0.
    audio.resize(static_cast<std::size_t>(0.05 * kSampleRate), 0.0f);

    for (std::size_t w = 0; w < cfg.n_words; ++w) {
      for (std::size_t tok = 0; tok < cfg.tokens_per_speaker; ++tok) {
        const double start_s =
            static_cast<double>(audio.size()) / kSampleRate;
        const double amplitude =
            0.28 * profile.gain * (1.0 + 0.1 * rng.uniform(-1.0, 1.0));
        for (int note = 0; note < 3; ++note) {
          const double base =
              detail::kSynthNotesHz[detail::kSynthPatterns[w][note]];
          const double freq =
              base * profile.pitch * (1.0 + 0.02 * rng.uniform(-1.0, 1.0));
          const double dur = 0.13 * (1.0 + 0.18 * rng.uniform(-1.0, 1.0));
          detail::render_note(audio, freq, dur, amplitude, profile, rng,
                              cfg.noise_level);
        }
        const double end_s = static_cast<double>(audio.size()) / kSampleRate;

        WordSegment seg;
        seg.word = detail::kSynthWords[w];
        seg.segment_id = seg.word + "_s" + std::to_string(spk) + "_t" +
                         std::to_string(tok);
        seg.audio_path = wav_name;
        seg.start_s = start_s;
        seg.end_s = end_s;
        seg.speaker_id = "spk" + std::to_string(spk);
        segments.push_back(std::move(seg));

        const std::size_t gap =
            static_cast<std::size_t>((0.06 + 0.04 * rng.uniform()) * kSampleRate);
        audio.resize(audio.size() + gap, 0.0f);
      }
    }
    write_wav((std::filesystem::path(out_dir) / wav_name).string(), audio);
  }

  write_manifest(segments,
                 (std::filesystem::path(out_dir) / "manifest.tsv").string());
  return segments;
}

}  // namespace awe

#endif  // AWE_SYNTH_HPP_
