// awe/manifest.hpp

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

#ifndef AWE_MANIFEST_HPP_
#define AWE_MANIFEST_HPP_

#include <charconv>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "awe/errors.hpp"
#include "awe/text.hpp"

namespace awe {

// Speaker sentinel for corpora without speaker labels. Such segments are
// excluded from within-speaker ABX and treated as mutually distinct speakers
// in across-speaker ABX.
inline constexpr const char* kUnknownSpeaker = "UNK";

/// One word occurrence: where it lives in the audio and what it says.
struct WordSegment {
  std::string segment_id;
  std::string audio_path;
  double start_s = 0.0;
  double end_s = 0.0;
  std::string word;
  std::string speaker_id;

  bool operator==(const WordSegment&) const = default;
};

inline constexpr const char* kManifestHeader =
    "segment_id\taudio_path\tstart_s\tend_s\tword\tspeaker_id";

namespace detail {

inline double parse_time(const std::string& s, int line_no, const char* what) {
  double out;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("manifest line " + std::to_string(line_no) +
                     ": non-numeric " + what + " '" + s + "'");
  return out;
}

inline std::string format_double(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

}  // namespace detail

// Reads a tab-separated manifest with the fixed header, preserving file
// order. Malformed rows name their 1-based line number.
inline std::vector<WordSegment> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);

  std::string line;
  if (!std::getline(in, line))
    throw ParseError("manifest is empty: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kManifestHeader)
    throw ParseError("manifest line 1: bad header, expected '" +
                     std::string(kManifestHeader) + "'");

  std::vector<WordSegment> segments;
  std::set<std::string> seen_ids;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f = split_tab(line);
    if (f.size() != 6)
      throw ParseError("manifest line " + std::to_string(line_no) + ": " +
                       std::to_string(f.size()) + " columns, expected 6");
    WordSegment seg;
    seg.segment_id = f[0];
    seg.audio_path = f[1];
    seg.start_s = detail::parse_time(f[2], line_no, "start_s");
    seg.end_s = detail::parse_time(f[3], line_no, "end_s");
    seg.word = f[4];
    seg.speaker_id = f[5];
    if (seg.segment_id.empty())
      throw ParseError("manifest line " + std::to_string(line_no) +
                       ": empty segment_id");
    if (seg.start_s < 0.0)
      throw ParseError("manifest line " + std::to_string(line_no) +
                       ": negative start_s");
    if (seg.end_s <= seg.start_s)
      throw ParseError("manifest line " + std::to_string(line_no) +
                       ": end_s <= start_s");
    if (seg.word.empty())
      throw ParseError("manifest line " + std::to_string(line_no) +
                       ": empty word");
    if (seg.speaker_id.empty())
      throw ParseError("manifest line " + std::to_string(line_no) +
                       ": empty speaker_id");
    if (!seen_ids.insert(seg.segment_id).second)
      throw ValidationError("duplicate segment_id '" + seg.segment_id +
                            "' at manifest line " + std::to_string(line_no));
    segments.push_back(std::move(seg));
  }
  return segments;
}

// Times are written with shortest round-trip formatting so load(write(x))
// reproduces the doubles bit-exactly.
inline void write_manifest(const std::vector<WordSegment>& segments,
                           const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write manifest: " + path);
  out << kManifestHeader << "\n";
  for (const WordSegment& s : segments) {
    out << s.segment_id << '\t' << s.audio_path << '\t'
        << detail::format_double(s.start_s) << '\t'
        << detail::format_double(s.end_s) << '\t' << s.word << '\t'
        << s.speaker_id << "\n";
  }
  if (!out) throw ParseError("failed writing manifest: " + path);
}

}  // namespace awe

#endif  // AWE_MANIFEST_HPP_
