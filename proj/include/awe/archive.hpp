// awe/archive.hpp

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

#ifndef AWE_ARCHIVE_HPP_
#define AWE_ARCHIVE_HPP_

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "awe/errors.hpp"
#include "awe/matrix.hpp"
#include "awe/text.hpp"

namespace awe {

// Portable per-segment feature container. Each entry is one little-endian
// binary file:
//   bytes 0-3   magic "AWEF"
//   bytes 4-7   version (u32, currently 1)
//   bytes 8-11  rows (u32)
//   bytes 12-15 cols (u32)
//   then rows*cols IEEE-754 32-bit floats, row-major
// plus a plain-text index.tsv of `segment_id<TAB>relative_filename` lines.
// A small meta.tsv carries the shared feature_kind and frame shift; it is
// optional on read so externally produced archives need only the two pinned
// formats above.
struct FeatureArchive {
  std::map<std::string, FeatureMatrix> entries;
  std::size_t dim = 0;
};

inline constexpr std::uint32_t kArchiveVersion = 1;
inline constexpr const char* kArchiveIndexName = "index.tsv";
inline constexpr const char* kArchiveMetaName = "meta.tsv";

namespace detail {

inline void put_u32le(std::ostream& out, std::uint32_t v) {
  char b[4] = {char(v & 0xFF), char((v >> 8) & 0xFF), char((v >> 16) & 0xFF),
               char((v >> 24) & 0xFF)};
  out.write(b, 4);
}

inline std::uint32_t get_u32le(const unsigned char* b) {
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) |
         (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
}

inline std::string sanitize_filename(const std::string& id) {
  std::string out;
  out.reserve(id.size());
  for (char c : id) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    out.push_back(ok ? c : '_');
  }
  if (out.empty()) out = "seg";
  return out;
}

}  // namespace detail

inline void write_feature_file(const std::string& path, const MatF& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write feature file: " + path);
  out.write("AWEF", 4);
  detail::put_u32le(out, kArchiveVersion);
  detail::put_u32le(out, static_cast<std::uint32_t>(m.rows()));
  detail::put_u32le(out, static_cast<std::uint32_t>(m.cols()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::uint32_t bits;
    float f = m.data()[i];
    std::memcpy(&bits, &f, 4);
    detail::put_u32le(out, bits);
  }
  if (!out) throw FormatError("failed writing feature file: " + path);
}

inline MatF read_feature_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open feature file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 16)
    throw CorruptionError("truncated feature file (no header): " + path);
  if (std::memcmp(bytes.data(), "AWEF", 4) != 0)
    throw CorruptionError("bad magic in feature file: " + path);
  std::uint32_t version = detail::get_u32le(bytes.data() + 4);
  if (version != kArchiveVersion)
    throw CorruptionError("unsupported feature file version " +
                          std::to_string(version) + ": " + path);
  std::uint32_t rows = detail::get_u32le(bytes.data() + 8);
  std::uint32_t cols = detail::get_u32le(bytes.data() + 12);
  std::uint64_t expected = 16ull + 4ull * rows * cols;
  if (bytes.size() != expected)
    throw CorruptionError("truncated feature file (" +
                          std::to_string(bytes.size()) + " bytes, expected " +
                          std::to_string(expected) + "): " + path);
  MatF m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::uint32_t bits = detail::get_u32le(bytes.data() + 16 + 4 * i);
    float f;
    std::memcpy(&f, &bits, 4);
    m.data()[i] = f;
  }
  if (!m.all_finite())
    throw CorruptionError("non-finite entries in feature file: " + path);
  return m;
}

inline FeatureArchive write_archive(
    const std::map<std::string, FeatureMatrix>& entries,
    const std::string& dir) {
  std::size_t dim = 0;
  for (const auto& [id, fm] : entries) {
    fm.validate();
    if (dim == 0) dim = fm.dim();
    if (fm.dim() != dim)
      throw ValidationError("mixed feature dimensions in archive: segment '" +
                            id + "' has d=" + std::to_string(fm.dim()) +
                            ", expected " + std::to_string(dim));
  }
  std::filesystem::create_directories(dir);

  std::ofstream index(std::filesystem::path(dir) / kArchiveIndexName,
                      std::ios::binary);
  if (!index) throw IoError("cannot write archive index in " + dir);
  std::set<std::string> used_names;
  for (const auto& [id, fm] : entries) {
    std::string base = detail::sanitize_filename(id);
    std::string name = base + ".awef";
    int suffix = 2;
    while (!used_names.insert(name).second) {
      name = base + "_" + std::to_string(suffix++) + ".awef";
    }
    write_feature_file((std::filesystem::path(dir) / name).string(), fm.data);
    index << id << '\t' << name << "\n";
  }
  index.close();

  // Shared metadata, uniform across the archive by construction.
  std::string kind;
  double shift = 0.0;
  if (!entries.empty()) {
    kind = entries.begin()->second.feature_kind;
    shift = entries.begin()->second.frame_shift_s;
  }
  std::ofstream meta(std::filesystem::path(dir) / kArchiveMetaName,
                     std::ios::binary);
  meta << "feature_kind\t" << kind << "\nframe_shift_s\t" << shift << "\n";

  FeatureArchive ar;
  ar.entries = entries;
  ar.dim = dim;
  return ar;
}

inline FeatureArchive read_archive(const std::string& dir) {
  const std::string index_path =
      (std::filesystem::path(dir) / kArchiveIndexName).string();
  std::ifstream index(index_path);
  if (!index) throw IoError("cannot open archive index: " + index_path);

  std::string kind;
  double shift = 0.0;
  {
    std::ifstream meta(std::filesystem::path(dir) / kArchiveMetaName);
    std::string line;
    while (meta && std::getline(meta, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::vector<std::string> f = split_tab(line);
      if (f.size() != 2) continue;
      if (f[0] == "feature_kind") kind = f[1];
      if (f[0] == "frame_shift_s") shift = std::atof(f[1].c_str());
    }
  }

  FeatureArchive ar;
  std::string line;
  int line_no = 0;
  while (std::getline(index, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f = split_tab(line);
    if (f.size() != 2)
      throw CorruptionError("bad archive index line " +
                            std::to_string(line_no) + " in " + index_path);
    FeatureMatrix fm;
    fm.data =
        read_feature_file((std::filesystem::path(dir) / f[1]).string());
    fm.feature_kind = kind;
    fm.frame_shift_s = shift;
    if (ar.dim == 0) ar.dim = fm.data.cols();
    if (fm.data.cols() != ar.dim)
      throw CorruptionError("archive dimension mismatch in file " + f[1] +
                            ": d=" + std::to_string(fm.data.cols()) +
                            ", expected " + std::to_string(ar.dim));
    if (!ar.entries.emplace(f[0], std::move(fm)).second)
      throw CorruptionError("duplicate segment_id '" + f[0] +
                            "' in archive index " + index_path);
  }
  return ar;
}

}  // namespace awe

#endif  // AWE_ARCHIVE_HPP_
