// awe/wav.hpp

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

#ifndef AWE_WAV_HPP_
#define AWE_WAV_HPP_

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "awe/errors.hpp"

namespace awe {

inline constexpr int kSampleRate = 16000;

namespace detail {

inline std::uint32_t read_u32le(std::istream& in, const std::string& path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw FormatError("truncated WAV header: " + path);
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) |
         (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
}

inline std::uint16_t read_u16le(std::istream& in, const std::string& path) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  if (!in) throw FormatError("truncated WAV header: " + path);
  return std::uint16_t(b[0]) | (std::uint16_t(b[1]) << 8);
}

struct WavLayout {
  std::streamoff data_offset = 0;
  std::uint32_t n_samples = 0;
};

// Validates PCM/16-bit/mono/16kHz and locates the data chunk.
inline WavLayout scan_wav(std::ifstream& in, const std::string& path) {
  char tag[4];
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "RIFF", 4) != 0)
    throw FormatError("not a RIFF file: " + path);
  read_u32le(in, path);  // riff size
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "WAVE", 4) != 0)
    throw FormatError("not a WAVE file: " + path);

  bool fmt_seen = false;
  WavLayout layout;
  bool data_seen = false;
  while (in.read(tag, 4)) {
    std::uint32_t chunk_size = read_u32le(in, path);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      std::uint16_t audio_format = read_u16le(in, path);
      std::uint16_t channels = read_u16le(in, path);
      std::uint32_t rate = read_u32le(in, path);
      read_u32le(in, path);  // byte rate
      read_u16le(in, path);  // block align
      std::uint16_t bits = read_u16le(in, path);
      if (audio_format != 1)
        throw FormatError("unsupported WAV encoding " +
                          std::to_string(audio_format) + " (want PCM): " + path);
      if (channels != 1)
        throw FormatError("unsupported channel count " +
                          std::to_string(channels) + " (want mono): " + path);
      if (rate != kSampleRate)
        throw FormatError("unsupported sample rate " + std::to_string(rate) +
                          " (want 16000): " + path);
      if (bits != 16)
        throw FormatError("unsupported bit depth " + std::to_string(bits) +
                          " (want 16): " + path);
      fmt_seen = true;
      if (chunk_size > 16) in.seekg(chunk_size - 16, std::ios::cur);
    } else if (std::memcmp(tag, "data", 4) == 0) {
      layout.data_offset = in.tellg();
      layout.n_samples = chunk_size / 2;
      data_seen = true;
      in.seekg(chunk_size, std::ios::cur);
    } else {
      in.seekg(chunk_size, std::ios::cur);
    }
    if (chunk_size % 2 == 1) in.seekg(1, std::ios::cur);  // chunk padding
    in.peek();
    if (in.eof()) break;
    if (!in) throw FormatError("truncated WAV file: " + path);
  }
  if (!fmt_seen) throw FormatError("WAV has no fmt chunk: " + path);
  if (!data_seen) throw FormatError("WAV has no data chunk: " + path);
  return layout;
}

}  // namespace detail

// Reads floor((end_s - start_s) * 16000) samples starting at
// floor(start_s * 16000), scaled to [-1, 1] as sample / 32768.
inline std::vector<float> read_wav_segment(const std::string& path,
                                           double start_s, double end_s) {
  if (end_s <= start_s)
    throw RangeError("end_s <= start_s for segment of " + path);
  if (start_s < 0.0) throw RangeError("negative start_s for " + path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open WAV file: " + path);
  detail::WavLayout layout = detail::scan_wav(in, path);

  const std::uint64_t first =
      static_cast<std::uint64_t>(std::floor(start_s * kSampleRate));
  const std::uint64_t count =
      static_cast<std::uint64_t>(std::floor((end_s - start_s) * kSampleRate));
  if (first + count > layout.n_samples)
    throw RangeError("segment [" + std::to_string(start_s) + ", " +
                     std::to_string(end_s) + "] outside file duration of " +
                     path);

  in.clear();
  in.seekg(layout.data_offset + static_cast<std::streamoff>(first * 2));
  std::vector<unsigned char> raw(count * 2);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!in) throw FormatError("truncated WAV data: " + path);

  std::vector<float> samples(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::int16_t s = static_cast<std::int16_t>(
        std::uint16_t(raw[2 * i]) | (std::uint16_t(raw[2 * i + 1]) << 8));
    samples[i] = static_cast<float>(s) / 32768.0f;
  }
  return samples;
}

inline double wav_duration_s(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open WAV file: " + path);
  detail::WavLayout layout = detail::scan_wav(in, path);
  return static_cast<double>(layout.n_samples) / kSampleRate;
}

// Writes PCM-16/mono/16kHz. Values quantize as round(x * 32768), clamped,
// so a sample of 0.25 stores exactly 8192.
inline void write_wav(const std::string& path, const std::vector<float>& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write WAV file: " + path);
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  auto put_u32 = [&out](std::uint32_t v) {
    char b[4] = {char(v & 0xFF), char((v >> 8) & 0xFF), char((v >> 16) & 0xFF),
                 char((v >> 24) & 0xFF)};
    out.write(b, 4);
  };
  auto put_u16 = [&out](std::uint16_t v) {
    char b[2] = {char(v & 0xFF), char((v >> 8) & 0xFF)};
    out.write(b, 2);
  };
  out.write("RIFF", 4);
  put_u32(36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(16);
  put_u16(1);  // PCM
  put_u16(1);  // mono
  put_u32(kSampleRate);
  put_u32(kSampleRate * 2);
  put_u16(2);
  put_u16(16);
  out.write("data", 4);
  put_u32(data_bytes);
  for (float x : samples) {
    long q = std::lround(static_cast<double>(x) * 32768.0);
    if (q > 32767) q = 32767;
    if (q < -32768) q = -32768;
    std::uint16_t u = static_cast<std::uint16_t>(static_cast<std::int16_t>(q));
    put_u16(u);
  }
  if (!out) throw FormatError("failed writing WAV file: " + path);
}

}  // namespace awe

#endif  // AWE_WAV_HPP_
