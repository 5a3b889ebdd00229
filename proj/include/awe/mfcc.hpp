// awe/mfcc.hpp

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

#ifndef AWE_MFCC_HPP_
#define AWE_MFCC_HPP_

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "awe/errors.hpp"
#include "awe/matrix.hpp"

namespace awe {

/// 13 static cepstra plus delta and delta-delta, 39 coefficients total.
/// Framing 25 ms / 10 ms, Hamming window, 26 HTK-mel triangular filters,
/// orthonormal DCT-II with coefficient 0 retained.
struct MfccConfig {
  int sample_rate = 16000;
  double window_s = 0.025;
  double hop_s = 0.010;
  std::size_t fft_size = 512;
  std::size_t n_mels = 26;
  std::size_t n_ceps = 13;
  double pre_emphasis = 0.97;
  std::size_t delta_window = 2;
  double floor = 1e-10;

  std::size_t window_samples() const {
    return static_cast<std::size_t>(std::llround(window_s * sample_rate));
  }
  std::size_t hop_samples() const {
    return static_cast<std::size_t>(std::llround(hop_s * sample_rate));
  }

  void validate() const {
    if (n_ceps > n_mels)
      throw ArgumentError("MfccConfig: n_ceps must be <= n_mels");
    if (fft_size < window_samples())
      throw ArgumentError("MfccConfig: fft_size smaller than window");
    if ((fft_size & (fft_size - 1)) != 0)
      throw ArgumentError("MfccConfig: fft_size must be a power of two");
    if (delta_window < 1)
      throw ArgumentError("MfccConfig: delta_window must be >= 1");
    if (floor <= 0.0) throw ArgumentError("MfccConfig: floor must be positive");
  }
};

namespace detail {

// In-place iterative radix-2 FFT; size must be a power of two.
inline void fft_radix2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * M_PI / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

inline double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
inline double mel_to_hz(double m) {
  return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0);
}

// Triangular filters with mel-spaced corners from 0 Hz to Nyquist,
// evaluated at the FFT bin center frequencies.
inline MatD mel_filterbank(const MfccConfig& cfg) {
  const std::size_t n_bins = cfg.fft_size / 2 + 1;
  const double nyquist = cfg.sample_rate / 2.0;
  const double mel_hi = hz_to_mel(nyquist);
  std::vector<double> corners(cfg.n_mels + 2);
  for (std::size_t m = 0; m < corners.size(); ++m)
    corners[m] = mel_to_hz(mel_hi * static_cast<double>(m) /
                           static_cast<double>(cfg.n_mels + 1));

  MatD fb(cfg.n_mels, n_bins);
  for (std::size_t m = 0; m < cfg.n_mels; ++m) {
    const double lo = corners[m], mid = corners[m + 1], hi = corners[m + 2];
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * cfg.sample_rate /
                       static_cast<double>(cfg.fft_size);
      double w = 0.0;
      if (f >= lo && f <= mid && mid > lo)
        w = (f - lo) / (mid - lo);
      else if (f > mid && f <= hi && hi > mid)
        w = (hi - f) / (hi - mid);
      fb(m, k) = w;
    }
  }
  return fb;
}

}  // namespace detail

// Local regression over +/- window frames with edge replication:
// row t = sum_n n * (x[t+n] - x[t-n]) / (2 * sum_n n^2).
inline MatF delta_features(const MatF& features, std::size_t window) {
  if (window < 1) throw ArgumentError("delta window must be >= 1");
  const std::size_t rows = features.rows(), cols = features.cols();
  double denom = 0.0;
  for (std::size_t n = 1; n <= window; ++n) denom += static_cast<double>(n * n);
  denom *= 2.0;

  MatF out(rows, cols);
  auto clamp_row = [rows](std::ptrdiff_t t) -> std::size_t {
    if (t < 0) return 0;
    if (t >= static_cast<std::ptrdiff_t>(rows)) return rows - 1;
    return static_cast<std::size_t>(t);
  };
  for (std::size_t t = 0; t < rows; ++t) {
    for (std::size_t c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (std::size_t n = 1; n <= window; ++n) {
        const std::size_t ahead = clamp_row(static_cast<std::ptrdiff_t>(t + n));
        const std::size_t behind =
            clamp_row(static_cast<std::ptrdiff_t>(t) - static_cast<std::ptrdiff_t>(n));
        acc += static_cast<double>(n) *
               (static_cast<double>(features(ahead, c)) -
                static_cast<double>(features(behind, c)));
      }
      out(t, c) = static_cast<float>(acc / denom);
    }
  }
  return out;
}

inline FeatureMatrix mfcc(const std::vector<float>& samples,
                          const MfccConfig& cfg = MfccConfig{}) {
  cfg.validate();
  const std::size_t win = cfg.window_samples();
  const std::size_t hop = cfg.hop_samples();
  if (samples.size() < win)
    throw ArgumentError("signal too short for one window: " +
                        std::to_string(samples.size()) + " < " +
                        std::to_string(win) + " samples");
  for (float s : samples) {
    if (!std::isfinite(s))
      throw ValidationError("non-finite sample in MFCC input");
  }

  // Pre-emphasis over the whole signal; first sample gets the edge rule
  // y[0] = x[0] * (1 - coef).
  std::vector<double> emphasized(samples.size());
  emphasized[0] = static_cast<double>(samples[0]) * (1.0 - cfg.pre_emphasis);
  for (std::size_t i = 1; i < samples.size(); ++i)
    emphasized[i] = static_cast<double>(samples[i]) -
                    cfg.pre_emphasis * static_cast<double>(samples[i - 1]);

  std::vector<double> hamming(win);
  for (std::size_t n = 0; n < win; ++n)
    hamming[n] = 0.54 - 0.46 * std::cos(2.0 * M_PI * static_cast<double>(n) /
                                        static_cast<double>(win - 1));

  const std::size_t n_frames = (samples.size() - win) / hop + 1;
  const std::size_t n_bins = cfg.fft_size / 2 + 1;
  const MatD fb = detail::mel_filterbank(cfg);

  // Orthonormal DCT-II basis, first n_ceps rows.
  MatD dct(cfg.n_ceps, cfg.n_mels);
  for (std::size_t i = 0; i < cfg.n_ceps; ++i) {
    const double scale = std::sqrt((i == 0 ? 1.0 : 2.0) /
                                   static_cast<double>(cfg.n_mels));
    for (std::size_t j = 0; j < cfg.n_mels; ++j)
      dct(i, j) = scale * std::cos(M_PI * static_cast<double>(i) *
                                   (2.0 * static_cast<double>(j) + 1.0) /
                                   (2.0 * static_cast<double>(cfg.n_mels)));
  }

  MatF statics(n_frames, cfg.n_ceps);
  std::vector<std::complex<double>> spec(cfg.fft_size);
  std::vector<double> mag(n_bins), mel(cfg.n_mels);
  for (std::size_t t = 0; t < n_frames; ++t) {
    const double* frame = emphasized.data() + t * hop;
    for (std::size_t n = 0; n < cfg.fft_size; ++n)
      spec[n] = (n < win) ? std::complex<double>(frame[n] * hamming[n], 0.0)
                          : std::complex<double>(0.0, 0.0);
    detail::fft_radix2(spec);
    for (std::size_t k = 0; k < n_bins; ++k) mag[k] = std::abs(spec[k]);
    for (std::size_t m = 0; m < cfg.n_mels; ++m) {
      double e = 0.0;
      const double* w = fb.row(m);
      for (std::size_t k = 0; k < n_bins; ++k) e += w[k] * mag[k];
      mel[m] = std::log(std::max(e, cfg.floor));
    }
    for (std::size_t i = 0; i < cfg.n_ceps; ++i) {
      double c = 0.0;
      const double* basis = dct.row(i);
      for (std::size_t j = 0; j < cfg.n_mels; ++j) c += basis[j] * mel[j];
      statics(t, i) = static_cast<float>(c);
    }
  }

  MatF d1 = delta_features(statics, cfg.delta_window);
  MatF d2 = delta_features(d1, cfg.delta_window);

  FeatureMatrix out;
  out.data = MatF(n_frames, 3 * cfg.n_ceps);
  for (std::size_t t = 0; t < n_frames; ++t) {
    for (std::size_t i = 0; i < cfg.n_ceps; ++i) {
      out.data(t, i) = statics(t, i);
      out.data(t, cfg.n_ceps + i) = d1(t, i);
      out.data(t, 2 * cfg.n_ceps + i) = d2(t, i);
    }
  }
  out.frame_shift_s = cfg.hop_s;
  out.feature_kind = "mfcc39";
  return out;
}

}  // namespace awe

#endif  // AWE_MFCC_HPP_
