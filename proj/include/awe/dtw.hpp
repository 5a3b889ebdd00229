// awe/dtw.hpp

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

#ifndef AWE_DTW_HPP_
#define AWE_DTW_HPP_

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "awe/errors.hpp"
#include "awe/matrix.hpp"

namespace awe {

enum class FrameMetric { kCosine, kEuclidean };
enum class DtwNormalize { kPathLength, kNone };

struct DtwConfig {
  FrameMetric frame_metric = FrameMetric::kCosine;
  DtwNormalize normalize = DtwNormalize::kPathLength;
};

/// 1 - u.v / (|u||v|), in [0, 2]. Near-zero-norm inputs (silence frames)
/// return 1.0 so the distance stays finite.
template <typename T>
double cosine_distance(const T* u, const T* v, std::size_t dim) {
  double dot = 0.0, nu = 0.0, nv = 0.0;
  bool identical = true;
  for (std::size_t i = 0; i < dim; ++i) {
    const double a = static_cast<double>(u[i]);
    const double b = static_cast<double>(v[i]);
    if (a != b) identical = false;
    dot += a * b;
    nu += a * a;
    nv += b * b;
  }
  nu = std::sqrt(nu);
  nv = std::sqrt(nv);
  if (nu < 1e-12 || nv < 1e-12) return 1.0;
  if (identical) return 0.0;
  const double d = 1.0 - dot / (nu * nv);
  if (d < 0.0) return 0.0;
  if (d > 2.0) return 2.0;
  return d;
}

inline double cosine_distance(const std::vector<double>& u,
                              const std::vector<double>& v) {
  if (u.size() != v.size())
    throw ArgumentError("cosine_distance: dimension mismatch " +
                        std::to_string(u.size()) + " vs " +
                        std::to_string(v.size()));
  return cosine_distance(u.data(), v.data(), u.size());
}

template <typename T>
double euclidean_distance(const T* u, const T* v, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double d = static_cast<double>(u[i]) - static_cast<double>(v[i]);
    acc += d * d;
  }
  return std::sqrt(acc);
}

inline double euclidean_distance(const std::vector<double>& u,
                                 const std::vector<double>& v) {
  if (u.size() != v.size())
    throw ArgumentError("euclidean_distance: dimension mismatch " +
                        std::to_string(u.size()) + " vs " +
                        std::to_string(v.size()));
  return euclidean_distance(u.data(), v.data(), u.size());
}

namespace detail {

inline double frame_distance(const MatF& a, std::size_t i, const MatF& b,
                             std::size_t j, FrameMetric metric) {
  if (metric == FrameMetric::kCosine)
    return cosine_distance(a.row(i), b.row(j), a.cols());
  return euclidean_distance(a.row(i), b.row(j), a.cols());
}

struct PathCost {
  double cost = std::numeric_limits<double>::infinity();
  std::size_t len = 0;

  // Cost ties break toward the shorter path.
  bool better_than(const PathCost& o) const {
    if (cost != o.cost) return cost < o.cost;
    return len < o.len;
  }
};

}  // namespace detail

// Minimal accumulated frame distance over monotone alignment paths with
// steps (1,0), (0,1), (1,1) at unit weight, endpoints pinned. Two rolling
// rows of (cost, path length); normalization divides by the cell count of
// the optimal path.
inline double dtw_distance(const FeatureMatrix& a, const FeatureMatrix& b,
                           const DtwConfig& cfg = DtwConfig{}) {
  if (a.dim() != b.dim())
    throw ArgumentError("dtw_distance: dimension mismatch " +
                        std::to_string(a.dim()) + " vs " +
                        std::to_string(b.dim()));
  if (a.frames() < 1 || b.frames() < 1)
    throw ArgumentError("dtw_distance: empty sequence");

  const std::size_t ta = a.frames(), tb = b.frames();
  std::vector<detail::PathCost> prev(tb), cur(tb);

  for (std::size_t i = 0; i < ta; ++i) {
    for (std::size_t j = 0; j < tb; ++j) {
      const double d =
          detail::frame_distance(a.data, i, b.data, j, cfg.frame_metric);
      detail::PathCost best;
      if (i == 0 && j == 0) {
        best = {0.0, 0};
      } else {
        if (i > 0 && prev[j].better_than(best)) best = prev[j];
        if (j > 0 && cur[j - 1].better_than(best)) best = cur[j - 1];
        if (i > 0 && j > 0 && prev[j - 1].better_than(best))
          best = prev[j - 1];
      }
      cur[j] = {best.cost + d, best.len + 1};
    }
    std::swap(prev, cur);
  }

  const detail::PathCost& final_cell = prev[tb - 1];
  if (cfg.normalize == DtwNormalize::kPathLength)
    return final_cell.cost / static_cast<double>(final_cell.len);
  return final_cell.cost;
}

namespace detail {

inline void enumerate_paths(const MatF& a, const MatF& b, std::size_t i,
                            std::size_t j, double cost, std::size_t len,
                            FrameMetric metric, PathCost& best) {
  cost += frame_distance(a, i, b, j, metric);
  ++len;
  if (i + 1 == a.rows() && j + 1 == b.rows()) {
    PathCost candidate{cost, len};
    if (candidate.better_than(best)) best = candidate;
    return;
  }
  if (i + 1 < a.rows()) enumerate_paths(a, b, i + 1, j, cost, len, metric, best);
  if (j + 1 < b.rows()) enumerate_paths(a, b, i, j + 1, cost, len, metric, best);
  if (i + 1 < a.rows() && j + 1 < b.rows())
    enumerate_paths(a, b, i + 1, j + 1, cost, len, metric, best);
}

}  // namespace detail

// Exhaustive-path oracle with the same contract as dtw_distance. Refuses
// sequences longer than 8 frames (combinatorial blow-up).
inline double dtw_brute_force(const FeatureMatrix& a, const FeatureMatrix& b,
                              const DtwConfig& cfg = DtwConfig{}) {
  if (a.dim() != b.dim())
    throw ArgumentError("dtw_brute_force: dimension mismatch");
  if (a.frames() < 1 || b.frames() < 1)
    throw ArgumentError("dtw_brute_force: empty sequence");
  if (a.frames() > 8 || b.frames() > 8)
    throw ArgumentError("dtw_brute_force refuses sequences longer than 8 frames");

  detail::PathCost best;
  detail::enumerate_paths(a.data, b.data, 0, 0, 0.0, 0, cfg.frame_metric, best);
  if (cfg.normalize == DtwNormalize::kPathLength)
    return best.cost / static_cast<double>(best.len);
  return best.cost;
}

}  // namespace awe

#endif  // AWE_DTW_HPP_
