// awe/matrix.hpp

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

#ifndef AWE_MATRIX_HPP_
#define AWE_MATRIX_HPP_

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "awe/errors.hpp"

namespace awe {

/// Dense row-major matrix. Feature storage uses float, training math double.
template <typename T>
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, T fill = T(0))
      : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }

  T* row(std::size_t r) { return v_.data() + r * cols_; }
  const T* row(std::size_t r) const { return v_.data() + r * cols_; }

  T& operator()(std::size_t r, std::size_t c) { return v_[r * cols_ + c]; }
  T operator()(std::size_t r, std::size_t c) const { return v_[r * cols_ + c]; }

  T* data() { return v_.data(); }
  const T* data() const { return v_.data(); }

  void fill(T x) { v_.assign(v_.size(), x); }

  bool all_finite() const {
    for (T x : v_) {
      if (!std::isfinite(static_cast<double>(x))) return false;
    }
    return true;
  }

  bool operator==(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && v_ == o.v_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> v_;
};

using MatF = Mat<float>;
using MatD = Mat<double>;

/// Frame features for one word segment: T rows of d coefficients.
struct FeatureMatrix {
  MatF data;
  double frame_shift_s = 0.0;
  std::string feature_kind;

  std::size_t frames() const { return data.rows(); }
  std::size_t dim() const { return data.cols(); }

  void validate() const {
    if (data.rows() < 1 || data.cols() < 1)
      throw ValidationError("FeatureMatrix must have T >= 1 and d >= 1");
    if (!data.all_finite())
      throw ValidationError("FeatureMatrix contains non-finite entries");
  }
};

inline MatD to_double(const MatF& m) {
  MatD out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.size(); ++i)
    out.data()[i] = static_cast<double>(m.data()[i]);
  return out;
}

inline MatF to_float(const MatD& m) {
  MatF out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.size(); ++i)
    out.data()[i] = static_cast<float>(m.data()[i]);
  return out;
}

}  // namespace awe

#endif  // AWE_MATRIX_HPP_
