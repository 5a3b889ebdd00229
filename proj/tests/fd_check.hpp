// tests/fd_check.hpp

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

#ifndef AWE_TESTS_FD_CHECK_HPP_
#define AWE_TESTS_FD_CHECK_HPP_

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>

#include "awe/nn.hpp"

namespace awe_test {

struct FdReport {
  double max_rel_err = 0.0;
  std::size_t entries = 0;
  std::string worst;  // "param[k]" of the worst entry
};

// Central finite differences against the analytic gradients already
// accumulated in the store. loss_fn must re-run a fresh forward pass from
// the current parameter values; it runs 2 * |params| times.
inline FdReport finite_difference_check(
    awe::nn::ParamStore& store, const std::function<double()>& loss_fn,
    double eps = 1e-5) {
  FdReport report;
  for (std::size_t p = 0; p < store.count(); ++p) {
    awe::MatD& v = store.value(static_cast<int>(p));
    const awe::MatD& g = store.grad(static_cast<int>(p));
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double saved = v.data()[k];
      v.data()[k] = saved + eps;
      const double up = loss_fn();
      v.data()[k] = saved - eps;
      const double down = loss_fn();
      v.data()[k] = saved;
      const double fd = (up - down) / (2.0 * eps);
      const double ad = g.data()[k];
      const double rel =
          std::abs(ad - fd) / std::max(1e-3, std::abs(ad) + std::abs(fd));
      if (rel > report.max_rel_err) {
        report.max_rel_err = rel;
        report.worst = store.name(static_cast<int>(p)) + "[" +
                       std::to_string(k) + "]";
      }
      ++report.entries;
    }
  }
  return report;
}

}  // namespace awe_test

#endif  // AWE_TESTS_FD_CHECK_HPP_
