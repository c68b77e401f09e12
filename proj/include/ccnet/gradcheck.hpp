// Copyright 2026 The ccnet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CCNET_GRADCHECK_HPP
#define CCNET_GRADCHECK_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ccnet/numerics.hpp"

namespace ccnet {

// A named view of one trainable tensor and its gradient buffer. The first
// `frozen_rows` rows are not trainable and are skipped by checks and updates.
struct ParamBlock {
  std::string name;
  Matrix* value = nullptr;
  Matrix* grad = nullptr;
  Index frozen_rows = 0;
};

struct BlockCheck {
  std::string name;
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<BlockCheck> blocks;
  double max_rel_error = 0.0;
  std::string worst_block;
  bool passed = false;
};

inline constexpr double kFiniteDiffStep = 1e-4;
inline constexpr double kRelErrorFloor = 1e-2;

inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), kRelErrorFloor});
}

// Compares the gradients already stored in each block against central
// differences of `loss`. Parameter values are restored afterwards.
inline GradCheckReport finite_diff_check(const std::function<double()>& loss,
                                         std::span<const ParamBlock> blocks, double tolerance,
                                         double step = kFiniteDiffStep) {
  GradCheckReport report;
  for (const ParamBlock& block : blocks) {
    Matrix& value = *block.value;
    const Matrix& grad = *block.grad;
    require_same_shape(value, grad, "finite_diff_check: " + block.name);
    BlockCheck check{block.name, 0.0};
    for (Index c = 0; c < value.cols(); ++c) {
      for (Index r = block.frozen_rows; r < value.rows(); ++r) {
        const double saved = value(r, c);
        value(r, c) = saved + step;
        const double up = loss();
        value(r, c) = saved - step;
        const double down = loss();
        value(r, c) = saved;
        if (!std::isfinite(up) || !std::isfinite(down)) {
          throw NonFiniteError("finite_diff_check: non-finite loss while perturbing " +
                               block.name + "(" + std::to_string(r) + "," +
                               std::to_string(c) + ")");
        }
        const double numeric = (up - down) / (2.0 * step);
        check.max_rel_error = std::max(check.max_rel_error, relative_error(grad(r, c), numeric));
      }
    }
    if (check.max_rel_error >= report.max_rel_error) {
      report.max_rel_error = check.max_rel_error;
      report.worst_block = block.name;
    }
    report.blocks.push_back(std::move(check));
  }
  report.passed = report.max_rel_error < tolerance;
  return report;
}

}  // namespace ccnet

#endif  // CCNET_GRADCHECK_HPP
