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

#ifndef CCNET_ADADELTA_HPP
#define CCNET_ADADELTA_HPP

#include <cmath>
#include <map>
#include <string>

#include "ccnet/numerics.hpp"

namespace ccnet {

struct AdadeltaOptions {
  // decay constant
  double rho = 0.95;
  // small parameter
  double epsilon = 1e-6;
  // multiplies the Adadelta delta before it is applied
  double scale = 0.5;
};

// Decayed accumulators for one parameter block.
struct AdadeltaSlot {
  Matrix sq_grad;
  Matrix sq_update;
};

// One Adadelta update of `param` in place. The slot is (re)initialised to
// zeros on first use; the unscaled delta feeds the update accumulator.
inline void adadelta_step(Matrix& param, const Matrix& grad, AdadeltaSlot& slot,
                          const AdadeltaOptions& opt) {
  require_same_shape(param, grad, "adadelta_step");
  if (slot.sq_grad.size() == 0) {
    slot.sq_grad = Matrix::Zero(param.rows(), param.cols());
    slot.sq_update = Matrix::Zero(param.rows(), param.cols());
  }
  require_same_shape(param, slot.sq_grad, "adadelta_step state");
  require_same_shape(param, slot.sq_update, "adadelta_step state");

  for (Index k = 0; k < param.size(); ++k) {
    const double g = grad.data()[k];
    double& eg2 = slot.sq_grad.data()[k];
    double& edx2 = slot.sq_update.data()[k];
    eg2 = opt.rho * eg2 + (1.0 - opt.rho) * g * g;
    const double dx = -std::sqrt(edx2 + opt.epsilon) / std::sqrt(eg2 + opt.epsilon) * g;
    edx2 = opt.rho * edx2 + (1.0 - opt.rho) * dx * dx;
    param.data()[k] += opt.scale * dx;
  }
}

// Adadelta over named parameter blocks.
class Adadelta {
 public:
  explicit Adadelta(AdadeltaOptions opt = {}) : opt_(opt) {}

  void step(const std::string& block, Matrix& param, const Matrix& grad) {
    adadelta_step(param, grad, slots_[block], opt_);
  }

  const AdadeltaOptions& options() const { return opt_; }
  const std::map<std::string, AdadeltaSlot>& slots() const { return slots_; }

 private:
  AdadeltaOptions opt_;
  std::map<std::string, AdadeltaSlot> slots_;
};

}  // namespace ccnet

#endif  // CCNET_ADADELTA_HPP
