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

#ifndef CCNET_NUMERICS_HPP
#define CCNET_NUMERICS_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "ccnet/error.hpp"

namespace ccnet {

using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Rows with a norm below this are rejected by the cosine loss.
inline constexpr double kDegenerateNorm = 1e-12;

inline void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw NonFiniteError(std::string(what) + ": non-finite value");
  }
}

inline void require_same_shape(const Matrix& a, const Matrix& b, std::string_view what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shape " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}

inline void require_cols(const Matrix& m, Index cols, std::string_view what) {
  if (m.cols() != cols) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(cols) +
                         " columns, got " + std::to_string(m.cols()));
  }
}

inline double sigmoid(double x) {
  // Split on sign so exp never overflows.
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline Matrix sigmoid(const Matrix& x) {
  return x.unaryExpr([](double v) { return sigmoid(v); });
}

// Gradient through y = sigmoid(x), expressed in terms of the output y.
inline Matrix sigmoid_backward(const Matrix& y, const Matrix& dy) {
  return dy.cwiseProduct(y.cwiseProduct((1.0 - y.array()).matrix()));
}

inline Matrix tanh_map(const Matrix& x) {
  return x.unaryExpr([](double v) { return std::tanh(v); });
}

inline Matrix tanh_backward(const Matrix& y, const Matrix& dy) {
  return dy.cwiseProduct((1.0 - y.array().square()).matrix());
}

// x * w + b, with the 1 x cols bias broadcast over rows.
inline Matrix affine(const Matrix& x, const Matrix& w, const Matrix& b) {
  if (x.cols() != w.rows()) throw DimensionError("affine: input/weight inner dimension mismatch");
  if (b.rows() != 1 || b.cols() != w.cols()) throw DimensionError("affine: bias shape");
  Matrix z = x * w;
  z.rowwise() += b.row(0);
  return z;
}

struct AffineGrads {
  Matrix input;
  Matrix weight;
  Matrix bias;
};

inline AffineGrads affine_backward(const Matrix& x, const Matrix& w, const Matrix& dz) {
  return {dz * w.transpose(), x.transpose() * dz, dz.colwise().sum()};
}

inline Matrix concat_cols(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw DimensionError("concat_cols: row count mismatch");
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

// Column-wise max over rows. Ties go to the first (lowest) row.
struct MaxPool {
  Matrix values;              // 1 x cols
  std::vector<Index> argmax;  // one row index per column
};

inline MaxPool max_pool_rows(const Matrix& x) {
  if (x.rows() < 1) throw DimensionError("max_pool_rows: no rows");
  MaxPool out{Matrix(1, x.cols()), std::vector<Index>(static_cast<std::size_t>(x.cols()), 0)};
  for (Index c = 0; c < x.cols(); ++c) {
    Index best = 0;
    for (Index r = 1; r < x.rows(); ++r) {
      if (x(r, c) > x(best, c)) best = r;
    }
    out.values(0, c) = x(best, c);
    out.argmax[static_cast<std::size_t>(c)] = best;
  }
  return out;
}

inline Matrix max_pool_backward(const MaxPool& pool, Index rows, const Matrix& dy) {
  Matrix dx = Matrix::Zero(rows, dy.cols());
  for (Index c = 0; c < dy.cols(); ++c) dx(pool.argmax[static_cast<std::size_t>(c)], c) = dy(0, c);
  return dx;
}

// Sum over rows of (1 - cos(x_r, y_r)). Each row term is clamped to [0, 2].
// When dx / dy are non-null they receive the gradient of the loss.
inline double cosine_row_loss(const Matrix& x, const Matrix& y, Matrix* dx = nullptr,
                              Matrix* dy = nullptr) {
  require_same_shape(x, y, "cosine_row_loss");
  if (dx) dx->setZero(x.rows(), x.cols());
  if (dy) dy->setZero(y.rows(), y.cols());
  double total = 0.0;
  for (Index r = 0; r < x.rows(); ++r) {
    const double nx = x.row(r).norm();
    const double ny = y.row(r).norm();
    if (nx < kDegenerateNorm || ny < kDegenerateNorm) throw DegenerateRowError(r);
    const double dot = x.row(r).dot(y.row(r));
    const double cos = dot / (nx * ny);
    total += std::clamp(1.0 - cos, 0.0, 2.0);
    if (dx) dx->row(r) = -(y.row(r) / (nx * ny) - cos * x.row(r) / (nx * nx));
    if (dy) dy->row(r) = -(x.row(r) / (nx * ny) - cos * y.row(r) / (ny * ny));
  }
  return total;
}

// Per-row terms of cosine_row_loss, for inspection.
inline std::vector<double> cosine_row_terms(const Matrix& x, const Matrix& y) {
  require_same_shape(x, y, "cosine_row_terms");
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(x.rows()));
  for (Index r = 0; r < x.rows(); ++r) {
    const double nx = x.row(r).norm();
    const double ny = y.row(r).norm();
    if (nx < kDegenerateNorm || ny < kDegenerateNorm) throw DegenerateRowError(r);
    terms.push_back(std::clamp(1.0 - x.row(r).dot(y.row(r)) / (nx * ny), 0.0, 2.0));
  }
  return terms;
}

inline Matrix gather_rows(const Matrix& m, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Index>(k)) = m.row(rows[k]);
  return out;
}

}  // namespace ccnet

#endif  // CCNET_NUMERICS_HPP
