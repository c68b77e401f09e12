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

#ifndef CCNET_STATS_HPP
#define CCNET_STATS_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>

#include "ccnet/error.hpp"
#include "ccnet/numerics.hpp"

namespace ccnet {

struct Correlation {
  double value = 0.0;
  // Set when either input is constant; value is then 0.
  bool degenerate = false;
};

// Pearson correlation. Inputs with (population) variance below 1e-12 are
// reported as degenerate with a correlation of 0.
inline Correlation pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("pearson: length mismatch");
  if (x.size() < 2) throw DimensionError("pearson: need at least 2 observations");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = x[k] - mx;
    const double dy = y[k] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx / n < 1e-12 || syy / n < 1e-12) return {0.0, true};
  return {std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0), false};
}

inline Correlation pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return pearson(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
                 std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
}

inline constexpr double kCcaRidge = 1e-8;

namespace detail {

// (A + ridge I)^{-1/2} for symmetric positive semi-definite A.
inline Matrix inverse_sqrt(const Matrix& a, double ridge) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a + ridge * Matrix::Identity(a.rows(), a.cols()));
  Eigen::VectorXd inv = eig.eigenvalues().unaryExpr(
      [](double v) { return v > 0.0 ? 1.0 / std::sqrt(v) : 0.0; });
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace detail

// First canonical correlation between the column spaces of x and s.
// Columns are centred, each scatter matrix is whitened with a ridge of
// kCcaRidge, and the result is the top singular value of the whitened
// cross-scatter, clamped to [0, 1]. Rank deficiency is absorbed by the ridge.
inline double cca_first_correlation(const Matrix& x, const Matrix& s) {
  if (x.rows() != s.rows()) throw DimensionError("cca: row count mismatch");
  if (x.rows() < 2) throw DimensionError("cca: need at least 2 rows");
  if (x.cols() < 1 || s.cols() < 1) throw DimensionError("cca: empty matrix");
  const Matrix xc = x.rowwise() - x.colwise().mean();
  const Matrix sc = s.rowwise() - s.colwise().mean();
  const Matrix wx = detail::inverse_sqrt(xc.transpose() * xc, kCcaRidge);
  const Matrix ws = detail::inverse_sqrt(sc.transpose() * sc, kCcaRidge);
  const Matrix t = wx * (xc.transpose() * sc) * ws;
  Eigen::JacobiSVD<Matrix> svd(t);
  const double top = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  return std::clamp(top, 0.0, 1.0);
}

}  // namespace ccnet

#endif  // CCNET_STATS_HPP
