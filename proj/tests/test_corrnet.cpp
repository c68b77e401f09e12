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

#include <gtest/gtest.h>

#include <numeric>

#include "ccnet/diagnostics.hpp"
#include "test_util.hpp"

namespace ccnet {
namespace {

using testing::random_matrix;

ProjectionParams random_projection(Index d, Index h, std::uint64_t seed) {
  return {random_matrix(d, h, seed), random_matrix(1, h, seed + 1), random_matrix(1, d, seed + 2)};
}

// Straight-line sigmoid(x w + b) with explicit loops.
Matrix sigmoid_affine_loops(const Matrix& x, const Matrix& w, const Matrix& b) {
  Matrix out(x.rows(), w.cols());
  for (Index r = 0; r < x.rows(); ++r) {
    for (Index c = 0; c < w.cols(); ++c) {
      double z = b(0, c);
      for (Index k = 0; k < x.cols(); ++k) z += x(r, k) * w(k, c);
      out(r, c) = 1.0 / (1.0 + std::exp(-z));
    }
  }
  return out;
}

double row_cos_distance_sum(const Matrix& a, const Matrix& b) {
  double total = 0.0;
  for (Index r = 0; r < a.rows(); ++r) {
    double dot = 0, na = 0, nb = 0;
    for (Index c = 0; c < a.cols(); ++c) {
      dot += a(r, c) * b(r, c);
      na += a(r, c) * a(r, c);
      nb += b(r, c) * b(r, c);
    }
    total += 1.0 - dot / std::sqrt(na * nb);
  }
  return total;
}

TEST(Projection, ZeroInputGivesHalf) {
  const auto p = random_projection(3, 4, 1);
  ProjectionParams q = p;
  q.bias.setZero();
  const Matrix h = project_basic(Matrix::Zero(2, 3), q);
  EXPECT_TRUE(h.isApprox(Matrix::Constant(2, 4, 0.5)));
}

TEST(Projection, ScalarCase) {
  ProjectionParams p{Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, -2.0), Matrix::Zero(1, 1)};
  EXPECT_DOUBLE_EQ(project_basic(Matrix::Constant(1, 1, 2.0), p)(0, 0), 0.5);
}

TEST(Projection, DefaultCommonDimension) {
  auto t = testing::make_table("en", {"a", "b"}, random_matrix(2, 3, 1));
  EXPECT_EQ(init_language_params(t, TrainConfig{}).params.common_dim(), 512);
}

TEST(Projection, MatchesLoopOracleAndRejectsBadShapes) {
  const auto p = random_projection(3, 2, 5);
  const Matrix m = random_matrix(4, 3, 6);
  EXPECT_TRUE(project_basic(m, p).isApprox(sigmoid_affine_loops(m, p.weight, p.bias), 1e-14));
  EXPECT_THROW(project_basic(random_matrix(4, 2, 7), p), DimensionError);
}

TEST(Reconstruction, ZeroWeightsGiveHalfAndShapes) {
  ProjectionParams p{Matrix::Zero(6, 3), Matrix::Zero(1, 3), Matrix::Zero(1, 6)};
  const Matrix r = reconstruct(random_matrix(7, 3, 1), p);
  EXPECT_EQ(r.rows(), 7);
  EXPECT_EQ(r.cols(), 6);
  EXPECT_TRUE(r.isApprox(Matrix::Constant(7, 6, 0.5)));
  const auto q = random_projection(5, 2, 3);
  const Matrix m = random_matrix(4, 5, 4);
  const Matrix back = reconstruct(project_basic(m, q), q);
  EXPECT_EQ(back.rows(), m.rows());
  EXPECT_EQ(back.cols(), m.cols());
}

TEST(LossWord, TermByTermOracle) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix m_i = random_matrix(4, 3, seed);
    const Matrix m_j = random_matrix(4, 3, seed + 10);
    const auto p_i = random_projection(3, 2, seed + 20);
    const auto p_j = random_projection(3, 2, seed + 30);
    const Matrix h_i = sigmoid_affine_loops(m_i, p_i.weight, p_i.bias);
    const Matrix h_j = sigmoid_affine_loops(m_j, p_j.weight, p_j.bias);
    const Matrix wt_i = p_i.weight.transpose(), wt_j = p_j.weight.transpose();
    const double expected =
        row_cos_distance_sum(sigmoid_affine_loops(h_i, wt_i, p_i.recon_bias), m_i) +
        row_cos_distance_sum(sigmoid_affine_loops(h_j, wt_i, p_i.recon_bias), m_i) +
        row_cos_distance_sum(sigmoid_affine_loops(h_j, wt_j, p_j.recon_bias), m_j) +
        row_cos_distance_sum(sigmoid_affine_loops(h_i, wt_j, p_j.recon_bias), m_j) +
        row_cos_distance_sum(h_i, h_j);
    EXPECT_NEAR(loss_word(m_i, m_j, p_i, p_j), expected, 1e-12);
  }
}

TEST(LossWord, SameLanguageCollapses) {
  const Matrix m = random_matrix(5, 3, 1);
  const auto p = random_projection(3, 2, 2);
  const double rec = cosine_row_loss(reconstruct(project_basic(m, p), p), m);
  EXPECT_NEAR(loss_word(m, m, p, p), 4.0 * rec, 1e-12);
}

TEST(LossWord, InvariantToJointRowPermutation) {
  const Matrix m_i = random_matrix(6, 3, 1);
  const Matrix m_j = random_matrix(6, 4, 2);
  const auto p_i = random_projection(3, 2, 3);
  const auto p_j = random_projection(4, 2, 4);
  std::vector<Index> perm{3, 0, 5, 1, 4, 2};
  EXPECT_NEAR(loss_word(m_i, m_j, p_i, p_j),
              loss_word(gather_rows(m_i, perm), gather_rows(m_j, perm), p_i, p_j), 1e-12);
}

TEST(LossWord, NonNegativeAndRowMismatchRaises) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EXPECT_GE(loss_word(random_matrix(3, 2, seed), random_matrix(3, 2, seed + 1),
                        random_projection(2, 2, seed + 2), random_projection(2, 2, seed + 3)),
              0.0);
  }
  EXPECT_THROW(loss_word(random_matrix(3, 2, 1), random_matrix(4, 2, 1), random_projection(2, 2, 1),
                         random_projection(2, 2, 2)),
               DimensionError);
}

TEST(LossWord, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix m_i = random_matrix(4, 3, seed);
    const Matrix m_j = random_matrix(4, 2, seed + 1);
    auto p_i = random_projection(3, 2, seed + 2);
    auto p_j = random_projection(2, 2, seed + 3);
    const Matrix h_i = project_basic(m_i, p_i);
    const Matrix h_j = project_basic(m_j, p_j);
    WordLossGrads g = make_word_grads(p_i, p_j, 4);
    loss_word_from_projection(m_i, m_j, h_i, h_j, p_i, p_j, &g);
    // Backpropagate dL/dH through H = sigmoid(M W + b).
    const Matrix dz_i = sigmoid_backward(h_i, g.h_i);
    const Matrix dz_j = sigmoid_backward(h_j, g.h_j);
    Matrix gw_i = g.lang_i.weight + m_i.transpose() * dz_i;
    Matrix gw_j = g.lang_j.weight + m_j.transpose() * dz_j;
    Matrix gb_i = dz_i.colwise().sum(), gb_j = dz_j.colwise().sum();
    const ParamBlock blocks[] = {{"W_i", &p_i.weight, &gw_i, 0},
                                 {"W_j", &p_j.weight, &gw_j, 0},
                                 {"b_i", &p_i.bias, &gb_i, 0},
                                 {"b_j", &p_j.bias, &gb_j, 0},
                                 {"b'_i", &p_i.recon_bias, &g.lang_i.recon_bias, 0},
                                 {"b'_j", &p_j.recon_bias, &g.lang_j.recon_bias, 0}};
    const auto report =
        finite_diff_check([&] { return loss_word(m_i, m_j, p_i, p_j); }, blocks, 1e-4);
    EXPECT_TRUE(report.passed) << "seed " << seed << ": " << report.worst_block << " "
                               << report.max_rel_error;
  }
}

TEST(Projection, IndependentOfOtherLanguages) {
  auto toy = make_toy_resources(3);
  TrainConfig cfg = toy_config(3);
  const Trainer a(toy, cfg);
  std::swap(toy.languages[0], toy.languages[1]);
  const Trainer b(toy, cfg);
  const auto& pa = *a.params().find("p");
  const auto& pb = *b.params().find("p");
  EXPECT_TRUE(testing::bitwise_equal(pa, pb));
  const Matrix m = toy.languages[1].table.vectors;
  EXPECT_TRUE(testing::bitwise_equal(project_basic(m, pa.projection), project_basic(m, pb.projection)));
}

}  // namespace
}  // namespace ccnet
