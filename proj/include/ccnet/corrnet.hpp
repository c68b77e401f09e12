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

#ifndef CCNET_CORRNET_HPP
#define CCNET_CORRNET_HPP

#include "ccnet/error.hpp"
#include "ccnet/numerics.hpp"

namespace ccnet {

// Per-language map into the common space and back.
struct ProjectionParams {
  Matrix weight;      // d_l x h
  Matrix bias;        // 1 x h
  Matrix recon_bias;  // 1 x d_l

  Index input_dim() const { return weight.rows(); }
  Index common_dim() const { return weight.cols(); }
};

inline ProjectionParams zeros_like(const ProjectionParams& p) {
  return {Matrix::Zero(p.weight.rows(), p.weight.cols()), Matrix::Zero(1, p.bias.cols()),
          Matrix::Zero(1, p.recon_bias.cols())};
}

// H = sigmoid(M W + b)
inline Matrix project_basic(const Matrix& m, const ProjectionParams& p) {
  require_cols(m, p.input_dim(), "project_basic");
  return sigmoid(affine(m, p.weight, p.bias));
}

// sigmoid(H W^T + b'). Serves both the monolingual and the cross-lingual
// reconstruction, depending on which language H came from.
inline Matrix reconstruct(const Matrix& h, const ProjectionParams& p) {
  require_cols(h, p.common_dim(), "reconstruct");
  Matrix z = h * p.weight.transpose();
  z.rowwise() += p.recon_bias.row(0);
  return sigmoid(z);
}

// Gradient buffers for a tied-weight reconstruction sigmoid(H W^T + b).
struct ReconstructionGrads {
  Matrix* weight = nullptr;
  Matrix* bias = nullptr;
  Matrix* h_self = nullptr;
  Matrix* h_other = nullptr;
};

// L(sigmoid(H_self W^T + b), T) + L(sigmoid(H_other W^T + b), T).
// Gradients are accumulated (+=) into the non-null buffers of `g`.
inline double paired_reconstruction_loss(const Matrix& target, const Matrix& h_self,
                                         const Matrix& h_other, const Matrix& weight,
                                         const Matrix& bias, const ReconstructionGrads* g) {
  require_cols(h_self, weight.cols(), "reconstruction");
  require_cols(h_other, weight.cols(), "reconstruction");
  const auto rebuild = [&](const Matrix& h) {
    Matrix z = h * weight.transpose();
    z.rowwise() += bias.row(0);
    return sigmoid(z);
  };
  const Matrix mono = rebuild(h_self);
  const Matrix cross = rebuild(h_other);
  if (!g) return cosine_row_loss(mono, target) + cosine_row_loss(cross, target);

  Matrix d_mono, d_cross;
  const double loss = cosine_row_loss(mono, target, &d_mono) +
                      cosine_row_loss(cross, target, &d_cross);
  const Matrix dz_mono = sigmoid_backward(mono, d_mono);
  const Matrix dz_cross = sigmoid_backward(cross, d_cross);
  if (g->weight) *g->weight += dz_mono.transpose() * h_self + dz_cross.transpose() * h_other;
  if (g->bias) *g->bias += dz_mono.colwise().sum() + dz_cross.colwise().sum();
  if (g->h_self) *g->h_self += dz_mono * weight;
  if (g->h_other) *g->h_other += dz_cross * weight;
  return loss;
}

struct WordLossGrads {
  ProjectionParams lang_i;  // weight and recon_bias receive reconstruction grads
  ProjectionParams lang_j;
  Matrix h_i;
  Matrix h_j;
};

inline WordLossGrads make_word_grads(const ProjectionParams& p_i, const ProjectionParams& p_j,
                                     Index rows) {
  return {zeros_like(p_i), zeros_like(p_j), Matrix::Zero(rows, p_i.common_dim()),
          Matrix::Zero(rows, p_j.common_dim())};
}

// O_W for one language pair given the common-space rows H_i, H_j of the
// dictionary-aligned matrices M_i, M_j:
//   L(M'_i, M_i) + L(M*_i, M_i) + L(M'_j, M_j) + L(M*_j, M_j) + L(H_i, H_j).
// Gradient w.r.t. H is returned in g->h_i / g->h_j; the caller backpropagates
// it through whichever projection produced H.
inline double loss_word_from_projection(const Matrix& m_i, const Matrix& m_j, const Matrix& h_i,
                                        const Matrix& h_j, const ProjectionParams& p_i,
                                        const ProjectionParams& p_j,
                                        WordLossGrads* g = nullptr) {
  if (m_i.rows() != m_j.rows()) throw DimensionError("loss_word: row count mismatch");
  if (h_i.cols() != h_j.cols()) throw DimensionError("loss_word: common dimension mismatch");
  if (!g) {
    return paired_reconstruction_loss(m_i, h_i, h_j, p_i.weight, p_i.recon_bias, nullptr) +
           paired_reconstruction_loss(m_j, h_j, h_i, p_j.weight, p_j.recon_bias, nullptr) +
           cosine_row_loss(h_i, h_j);
  }
  const ReconstructionGrads gi{&g->lang_i.weight, &g->lang_i.recon_bias, &g->h_i, &g->h_j};
  const ReconstructionGrads gj{&g->lang_j.weight, &g->lang_j.recon_bias, &g->h_j, &g->h_i};
  double loss = paired_reconstruction_loss(m_i, h_i, h_j, p_i.weight, p_i.recon_bias, &gi);
  loss += paired_reconstruction_loss(m_j, h_j, h_i, p_j.weight, p_j.recon_bias, &gj);
  Matrix dh_i, dh_j;
  loss += cosine_row_loss(h_i, h_j, &dh_i, &dh_j);
  g->h_i += dh_i;
  g->h_j += dh_j;
  return loss;
}

// O_W with the basic projection H = sigmoid(M W + b).
inline double loss_word(const Matrix& m_i, const Matrix& m_j, const ProjectionParams& p_i,
                        const ProjectionParams& p_j) {
  if (m_i.rows() != m_j.rows()) throw DimensionError("loss_word: row count mismatch");
  return loss_word_from_projection(m_i, m_j, project_basic(m_i, p_i), project_basic(m_j, p_j),
                                   p_i, p_j);
}

}  // namespace ccnet

#endif  // CCNET_CORRNET_HPP
