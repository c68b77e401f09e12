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

#ifndef CCNET_NEIGHBORHOOD_HPP
#define CCNET_NEIGHBORHOOD_HPP

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "ccnet/corpus_io.hpp"
#include "ccnet/corrnet.hpp"
#include "ccnet/numerics.hpp"

namespace ccnet {

// Top-N monolingual neighbours of a list of query words and the centroid of
// each neighbour list. Row k of `centroids` belongs to query k.
struct NeighborClusterSet {
  Index n = 0;
  Matrix centroids;
  std::vector<std::vector<Index>> neighbors;
  // Set when the vocabulary has fewer than n + 1 words.
  bool short_lists = false;
};

// Rows scaled to unit length; near-zero rows stay zero.
inline Matrix normalized_rows(const Matrix& m) {
  Matrix out = m;
  for (Index r = 0; r < out.rows(); ++r) {
    const double norm = out.row(r).norm();
    if (norm < kDegenerateNorm) {
      out.row(r).setZero();
    } else {
      out.row(r) /= norm;
    }
  }
  return out;
}

// Indices of the `k` rows of `unit` most cosine-similar to `query` (a unit
// vector), descending by similarity with ties broken by ascending index.
// `exclude` (if >= 0) is never returned.
inline std::vector<Index> nearest_rows(const Matrix& unit, const Eigen::RowVectorXd& query,
                                       Index k, Index exclude = -1) {
  const Eigen::VectorXd sims = unit * query.transpose();
  std::vector<Index> order;
  order.reserve(static_cast<std::size_t>(unit.rows()));
  for (Index r = 0; r < unit.rows(); ++r)
    if (r != exclude) order.push_back(r);
  const auto take = static_cast<std::size_t>(std::min<Index>(k, static_cast<Index>(order.size())));
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](Index a, Index b) { return sims(a) > sims(b) || (sims(a) == sims(b) && a < b); });
  order.resize(take);
  return order;
}

inline NeighborClusterSet build_neighbor_clusters(const EmbeddingTable& table,
                                                  std::span<const Index> queries, Index n) {
  if (n < 1) throw Error("build_neighbor_clusters: N must be >= 1");
  NeighborClusterSet set;
  set.n = n;
  set.short_lists = table.size() < n + 1;
  set.centroids = Matrix::Zero(static_cast<Index>(queries.size()), table.dim());
  set.neighbors.reserve(queries.size());
  const Matrix unit = normalized_rows(table.vectors);
  for (std::size_t k = 0; k < queries.size(); ++k) {
    const Index q = queries[k];
    if (q < 0 || q >= table.size()) throw DimensionError("build_neighbor_clusters: query index");
    std::vector<Index> nn = nearest_rows(unit, unit.row(q), n, q);
    for (Index w : nn) set.centroids.row(static_cast<Index>(k)) += table.vectors.row(w);
    if (!nn.empty()) set.centroids.row(static_cast<Index>(k)) /= static_cast<double>(nn.size());
    set.neighbors.push_back(std::move(nn));
  }
  return set;
}

inline NeighborClusterSet build_neighbor_clusters(const EmbeddingTable& table, Index n) {
  std::vector<Index> all(static_cast<std::size_t>(table.size()));
  std::iota(all.begin(), all.end(), Index{0});
  return build_neighbor_clusters(table, all, n);
}

struct NeighborParams {
  Matrix weight;      // U: d_l x h
  Matrix recon_bias;  // b*: 1 x d_l
};

inline NeighborParams zeros_like(const NeighborParams& q) {
  return {Matrix::Zero(q.weight.rows(), q.weight.cols()), Matrix::Zero(1, q.recon_bias.cols())};
}

// H = sigmoid(M W + C U + b)
inline Matrix project_augmented(const Matrix& m, const Matrix& c, const ProjectionParams& p,
                                const NeighborParams& q) {
  if (m.rows() != c.rows()) throw DimensionError("project_augmented: row count mismatch");
  require_cols(m, p.input_dim(), "project_augmented");
  require_cols(c, q.weight.rows(), "project_augmented");
  if (q.weight.cols() != p.common_dim()) throw DimensionError("project_augmented: U/W mismatch");
  Matrix z = m * p.weight + c * q.weight;
  z.rowwise() += p.bias.row(0);
  return sigmoid(z);
}

// sigmoid(H U^T + b*)
inline Matrix reconstruct_neighbors(const Matrix& h, const NeighborParams& q) {
  require_cols(h, q.weight.cols(), "reconstruct_neighbors");
  Matrix z = h * q.weight.transpose();
  z.rowwise() += q.recon_bias.row(0);
  return sigmoid(z);
}

struct NeighborLossGrads {
  NeighborParams lang_i;
  NeighborParams lang_j;
  Matrix h_i;
  Matrix h_j;
};

inline NeighborLossGrads make_neighbor_grads(const NeighborParams& q_i, const NeighborParams& q_j,
                                             Index rows) {
  return {zeros_like(q_i), zeros_like(q_j), Matrix::Zero(rows, q_i.weight.cols()),
          Matrix::Zero(rows, q_j.weight.cols())};
}

// O_N for one pair: L(C'_i, C_i) + L(C*_i, C_i) + L(C'_j, C_j) + L(C*_j, C_j).
inline double loss_neighbors(const Matrix& c_i, const Matrix& c_j, const Matrix& h_i,
                             const Matrix& h_j, const NeighborParams& q_i,
                             const NeighborParams& q_j, NeighborLossGrads* g = nullptr) {
  if (c_i.rows() != c_j.rows() || h_i.rows() != c_i.rows() || h_j.rows() != c_j.rows()) {
    throw DimensionError("loss_neighbors: row count mismatch");
  }
  if (!g) {
    return paired_reconstruction_loss(c_i, h_i, h_j, q_i.weight, q_i.recon_bias, nullptr) +
           paired_reconstruction_loss(c_j, h_j, h_i, q_j.weight, q_j.recon_bias, nullptr);
  }
  const ReconstructionGrads gi{&g->lang_i.weight, &g->lang_i.recon_bias, &g->h_i, &g->h_j};
  const ReconstructionGrads gj{&g->lang_j.weight, &g->lang_j.recon_bias, &g->h_j, &g->h_i};
  return paired_reconstruction_loss(c_i, h_i, h_j, q_i.weight, q_i.recon_bias, &gi) +
         paired_reconstruction_loss(c_j, h_j, h_i, q_j.weight, q_j.recon_bias, &gj);
}

}  // namespace ccnet

#endif  // CCNET_NEIGHBORHOOD_HPP
