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

#ifndef CCNET_LINGPROPS_HPP
#define CCNET_LINGPROPS_HPP

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "ccnet/corpus_io.hpp"
#include "ccnet/corrnet.hpp"
#include "ccnet/numerics.hpp"

namespace ccnet {

// Frozen cluster vectors M^R, one row per function id.
struct ClusterVectorSet {
  std::string language;
  std::vector<std::string> function_ids;
  Matrix vectors;  // clusters x d_l
};

// Word clusters average their members; pair clusters average
// (extended - basic) over their pairs.
inline ClusterVectorSet build_cluster_vectors(const LinguisticClusterSet& clusters,
                                              const EmbeddingTable& table) {
  ClusterVectorSet set{clusters.language, {}, Matrix::Zero(
                                                  static_cast<Index>(clusters.clusters.size()),
                                                  table.dim())};
  Index row = 0;
  for (const LinguisticCluster& c : clusters.clusters) {
    if (c.size() == 0) throw Error("build_cluster_vectors: empty cluster '" + c.function_id + "'");
    const auto lookup = [&](const std::string& w) {
      const Index k = table.vocab.find(w);
      if (k < 0) throw LookupError("cluster '" + c.function_id + "': unknown word '" + w + "'");
      return k;
    };
    for (const auto& w : c.words) set.vectors.row(row) += table.vectors.row(lookup(w));
    for (const auto& [basic, extended] : c.pairs) {
      set.vectors.row(row) += table.vectors.row(lookup(extended)) - table.vectors.row(lookup(basic));
    }
    set.vectors.row(row) /= static_cast<double>(c.size());
    set.function_ids.push_back(c.function_id);
    ++row;
  }
  return set;
}

// Cluster rows shared by two languages, matched by function id and ordered
// by ascending id.
struct AlignedClusters {
  std::vector<std::string> function_ids;
  Matrix vectors_i;
  Matrix vectors_j;
};

inline AlignedClusters intersect_clusters(const ClusterVectorSet& set_i,
                                          const ClusterVectorSet& set_j) {
  std::map<std::string, Index> rows_j;
  for (std::size_t k = 0; k < set_j.function_ids.size(); ++k)
    rows_j.emplace(set_j.function_ids[k], static_cast<Index>(k));
  std::vector<std::pair<std::string, std::pair<Index, Index>>> shared;
  for (std::size_t k = 0; k < set_i.function_ids.size(); ++k) {
    const auto it = rows_j.find(set_i.function_ids[k]);
    if (it != rows_j.end()) shared.push_back({it->first, {static_cast<Index>(k), it->second}});
  }
  std::sort(shared.begin(), shared.end());
  AlignedClusters out;
  out.vectors_i.resize(static_cast<Index>(shared.size()), set_i.vectors.cols());
  out.vectors_j.resize(static_cast<Index>(shared.size()), set_j.vectors.cols());
  for (std::size_t k = 0; k < shared.size(); ++k) {
    out.function_ids.push_back(shared[k].first);
    out.vectors_i.row(static_cast<Index>(k)) = set_i.vectors.row(shared[k].second.first);
    out.vectors_j.row(static_cast<Index>(k)) = set_j.vectors.row(shared[k].second.second);
  }
  return out;
}

struct LingpropsLoss {
  double value = 0.0;
  // No shared function id: the component contributes nothing.
  bool skipped = false;
};

struct LingpropsGrads {
  Matrix* weight_i = nullptr;
  Matrix* bias_i = nullptr;
  Matrix* weight_j = nullptr;
  Matrix* bias_j = nullptr;
};

// H^R = sigmoid(M^R W + b^R) with the word projection W of each language and
// its own cluster bias b^R; O_R = L(H^R_i, H^R_j) over shared function ids.
inline LingpropsLoss loss_lingprops(const ClusterVectorSet& set_i, const ClusterVectorSet& set_j,
                                    const ProjectionParams& p_i, const Matrix& cluster_bias_i,
                                    const ProjectionParams& p_j, const Matrix& cluster_bias_j,
                                    const LingpropsGrads* g = nullptr) {
  const AlignedClusters aligned = intersect_clusters(set_i, set_j);
  if (aligned.function_ids.empty()) return {0.0, true};
  require_cols(aligned.vectors_i, p_i.input_dim(), "loss_lingprops");
  require_cols(aligned.vectors_j, p_j.input_dim(), "loss_lingprops");
  const Matrix h_i = sigmoid(affine(aligned.vectors_i, p_i.weight, cluster_bias_i));
  const Matrix h_j = sigmoid(affine(aligned.vectors_j, p_j.weight, cluster_bias_j));
  if (!g) return {cosine_row_loss(h_i, h_j), false};

  Matrix dh_i, dh_j;
  const double value = cosine_row_loss(h_i, h_j, &dh_i, &dh_j);
  const Matrix dz_i = sigmoid_backward(h_i, dh_i);
  const Matrix dz_j = sigmoid_backward(h_j, dh_j);
  if (g->weight_i) *g->weight_i += aligned.vectors_i.transpose() * dz_i;
  if (g->bias_i) *g->bias_i += dz_i.colwise().sum();
  if (g->weight_j) *g->weight_j += aligned.vectors_j.transpose() * dz_j;
  if (g->bias_j) *g->bias_j += dz_j.colwise().sum();
  return {value, false};
}

}  // namespace ccnet

#endif  // CCNET_LINGPROPS_HPP
