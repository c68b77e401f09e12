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

#ifndef CCNET_QVEC_HPP
#define CCNET_QVEC_HPP

#include <string>
#include <vector>

#include "ccnet/corpus_io.hpp"
#include "ccnet/error.hpp"
#include "ccnet/numerics.hpp"
#include "ccnet/stats.hpp"

namespace ccnet {

// Row-aligned distributional (X) and linguistic (S) matrices.
struct QvecInstance {
  Matrix distributional;  // n x D
  Matrix linguistic;      // n x P
  std::vector<std::string> words;
  double coverage = 0.0;  // aligned words / embedding vocabulary size

  Index rows() const { return distributional.rows(); }
};

// Words present in both tables, in embedding-table order.
inline QvecInstance align_vocab(const EmbeddingTable& emb, const EmbeddingTable& ling) {
  std::vector<Index> rows_e, rows_l;
  QvecInstance inst;
  for (Index r = 0; r < emb.size(); ++r) {
    const Index k = ling.vocab.find(emb.vocab.word(r));
    if (k < 0) continue;
    rows_e.push_back(r);
    rows_l.push_back(k);
    inst.words.push_back(emb.vocab.word(r));
  }
  if (rows_e.empty()) {
    throw LookupError("no shared vocabulary between '" + emb.language() + "' embeddings and '" +
                      ling.language() + "' linguistic vectors");
  }
  inst.distributional = gather_rows(emb.vectors, rows_e);
  inst.linguistic = gather_rows(ling.vectors, rows_l);
  inst.coverage = static_cast<double>(rows_e.size()) / static_cast<double>(emb.size());
  return inst;
}

inline void validate(const QvecInstance& inst) {
  if (inst.distributional.rows() != inst.linguistic.rows()) {
    throw DimensionError("qvec: X and S row counts differ");
  }
  if (inst.rows() < 2) throw DimensionError("qvec: need at least 2 aligned words");
}

// Pearson correlation of every X column with every S column (D x P); the
// flag matrix marks degenerate (constant-column) entries.
inline Matrix column_correlations(const QvecInstance& inst, std::vector<bool>* degenerate = nullptr) {
  validate(inst);
  const Matrix& x = inst.distributional;
  const Matrix& s = inst.linguistic;
  Matrix r(x.cols(), s.cols());
  if (degenerate) degenerate->assign(static_cast<std::size_t>(x.cols() * s.cols()), false);
  for (Index i = 0; i < x.cols(); ++i) {
    const Eigen::VectorXd xi = x.col(i);
    for (Index j = 0; j < s.cols(); ++j) {
      const Correlation c = pearson(xi, Eigen::VectorXd(s.col(j)));
      r(i, j) = c.value;
      if (degenerate) (*degenerate)[static_cast<std::size_t>(i * s.cols() + j)] = c.degenerate;
    }
  }
  return r;
}

struct QvecResult {
  double score = 0.0;
  // alignment[i] = linguistic column aligned to embedding column i, or -1.
  std::vector<Index> alignment;
};

// max over a in {0,1}^{D x P} with sum_j a_ij <= 1 of sum_ij r(x_i, s_j) a_ij.
// Rows decouple: column i takes its best positive correlation (smallest j on
// ties) and stays unaligned when no correlation is positive.
inline QvecResult qvec_score(const QvecInstance& inst) {
  const Matrix r = column_correlations(inst);
  QvecResult out{0.0, std::vector<Index>(static_cast<std::size_t>(r.rows()), -1)};
  for (Index i = 0; i < r.rows(); ++i) {
    Index best = 0;
    for (Index j = 1; j < r.cols(); ++j)
      if (r(i, j) > r(i, best)) best = j;
    if (r(i, best) > 0.0) {
      out.alignment[static_cast<std::size_t>(i)] = best;
      out.score += r(i, best);
    }
  }
  return out;
}

inline double qvec_cca_score(const QvecInstance& inst) {
  validate(inst);
  return cca_first_correlation(inst.distributional, inst.linguistic);
}

// Stacks per-language instances. Words are tagged "<language>:<word>".
inline QvecInstance multilingual_instance(const std::vector<EmbeddingTable>& tables,
                                          const std::vector<EmbeddingTable>& lings) {
  if (tables.empty() || tables.size() != lings.size()) {
    throw DimensionError("multilingual_instance: need one linguistic table per language");
  }
  std::vector<QvecInstance> parts;
  Index rows = 0;
  double covered = 0.0, total = 0.0;
  for (std::size_t k = 0; k < tables.size(); ++k) {
    if (lings[k].dim() != lings[0].dim()) {
      throw DimensionError("multilingual_instance: linguistic dimension differs across languages");
    }
    if (tables[k].dim() != tables[0].dim()) {
      throw DimensionError("multilingual_instance: embedding dimension differs across languages");
    }
    parts.push_back(align_vocab(tables[k], lings[k]));
    rows += parts.back().rows();
    covered += static_cast<double>(parts.back().rows());
    total += static_cast<double>(tables[k].size());
  }
  if (parts.size() == 1) return parts.front();
  QvecInstance inst;
  inst.distributional.resize(rows, tables[0].dim());
  inst.linguistic.resize(rows, lings[0].dim());
  Index at = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    inst.distributional.middleRows(at, parts[k].rows()) = parts[k].distributional;
    inst.linguistic.middleRows(at, parts[k].rows()) = parts[k].linguistic;
    for (const auto& w : parts[k].words) inst.words.push_back(tables[k].language() + ":" + w);
    at += parts[k].rows();
  }
  inst.coverage = covered / total;
  return inst;
}

}  // namespace ccnet

#endif  // CCNET_QVEC_HPP
