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

#ifndef CCNET_TRAINER_HPP
#define CCNET_TRAINER_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ccnet/adadelta.hpp"
#include "ccnet/chars.hpp"
#include "ccnet/corpus_io.hpp"
#include "ccnet/corrnet.hpp"
#include "ccnet/lingprops.hpp"
#include "ccnet/model.hpp"
#include "ccnet/neighborhood.hpp"

namespace ccnet {

struct LanguageResources {
  EmbeddingTable table;
  std::optional<LinguisticClusterSet> clusters;

  const std::string& language() const { return table.language(); }
};

struct PairResources {
  std::string language_i;
  std::string language_j;
  DictionaryPairSet dictionary;
};

struct TrainingResources {
  std::vector<LanguageResources> languages;
  std::vector<PairResources> pairs;

  std::size_t index_of(const std::string& language) const {
    for (std::size_t k = 0; k < languages.size(); ++k)
      if (languages[k].language() == language) return k;
    throw LookupError("unknown language '" + language + "'");
  }
};

struct LossBreakdown {
  double word = 0.0;
  double neighbors = 0.0;
  double chars = 0.0;
  double lingprops = 0.0;

  double total() const { return word + neighbors + chars + lingprops; }

  LossBreakdown& operator+=(const LossBreakdown& o) {
    word += o.word;
    neighbors += o.neighbors;
    chars += o.chars;
    lingprops += o.lingprops;
    return *this;
  }
};

// Dictionary-aligned inputs of one language pair, gathered once.
struct PairData {
  std::size_t lang_i = 0;
  std::size_t lang_j = 0;
  Matrix words_i, words_j;          // M rows
  Matrix centroids_i, centroids_j;  // C rows (empty when N is off)
  std::vector<std::vector<Index>> chars_i, chars_j;
  std::optional<ClusterVectorSet> clusters_i, clusters_j;

  Index rows() const { return words_i.rows(); }
};

inline PairData prepare_pair(const TrainingResources& res, const PairResources& pair,
                             const TrainConfig& cfg, const LanguageParams& p_i,
                             const LanguageParams& p_j) {
  PairData pd;
  pd.lang_i = res.index_of(pair.language_i);
  pd.lang_j = res.index_of(pair.language_j);
  if (pd.lang_i == pd.lang_j) throw Error("dictionary pairs a language with itself");
  const LanguageResources& li = res.languages[pd.lang_i];
  const LanguageResources& lj = res.languages[pd.lang_j];
  std::vector<Index> wi, wj;
  for (const auto& [a, b] : pair.dictionary.pairs) {
    if (a < 0 || a >= li.table.size() || b < 0 || b >= lj.table.size()) {
      throw DimensionError("dictionary index out of range");
    }
    wi.push_back(a);
    wj.push_back(b);
  }
  if (wi.empty()) throw EmptyDictionaryError("empty dictionary " + pair.language_i + "-" + pair.language_j);
  pd.words_i = gather_rows(li.table.vectors, wi);
  pd.words_j = gather_rows(lj.table.vectors, wj);
  if (cfg.components.neighbors) {
    pd.centroids_i = build_neighbor_clusters(li.table, wi, cfg.neighbors).centroids;
    pd.centroids_j = build_neighbor_clusters(lj.table, wj, cfg.neighbors).centroids;
  }
  if (cfg.components.chars) {
    for (Index w : wi) pd.chars_i.push_back(encode_word(p_i.chars.inventory, li.table.vocab.word(w)));
    for (Index w : wj) pd.chars_j.push_back(encode_word(p_j.chars.inventory, lj.table.vocab.word(w)));
  }
  if (li.clusters) pd.clusters_i = build_cluster_vectors(*li.clusters, li.table);
  if (lj.clusters) pd.clusters_j = build_cluster_vectors(*lj.clusters, lj.table);
  return pd;
}

namespace detail {

inline Matrix project_rows(const Matrix& m, const Matrix* c, const LanguageParams& p) {
  Matrix z = m * p.projection.weight;
  if (c) z += *c * p.neighbor.weight;
  z.rowwise() += p.projection.bias.row(0);
  return sigmoid(z);
}

inline Matrix char_reps(const std::vector<std::vector<Index>>& words, const LanguageParams& p,
                        std::vector<std::vector<BankTrace>>* traces) {
  Matrix reps(static_cast<Index>(words.size()), p.char_rep_dim());
  if (traces) traces->resize(words.size());
  for (std::size_t r = 0; r < words.size(); ++r) {
    reps.row(static_cast<Index>(r)) =
        conv_word(words[r], p.chars, p.banks, traces ? &(*traces)[r] : nullptr);
  }
  return reps;
}

}  // namespace detail

// O_W + O_N + O_char over the given dictionary rows of one pair. When the
// gradient buffers are non-null the gradient is accumulated into them.
inline LossBreakdown batch_loss(const PairData& pd, const std::vector<Index>& rows,
                                const LanguageParams& p_i, const LanguageParams& p_j,
                                const Components& comp, LanguageParams* g_i = nullptr,
                                LanguageParams* g_j = nullptr) {
  const bool grad = g_i && g_j;
  LossBreakdown loss;
  const Matrix m_i = gather_rows(pd.words_i, rows);
  const Matrix m_j = gather_rows(pd.words_j, rows);
  Matrix c_i, c_j;
  if (comp.neighbors) {
    c_i = gather_rows(pd.centroids_i, rows);
    c_j = gather_rows(pd.centroids_j, rows);
  }
  const Matrix h_i = detail::project_rows(m_i, comp.neighbors ? &c_i : nullptr, p_i);
  const Matrix h_j = detail::project_rows(m_j, comp.neighbors ? &c_j : nullptr, p_j);

  const Index n = static_cast<Index>(rows.size());
  WordLossGrads wg;
  if (grad) wg = make_word_grads(p_i.projection, p_j.projection, n);
  loss.word = loss_word_from_projection(m_i, m_j, h_i, h_j, p_i.projection, p_j.projection,
                                        grad ? &wg : nullptr);
  Matrix dh_i = std::move(wg.h_i);
  Matrix dh_j = std::move(wg.h_j);

  if (comp.neighbors) {
    NeighborLossGrads ng;
    if (grad) ng = make_neighbor_grads(p_i.neighbor, p_j.neighbor, n);
    loss.neighbors = loss_neighbors(c_i, c_j, h_i, h_j, p_i.neighbor, p_j.neighbor,
                                    grad ? &ng : nullptr);
    if (grad) {
      dh_i += ng.h_i;
      dh_j += ng.h_j;
      g_i->neighbor.weight += ng.lang_i.weight;
      g_i->neighbor.recon_bias += ng.lang_i.recon_bias;
      g_j->neighbor.weight += ng.lang_j.weight;
      g_j->neighbor.recon_bias += ng.lang_j.recon_bias;
    }
  }

  if (grad) {
    const auto backprop = [&](const Matrix& m, const Matrix& c, const Matrix& h, const Matrix& dh,
                              const ProjectionParams& recon, LanguageParams& g) {
      const Matrix da = sigmoid_backward(h, dh);
      g.projection.weight += m.transpose() * da + recon.weight;
      g.projection.bias += da.colwise().sum();
      g.projection.recon_bias += recon.recon_bias;
      if (comp.neighbors) g.neighbor.weight += c.transpose() * da;
    };
    backprop(m_i, c_i, h_i, dh_i, wg.lang_i, *g_i);
    backprop(m_j, c_j, h_j, dh_j, wg.lang_j, *g_j);
  }

  if (comp.chars) {
    std::vector<std::vector<Index>> words_i, words_j;
    for (Index r : rows) {
      words_i.push_back(pd.chars_i[static_cast<std::size_t>(r)]);
      words_j.push_back(pd.chars_j[static_cast<std::size_t>(r)]);
    }
    std::vector<std::vector<BankTrace>> tr_i, tr_j;
    const Matrix reps_i = detail::char_reps(words_i, p_i, grad ? &tr_i : nullptr);
    const Matrix reps_j = detail::char_reps(words_j, p_j, grad ? &tr_j : nullptr);
    if (!grad) {
      loss.chars = loss_char(reps_i, reps_j);
    } else {
      Matrix d_i, d_j;
      loss.chars = loss_char(reps_i, reps_j, &d_i, &d_j);
      for (std::size_t r = 0; r < words_i.size(); ++r) {
        const auto ri = static_cast<Index>(r);
        conv_word_backward(words_i[r], p_i.chars, p_i.banks, tr_i[r], d_i.row(ri),
                           g_i->chars.vectors, g_i->banks);
        conv_word_backward(words_j[r], p_j.chars, p_j.banks, tr_j[r], d_j.row(ri),
                           g_j->chars.vectors, g_j->banks);
      }
    }
  }
#ifdef CCNET_CORRUPT_BACKWARD
  // Fault injection for the gradient-check negative control.
  if (grad) g_i->projection.weight *= 1.5;
#endif
  return loss;
}

// O_R for one pair; skipped when either language has no clusters or they
// share no function id.
inline LingpropsLoss pair_lingprops_loss(const PairData& pd, const LanguageParams& p_i,
                                         const LanguageParams& p_j, LanguageParams* g_i = nullptr,
                                         LanguageParams* g_j = nullptr) {
  if (!pd.clusters_i || !pd.clusters_j) return {0.0, true};
  if (g_i && g_j) {
    const LingpropsGrads g{&g_i->projection.weight, &g_i->cluster_bias, &g_j->projection.weight,
                           &g_j->cluster_bias};
    return loss_lingprops(*pd.clusters_i, *pd.clusters_j, p_i.projection, p_i.cluster_bias,
                          p_j.projection, p_j.cluster_bias, &g);
  }
  return loss_lingprops(*pd.clusters_i, *pd.clusters_j, p_i.projection, p_i.cluster_bias,
                        p_j.projection, p_j.cluster_bias);
}

// O_theta restricted to `rows` of one pair: the enabled batch terms plus O_R.
inline LossBreakdown total_loss(const PairData& pd, const std::vector<Index>& rows,
                                const LanguageParams& p_i, const LanguageParams& p_j,
                                const Components& comp, LanguageParams* g_i = nullptr,
                                LanguageParams* g_j = nullptr) {
  LossBreakdown loss = batch_loss(pd, rows, p_i, p_j, comp, g_i, g_j);
  if (comp.lingprops) loss.lingprops = pair_lingprops_loss(pd, p_i, p_j, g_i, g_j).value;
  return loss;
}

inline std::vector<Index> all_rows(const PairData& pd) {
  std::vector<Index> rows(static_cast<std::size_t>(pd.rows()));
  std::iota(rows.begin(), rows.end(), Index{0});
  return rows;
}

struct EpochRecord {
  int epoch = 0;
  LossBreakdown loss;
};

struct TrainResult {
  ModelParams params;
  LossBreakdown initial;
  std::vector<EpochRecord> log;
  bool stopped_early = false;
  std::size_t unused_chars = 0;
};

struct TrainOptions {
  // When non-empty, "<dir>/<language>.ckpt" is rewritten after every epoch.
  std::string checkpoint_dir;
  std::function<void(const EpochRecord&)> on_epoch;
};

inline std::string format_log_header() { return "epoch\tO_W\tO_N\tO_char\tO_R\tO_total\n"; }

inline std::string format_log_row(const EpochRecord& rec) {
  std::string out = std::to_string(rec.epoch);
  for (double v : {rec.loss.word, rec.loss.neighbors, rec.loss.chars, rec.loss.lingprops,
                   rec.loss.total()}) {
    out += '\t';
    text::append_general(out, v, 9);
  }
  return out + '\n';
}

// Joint model state during training.
class Trainer {
 public:
  Trainer(const TrainingResources& res, TrainConfig cfg) : res_(res), cfg_(std::move(cfg)) {
    if (res_.languages.size() < 2) throw Error("training needs at least 2 languages");
    if (res_.pairs.empty()) throw Error("training needs at least 1 dictionary");
    if (cfg_.batch_size < 1) throw Error("batch size must be >= 1");
    for (const auto& l : res_.languages) {
      LanguageInit init = init_language_params(l.table, cfg_);
      unused_chars_ += init.unused_chars;
      params_.languages.push_back(std::move(init.params));
      grads_.push_back(zeros_like(params_.languages.back()));
    }
    for (const auto& p : res_.pairs) {
      const std::size_t i = res_.index_of(p.language_i);
      const std::size_t j = res_.index_of(p.language_j);
      pairs_.push_back(prepare_pair(res_, p, cfg_, params_.languages[i], params_.languages[j]));
    }
  }

  const ModelParams& params() const { return params_; }
  const std::vector<PairData>& pairs() const { return pairs_; }
  const TrainConfig& config() const { return cfg_; }

  // Component losses summed over every pair and every dictionary row.
  LossBreakdown evaluate() const {
    LossBreakdown sum;
    for (const PairData& pd : pairs_) {
      sum += total_loss(pd, all_rows(pd), params_.languages[pd.lang_i],
                        params_.languages[pd.lang_j], cfg_.components);
    }
    return sum;
  }

  TrainResult run(const TrainOptions& opt = {}) {
    TrainResult result;
    result.unused_chars = unused_chars_;
    result.initial = evaluate();
    if (!std::isfinite(result.initial.total())) throw NonFiniteError("initial loss is not finite");
    std::vector<double> totals{result.initial.total()};
    auto shuffle_rng = make_stream(cfg_.seed, "shuffle");
    Adadelta optimizer({0.95, 1e-6, cfg_.learning_rate});
    if (!opt.checkpoint_dir.empty()) std::filesystem::create_directories(opt.checkpoint_dir);

    for (int epoch = 1; epoch <= cfg_.epochs; ++epoch) {
      for (std::size_t pi = 0; pi < pairs_.size(); ++pi) {
        const PairData& pd = pairs_[pi];
        LanguageParams& p_i = params_.languages[pd.lang_i];
        LanguageParams& p_j = params_.languages[pd.lang_j];
        LanguageParams& g_i = grads_[pd.lang_i];
        LanguageParams& g_j = grads_[pd.lang_j];
        std::vector<Index> order = all_rows(pd);
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (std::size_t start = 0, batch = 0; start < order.size();
             start += static_cast<std::size_t>(cfg_.batch_size), ++batch) {
          const std::size_t stop =
              std::min(order.size(), start + static_cast<std::size_t>(cfg_.batch_size));
          const std::vector<Index> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                        order.begin() + static_cast<std::ptrdiff_t>(stop));
          set_zero(g_i);
          set_zero(g_j);
          const LossBreakdown loss = batch_loss(pd, rows, p_i, p_j, cfg_.components, &g_i, &g_j);
          if (!std::isfinite(loss.total())) {
            throw NonFiniteError(diagnose(epoch, pi, batch));
          }
          step(optimizer, p_i, g_i, StepKind::kBatch);
          step(optimizer, p_j, g_j, StepKind::kBatch);
        }
        if (cfg_.components.lingprops) {
          set_zero(g_i);
          set_zero(g_j);
          const LingpropsLoss lp = pair_lingprops_loss(pd, p_i, p_j, &g_i, &g_j);
          if (!std::isfinite(lp.value)) throw NonFiniteError(diagnose(epoch, pi, 0));
          if (!lp.skipped) {
            step(optimizer, p_i, g_i, StepKind::kCluster);
            step(optimizer, p_j, g_j, StepKind::kCluster);
          }
        }
      }

      EpochRecord rec{epoch, evaluate()};
      if (!std::isfinite(rec.loss.total())) throw NonFiniteError(diagnose(epoch, 0, 0));
      result.log.push_back(rec);
      if (opt.on_epoch) opt.on_epoch(rec);
      if (!opt.checkpoint_dir.empty()) {
        for (const auto& p : params_.languages) {
          save_checkpoint(p, (std::filesystem::path(opt.checkpoint_dir) / (p.language + ".ckpt")).string());
        }
      }
      totals.push_back(rec.loss.total());
      const int patience = cfg_.early_stop_patience;
      if (patience > 0 && epoch >= patience) {
        const double before = totals[static_cast<std::size_t>(epoch - patience)];
        const double gain = before - rec.loss.total();
        if (gain < cfg_.early_stop_tolerance * std::max(std::abs(before), 1e-12)) {
          result.stopped_early = epoch < cfg_.epochs;
          break;
        }
      }
    }
    result.params = params_;
    return result;
  }

 private:
  void step(Adadelta& optimizer, LanguageParams& p, LanguageParams& g, StepKind kind) {
    for (ParamBlock& b : param_blocks(p, g, cfg_.components, kind)) {
      if (b.frozen_rows > 0) b.grad->topRows(b.frozen_rows).setZero();
      optimizer.step(b.name, *b.value, *b.grad);
    }
  }

  std::string diagnose(int epoch, std::size_t pair, std::size_t batch) {
    std::ostringstream msg;
    msg << "non-finite loss at epoch " << epoch << ", pair " << pair << ", batch " << batch
        << "; parameter norms:";
    for (std::size_t k = 0; k < params_.languages.size(); ++k) {
      for (const ParamBlock& b : param_blocks(params_.languages[k], grads_[k], cfg_.components,
                                              StepKind::kAll)) {
        msg << ' ' << b.name << '=' << b.value->norm();
      }
    }
    return msg.str();
  }

  const TrainingResources& res_;
  TrainConfig cfg_;
  ModelParams params_;
  std::vector<LanguageParams> grads_;
  std::vector<PairData> pairs_;
  std::size_t unused_chars_ = 0;
};

inline TrainResult train(const TrainingResources& res, const TrainConfig& cfg,
                         const TrainOptions& opt = {}) {
  Trainer trainer(res, cfg);
  return trainer.run(opt);
}

// Common-space table for every word of `table`: the (neighbour-augmented)
// projection, followed by the character representation when `with_chars`.
inline EmbeddingTable project_vocabulary(const EmbeddingTable& table, const LanguageParams& p,
                                         bool with_chars) {
  require_cols(table.vectors, p.projection.input_dim(), "project_vocabulary");
  Matrix centroids;
  if (p.neighbor_count > 0) centroids = build_neighbor_clusters(table, p.neighbor_count).centroids;
  const Matrix h = detail::project_rows(table.vectors, p.neighbor_count > 0 ? &centroids : nullptr, p);
  EmbeddingTable out{table.vocab, h};
  if (with_chars) {
    Matrix reps(table.size(), p.char_rep_dim());
    for (Index w = 0; w < table.size(); ++w) {
      reps.row(w) = conv_word(encode_word(p.chars.inventory, table.vocab.word(w), true), p.chars, p.banks);
    }
    out.vectors = concat_cols(h, reps);
  }
  require_finite(out.vectors, "project_vocabulary");
  return out;
}

inline EmbeddingTable project_vocabulary(const EmbeddingTable& table, const LanguageParams& p) {
  return project_vocabulary(table, p, p.components.chars);
}

}  // namespace ccnet

#endif  // CCNET_TRAINER_HPP
