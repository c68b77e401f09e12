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

#ifndef CCNET_DIAGNOSTICS_HPP
#define CCNET_DIAGNOSTICS_HPP

#include <random>
#include <set>
#include <string>
#include <vector>

#include "ccnet/gradcheck.hpp"
#include "ccnet/random.hpp"
#include "ccnet/trainer.hpp"

namespace ccnet {

struct ToyModelOptions {
  Index vocab = 10;
  Index dim = 4;
  Index dim_common = 3;
  Index filters = 2;
  std::vector<int> widths{1, 2};
  Index neighbors = 3;
  Components components;
};

// Two small random languages with an 8-entry dictionary and a few shared
// clusters, for gradient checks.
inline TrainingResources make_toy_resources(std::uint64_t seed, const ToyModelOptions& opt = {}) {
  auto rng = make_stream(seed, "toy");
  std::uniform_int_distribution<int> len(1, 5);
  std::uniform_int_distribution<int> letter(0, 6);
  TrainingResources res;
  for (const char* lang : {"p", "q"}) {
    EmbeddingTable t{Vocabulary(lang), gaussian_matrix(opt.vocab, opt.dim, 1.0, rng)};
    while (t.size() < opt.vocab) {
      std::string w;
      for (int k = len(rng); k > 0; --k) w += static_cast<char>('a' + letter(rng));
      t.vocab.add(w);
    }
    LinguisticClusterSet c{lang, {}, 0, 0};
    const auto& v = t.vocab.words();
    c.clusters.push_back({"colors", MemberKind::kWord, {v[0], v[1], v[2]}, {}});
    c.clusters.push_back({"days", MemberKind::kWord, {v[3], v[4]}, {}});
    c.clusters.push_back({"-like", MemberKind::kPair, {}, {{v[5], v[6]}, {v[7], v[8]}}});
    if (std::string(lang) == "q") c.clusters.push_back({"q-only", MemberKind::kWord, {v[9]}, {}});
    res.languages.push_back({std::move(t), std::move(c)});
  }
  DictionaryPairSet dict{"p", "q", {}, 0, 0};
  for (Index k = 0; k < std::min<Index>(8, opt.vocab); ++k) dict.pairs.emplace_back(k, k);
  res.pairs.push_back({"p", "q", std::move(dict)});
  return res;
}

inline TrainConfig toy_config(std::uint64_t seed, const ToyModelOptions& opt = {}) {
  TrainConfig cfg;
  cfg.dim_common = opt.dim_common;
  cfg.filters = opt.filters;
  cfg.widths = opt.widths;
  cfg.neighbors = opt.neighbors;
  cfg.components = opt.components;
  cfg.seed = seed;
  cfg.epochs = 0;
  return cfg;
}

// Finite-difference check of the full O_theta gradient on a freshly
// initialised toy model.
inline GradCheckReport check_toy_model(std::uint64_t seed, double tolerance = 1e-4,
                                       const ToyModelOptions& opt = {}) {
  const TrainingResources res = make_toy_resources(seed, opt);
  const TrainConfig cfg = toy_config(seed, opt);
  Trainer trainer(res, cfg);
  const PairData& pd = trainer.pairs().front();
  ModelParams params = trainer.params();
  LanguageParams& p_i = params.languages[pd.lang_i];
  LanguageParams& p_j = params.languages[pd.lang_j];
  LanguageParams g_i = zeros_like(p_i);
  LanguageParams g_j = zeros_like(p_j);
  const std::vector<Index> rows = all_rows(pd);
  total_loss(pd, rows, p_i, p_j, cfg.components, &g_i, &g_j);

  std::vector<ParamBlock> blocks = param_blocks(p_i, g_i, cfg.components, StepKind::kAll);
  for (ParamBlock& b : param_blocks(p_j, g_j, cfg.components, StepKind::kAll)) blocks.push_back(b);
  const auto loss = [&] { return total_loss(pd, rows, p_i, p_j, cfg.components).total(); };
  return finite_diff_check(loss, blocks, tolerance);
}

}  // namespace ccnet

#endif  // CCNET_DIAGNOSTICS_HPP
