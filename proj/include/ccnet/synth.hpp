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

#ifndef CCNET_SYNTH_HPP
#define CCNET_SYNTH_HPP

#include <Eigen/QR>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ccnet/corpus_io.hpp"
#include "ccnet/random.hpp"
#include "ccnet/text.hpp"

namespace ccnet {

struct SynthOptions {
  std::uint64_t seed = 1;
  Index vocab_size = 500;
  Index dim = 32;
  double noise = 0.01;
  double train_fraction = 0.8;
  Index word_clusters = 25;
  Index words_per_cluster = 6;
  Index pair_clusters = 10;
  Index pairs_per_cluster = 4;
};

// Two languages where word k of B is a rotated, noisy copy of word k of A
// and its spelling differs from A's by one substituted letter.
struct SynthData {
  EmbeddingTable a;
  EmbeddingTable b;
  Matrix rotation;  // B ~ A * rotation
  std::vector<std::pair<std::string, std::string>> train;
  std::vector<std::pair<std::string, std::string>> heldout;
  LinguisticClusterSet clusters_a;
  LinguisticClusterSet clusters_b;
};

namespace detail {

inline constexpr std::string_view kConsonants = "bdfgklmnprstvz";
inline constexpr std::string_view kVowels = "aeiou";

inline std::string random_spelling(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> syllables(3, 4);
  std::uniform_int_distribution<std::size_t> cons(0, kConsonants.size() - 1);
  std::uniform_int_distribution<std::size_t> vow(0, kVowels.size() - 1);
  std::string w;
  for (int s = syllables(rng); s > 0; --s) {
    w += kConsonants[cons(rng)];
    w += kVowels[vow(rng)];
  }
  return w;
}

// Replaces one letter by a different letter of the same class.
inline std::string mutate_spelling(const std::string& w, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pos(0, w.size() - 1);
  std::string out = w;
  const std::size_t p = pos(rng);
  const std::string_view pool =
      kVowels.find(w[p]) != std::string_view::npos ? kVowels : kConsonants;
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 2);
  std::size_t k = pick(rng);
  if (pool[k] == w[p]) k = pool.size() - 1;
  out[p] = pool[k];
  return out;
}

}  // namespace detail

inline SynthData make_synthetic(const SynthOptions& opt) {
  if (opt.vocab_size < 2 || opt.dim < 1 || opt.noise < 0.0) throw Error("invalid synth options");
  const Index n = opt.vocab_size;
  const Index d = opt.dim;
  SynthData data;

  auto vec_rng = make_stream(opt.seed, "synth/vectors");
  Matrix a = gaussian_matrix(n, d, 1.0, vec_rng);
  for (Index r = 0; r < n; ++r) a.row(r).normalize();
  auto rot_rng = make_stream(opt.seed, "synth/rotation");
  Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(d, d, 1.0, rot_rng));
  data.rotation = qr.householderQ();
  auto noise_rng = make_stream(opt.seed, "synth/noise");
  Matrix b = a * data.rotation;
  if (opt.noise > 0.0) b += gaussian_matrix(n, d, opt.noise, noise_rng);

  auto spell_rng = make_stream(opt.seed, "synth/spelling");
  std::set<std::string> used_a, used_b;
  std::vector<std::string> words_a, words_b;
  while (static_cast<Index>(words_a.size()) < n) {
    std::string w = detail::random_spelling(spell_rng);
    if (!used_a.insert(w).second) continue;
    std::string t;
    do {
      t = detail::mutate_spelling(w, spell_rng);
    } while (used_b.count(t) > 0);
    used_b.insert(t);
    words_a.push_back(std::move(w));
    words_b.push_back(std::move(t));
  }
  data.a = {Vocabulary("a"), a};
  data.b = {Vocabulary("b"), b};
  for (Index k = 0; k < n; ++k) {
    data.a.vocab.add(words_a[static_cast<std::size_t>(k)]);
    data.b.vocab.add(words_b[static_cast<std::size_t>(k)]);
  }

  auto split_rng = make_stream(opt.seed, "synth/split");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), split_rng);
  const auto n_train = static_cast<std::size_t>(
      std::clamp<double>(std::round(opt.train_fraction * static_cast<double>(n)), 1.0,
                         static_cast<double>(n)));
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto entry = std::make_pair(words_a[static_cast<std::size_t>(order[k])],
                                words_b[static_cast<std::size_t>(order[k])]);
    (k < n_train ? data.train : data.heldout).push_back(std::move(entry));
  }

  // Translation-consistent clusters sharing function ids across languages.
  auto cluster_rng = make_stream(opt.seed, "synth/clusters");
  data.clusters_a.language = "a";
  data.clusters_b.language = "b";
  const auto sample = [&](Index count) {
    std::vector<Index> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), Index{0});
    std::shuffle(all.begin(), all.end(), cluster_rng);
    all.resize(static_cast<std::size_t>(std::min(count, n)));
    return all;
  };
  char id[32];
  for (Index c = 0; c < opt.word_clusters; ++c) {
    std::snprintf(id, sizeof id, "class_%03d", static_cast<int>(c));
    LinguisticCluster ca{id, MemberKind::kWord, {}, {}}, cb{id, MemberKind::kWord, {}, {}};
    for (Index w : sample(opt.words_per_cluster)) {
      ca.words.push_back(words_a[static_cast<std::size_t>(w)]);
      cb.words.push_back(words_b[static_cast<std::size_t>(w)]);
    }
    data.clusters_a.clusters.push_back(std::move(ca));
    data.clusters_b.clusters.push_back(std::move(cb));
  }
  for (Index c = 0; c < opt.pair_clusters; ++c) {
    std::snprintf(id, sizeof id, "affix_%03d", static_cast<int>(c));
    LinguisticCluster ca{id, MemberKind::kPair, {}, {}}, cb{id, MemberKind::kPair, {}, {}};
    const std::vector<Index> picks = sample(2 * opt.pairs_per_cluster);
    for (std::size_t k = 0; k + 1 < picks.size(); k += 2) {
      const auto u = static_cast<std::size_t>(picks[k]);
      const auto v = static_cast<std::size_t>(picks[k + 1]);
      ca.pairs.emplace_back(words_a[u], words_a[v]);
      cb.pairs.emplace_back(words_b[u], words_b[v]);
    }
    data.clusters_a.clusters.push_back(std::move(ca));
    data.clusters_b.clusters.push_back(std::move(cb));
  }
  return data;
}

struct SynthFiles {
  std::string embeddings_a, embeddings_b;
  std::string dict_train, dict_heldout;
  std::string clusters_a, clusters_b;
  std::string manifest;
};

inline std::string format_pairs(const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::string out;
  for (const auto& [x, y] : pairs) out += x + "\t" + y + "\n";
  return out;
}

// Writes every resource plus a training manifest into `dir`.
inline SynthFiles write_synthetic(const SynthData& data, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const auto at = [&](const char* name) { return (fs::path(dir) / name).string(); };
  SynthFiles f{at("a.vec"), at("b.vec"), at("dict.train.tsv"), at("dict.heldout.tsv"),
               at("clusters.a.tsv"), at("clusters.b.tsv"), at("manifest.txt")};
  save_embeddings(data.a, f.embeddings_a);
  save_embeddings(data.b, f.embeddings_b);
  text::write_file(f.dict_train, format_pairs(data.train));
  text::write_file(f.dict_heldout, format_pairs(data.heldout));
  text::write_file(f.clusters_a, format_clusters(data.clusters_a));
  text::write_file(f.clusters_b, format_clusters(data.clusters_b));
  text::write_file(f.manifest,
                   "# synthetic rotated-copy task\n"
                   "languages = a b\n"
                   "embeddings.a = a.vec\n"
                   "embeddings.b = b.vec\n"
                   "clusters.a = clusters.a.tsv\n"
                   "clusters.b = clusters.b.tsv\n"
                   "dictionary.a.b = dict.train.tsv\n");
  return f;
}

}  // namespace ccnet

#endif  // CCNET_SYNTH_HPP
