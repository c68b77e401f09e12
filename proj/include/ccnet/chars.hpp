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

#ifndef CCNET_CHARS_HPP
#define CCNET_CHARS_HPP

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "ccnet/corpus_io.hpp"
#include "ccnet/error.hpp"
#include "ccnet/numerics.hpp"
#include "ccnet/text.hpp"

namespace ccnet {

// Character lookup embeddings. Row 0 is PAD and stays exactly zero.
struct CharEmbeddingTable {
  CharInventory inventory;
  Matrix vectors;  // |inventory| x d_c

  Index dim() const { return vectors.cols(); }
};

struct CharInit {
  CharEmbeddingTable table;
  // Characters contained in no word; their rows are zero.
  std::size_t unused_chars = 0;
};

// Each character starts as the mean vector of the words containing it (each
// word counted once), truncated to the first `char_dim` components.
inline CharInit init_char_embeddings(const EmbeddingTable& words, const CharInventory& inventory,
                                     Index char_dim) {
  if (char_dim < 1 || char_dim > words.dim()) {
    throw DimensionError("init_char_embeddings: char dim must be in [1, word dim]");
  }
  CharInit init{{inventory, Matrix::Zero(inventory.size(), char_dim)}, 0};
  std::vector<Index> counts(static_cast<std::size_t>(inventory.size()), 0);
  std::vector<Index> members;
  for (Index w = 0; w < words.size(); ++w) {
    members.clear();
    for (char32_t c : text::decode_utf8(words.vocab.word(w))) {
      const Index k = inventory.find(c);
      if (k > 0) members.push_back(k);
    }
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (Index k : members) {
      init.table.vectors.row(k) += words.vectors.row(w).head(char_dim);
      ++counts[static_cast<std::size_t>(k)];
    }
  }
  for (Index k = 1; k < inventory.size(); ++k) {
    if (counts[static_cast<std::size_t>(k)] == 0) {
      ++init.unused_chars;
    } else {
      init.table.vectors.row(k) /= static_cast<double>(counts[static_cast<std::size_t>(k)]);
    }
  }
  return init;
}

// Maps a word to inventory indices. Unknown characters either throw or, with
// `skip_unknown`, are dropped; a word left with no characters always throws.
inline std::vector<Index> encode_word(const CharInventory& inventory, const std::string& word,
                                      bool skip_unknown = false) {
  std::vector<Index> out;
  for (char32_t c : text::decode_utf8(word)) {
    const Index k = inventory.find(c);
    if (k < 0) {
      if (skip_unknown) continue;
      throw LookupError("character U+" + std::to_string(static_cast<std::uint32_t>(c)) + " of '" +
                        word + "' is not in the inventory");
    }
    out.push_back(k);
  }
  if (out.empty()) throw LookupError("word '" + word + "' has no characters in the inventory");
  return out;
}

// F filters of one width n over concatenated n-gram character vectors.
struct ConvFilterBank {
  int width = 1;
  Matrix weights;  // F x (n * d_c)
  Matrix bias;     // 1 x F

  Index filters() const { return weights.rows(); }
};

inline Index char_rep_dim(std::span<const ConvFilterBank> banks) {
  Index total = 0;
  for (const auto& b : banks) total += b.filters();
  return total;
}

struct BankTrace {
  Matrix inputs;       // positions x (n * d_c)
  Matrix activations;  // positions x F
  MaxPool pool;
};

namespace detail {

inline Index effective_length(std::span<const Index> chars) {
  Index k = static_cast<Index>(chars.size());
  while (k > 0 && chars[static_cast<std::size_t>(k - 1)] == CharInventory::kPad) --k;
  return k;
}

}  // namespace detail

// Character-level word representation: for each bank (ascending width), tanh
// of every n-gram window followed by a per-filter max over positions; the
// per-bank outputs are concatenated. Trailing PAD in `chars` is ignored and a
// word shorter than n is right-padded to give exactly one window.
inline Matrix conv_word(std::span<const Index> chars, const CharEmbeddingTable& table,
                        std::span<const ConvFilterBank> banks,
                        std::vector<BankTrace>* trace = nullptr) {
  const Index k = detail::effective_length(chars);
  if (k == 0) throw Error("conv_word: empty word");
  const Index dc = table.dim();
  Matrix out(1, char_rep_dim(banks));
  if (trace) trace->clear();
  Index offset = 0;
  for (const ConvFilterBank& bank : banks) {
    const Index n = bank.width;
    if (bank.weights.cols() != n * dc) throw DimensionError("conv_word: filter width/char dim");
    const Index positions = std::max<Index>(1, k - n + 1);
    Matrix inputs = Matrix::Zero(positions, n * dc);
    for (Index p = 0; p < positions; ++p) {
      for (Index s = 0; s < n; ++s) {
        const Index at = p + s;
        const Index c = at < k ? chars[static_cast<std::size_t>(at)] : CharInventory::kPad;
        if (c < 0 || c >= table.vectors.rows()) throw DimensionError("conv_word: char index");
        if (c != CharInventory::kPad) inputs.block(p, s * dc, 1, dc) = table.vectors.row(c);
      }
    }
    Matrix z = inputs * bank.weights.transpose();
    z.rowwise() += bank.bias.row(0);
    Matrix act = tanh_map(z);
    MaxPool pool = max_pool_rows(act);
    out.block(0, offset, 1, bank.filters()) = pool.values;
    offset += bank.filters();
    if (trace) trace->push_back({std::move(inputs), std::move(act), std::move(pool)});
  }
  return out;
}

// Accumulates into `d_chars` (same shape as table.vectors) and `d_banks`
// the gradient of a loss whose gradient w.r.t. conv_word's output is `dout`.
// The PAD row receives nothing.
inline void conv_word_backward(std::span<const Index> chars, const CharEmbeddingTable& table,
                               std::span<const ConvFilterBank> banks,
                               const std::vector<BankTrace>& trace, const Matrix& dout,
                               Matrix& d_chars, std::span<ConvFilterBank> d_banks) {
  const Index k = detail::effective_length(chars);
  const Index dc = table.dim();
  Index offset = 0;
  for (std::size_t b = 0; b < banks.size(); ++b) {
    const ConvFilterBank& bank = banks[b];
    const BankTrace& t = trace[b];
    ConvFilterBank& g = d_banks[b];
    const Index n = bank.width;
    for (Index f = 0; f < bank.filters(); ++f) {
      const Index p = t.pool.argmax[static_cast<std::size_t>(f)];
      const double a = t.activations(p, f);
      const double dz = dout(0, offset + f) * (1.0 - a * a);
      if (dz == 0.0) continue;
      g.weights.row(f) += dz * t.inputs.row(p);
      g.bias(0, f) += dz;
      for (Index s = 0; s < n; ++s) {
        const Index at = p + s;
        if (at >= k) break;
        const Index c = chars[static_cast<std::size_t>(at)];
        if (c == CharInventory::kPad) continue;
        d_chars.row(c) += dz * bank.weights.block(f, s * dc, 1, dc);
      }
    }
    offset += bank.filters();
  }
}

// O_char for one pair: cosine loss between row-aligned character representations.
inline double loss_char(const Matrix& reps_i, const Matrix& reps_j, Matrix* d_i = nullptr,
                        Matrix* d_j = nullptr) {
  return cosine_row_loss(reps_i, reps_j, d_i, d_j);
}

// [h ; w_hat]: projected part first, character part second.
inline Eigen::RowVectorXd final_representation(const Eigen::RowVectorXd& h,
                                               const Eigen::RowVectorXd& char_rep) {
  Eigen::RowVectorXd out(h.size() + char_rep.size());
  out << h, char_rep;
  return out;
}

}  // namespace ccnet

#endif  // CCNET_CHARS_HPP
