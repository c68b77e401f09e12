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

#ifndef CCNET_MODEL_HPP
#define CCNET_MODEL_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ccnet/chars.hpp"
#include "ccnet/corpus_io.hpp"
#include "ccnet/corrnet.hpp"
#include "ccnet/gradcheck.hpp"
#include "ccnet/neighborhood.hpp"
#include "ccnet/random.hpp"
#include "ccnet/text.hpp"

namespace ccnet {

// Which alignment signals are trained. Word alignment is always on.
struct Components {
  bool neighbors = true;
  bool chars = true;
  bool lingprops = true;

  static Components word_only() { return {false, false, false}; }

  // "W", "W+N", "W+N+Ch", "W+N+L", "W+N+Ch+L" (any '+'-joined subset containing W).
  static Components parse(const std::string& value) {
    Components c = word_only();
    bool word = false;
    for (std::string_view tok : text::split(value, '+')) {
      tok = text::trim(tok);
      if (tok == "W") {
        word = true;
      } else if (tok == "N") {
        c.neighbors = true;
      } else if (tok == "Ch") {
        c.chars = true;
      } else if (tok == "L") {
        c.lingprops = true;
      } else {
        throw Error("unknown component '" + std::string(tok) + "' in '" + value + "'");
      }
    }
    if (!word) throw Error("components must include W: '" + value + "'");
    return c;
  }

  std::string str() const {
    std::string s = "W";
    if (neighbors) s += "+N";
    if (chars) s += "+Ch";
    if (lingprops) s += "+L";
    return s;
  }

  bool operator==(const Components&) const = default;
};

struct TrainConfig {
  Index dim_common = 512;
  Index char_dim = 0;  // 0: same as the word embedding dimension
  Index filters = 20;
  std::vector<int> widths{1, 2, 3};
  Index batch_size = 500;
  double learning_rate = 0.5;
  Index neighbors = 5;
  int epochs = 100;
  std::uint64_t seed = 1;
  Components components;
  // Stop when O_theta improved by less than this (relative) over `patience` epochs.
  double early_stop_tolerance = 1e-5;
  int early_stop_patience = 5;
};

// All trainable parameters of one language.
struct LanguageParams {
  std::string language;
  ProjectionParams projection;
  NeighborParams neighbor;
  CharEmbeddingTable chars;
  std::vector<ConvFilterBank> banks;  // ascending width
  Matrix cluster_bias;                // b^R: 1 x h
  Index neighbor_count = 0;           // 0 when the neighbour component is off
  Components components;

  Index common_dim() const { return projection.common_dim(); }
  Index char_rep_dim() const { return ccnet::char_rep_dim(banks); }
};

struct ModelParams {
  std::vector<LanguageParams> languages;

  const LanguageParams* find(const std::string& language) const {
    for (const auto& l : languages)
      if (l.language == language) return &l;
    return nullptr;
  }
  LanguageParams* find(const std::string& language) {
    for (auto& l : languages)
      if (l.language == language) return &l;
    return nullptr;
  }
};

inline LanguageParams zeros_like(const LanguageParams& p) {
  LanguageParams g;
  g.language = p.language;
  g.projection = zeros_like(p.projection);
  g.neighbor = zeros_like(p.neighbor);
  g.chars.vectors = Matrix::Zero(p.chars.vectors.rows(), p.chars.vectors.cols());
  for (const auto& b : p.banks) {
    g.banks.push_back({b.width, Matrix::Zero(b.weights.rows(), b.weights.cols()),
                       Matrix::Zero(1, b.bias.cols())});
  }
  g.cluster_bias = Matrix::Zero(1, p.cluster_bias.cols());
  return g;
}

inline void set_zero(LanguageParams& g) {
  g.projection.weight.setZero();
  g.projection.bias.setZero();
  g.projection.recon_bias.setZero();
  g.neighbor.weight.setZero();
  g.neighbor.recon_bias.setZero();
  g.chars.vectors.setZero();
  for (auto& b : g.banks) {
    b.weights.setZero();
    b.bias.setZero();
  }
  g.cluster_bias.setZero();
}

// Parameter groups touched by an optimisation step.
enum class StepKind {
  kBatch,    // O_W (+ O_N, O_char when enabled)
  kCluster,  // O_R: W and b^R only
  kAll,      // every enabled parameter, for checks
};

// Blocks of `p` paired with the matching buffers of `g` (same layout).
inline std::vector<ParamBlock> param_blocks(LanguageParams& p, LanguageParams& g,
                                            const Components& enabled, StepKind kind) {
  std::vector<ParamBlock> out;
  const std::string pre = p.language + "/";
  const bool batch = kind != StepKind::kCluster;
  out.push_back({pre + "W", &p.projection.weight, &g.projection.weight, 0});
  if (batch) {
    out.push_back({pre + "b", &p.projection.bias, &g.projection.bias, 0});
    out.push_back({pre + "b_rec", &p.projection.recon_bias, &g.projection.recon_bias, 0});
    if (enabled.neighbors) {
      out.push_back({pre + "U", &p.neighbor.weight, &g.neighbor.weight, 0});
      out.push_back({pre + "b_nbr", &p.neighbor.recon_bias, &g.neighbor.recon_bias, 0});
    }
    if (enabled.chars) {
      out.push_back({pre + "char_emb", &p.chars.vectors, &g.chars.vectors, 1});
      for (std::size_t k = 0; k < p.banks.size(); ++k) {
        const std::string w = std::to_string(p.banks[k].width);
        out.push_back({pre + "conv" + w + ".weight", &p.banks[k].weights, &g.banks[k].weights, 0});
        out.push_back({pre + "conv" + w + ".bias", &p.banks[k].bias, &g.banks[k].bias, 0});
      }
    }
  }
  if (kind != StepKind::kBatch && enabled.lingprops) {
    out.push_back({pre + "b_cluster", &p.cluster_bias, &g.cluster_bias, 0});
  }
  return out;
}

struct LanguageInit {
  LanguageParams params;
  std::size_t unused_chars = 0;
};

// Weights: uniform in +-sqrt(6 / (fan_in + fan_out)); biases: zero; character
// embeddings: mean of the word vectors containing the character. Every block
// draws from its own seeded stream, so toggling a component never changes
// the initial values of the others.
inline LanguageInit init_language_params(const EmbeddingTable& table, const TrainConfig& cfg) {
  const std::string& lang = table.language();
  const Index d = table.dim();
  const Index h = cfg.dim_common;
  const Index dc = cfg.char_dim > 0 ? cfg.char_dim : d;
  if (h < 1 || cfg.filters < 1 || cfg.widths.empty()) throw Error("invalid model dimensions");
  const auto stream = [&](const std::string& name) { return make_stream(cfg.seed, lang + "/" + name); };

  LanguageInit init;
  LanguageParams& p = init.params;
  p.language = lang;
  p.components = cfg.components;
  p.neighbor_count = cfg.components.neighbors ? cfg.neighbors : 0;
  {
    auto rng = stream("W");
    p.projection = {scaled_uniform(d, h, d, h, rng), Matrix::Zero(1, h), Matrix::Zero(1, d)};
  }
  if (cfg.components.neighbors) {
    auto rng = stream("U");
    p.neighbor = {scaled_uniform(d, h, d, h, rng), Matrix::Zero(1, d)};
  } else {
    p.neighbor = {Matrix::Zero(d, h), Matrix::Zero(1, d)};
  }
  CharInit chars = init_char_embeddings(table, build_char_inventory(table.vocab), dc);
  p.chars = std::move(chars.table);
  init.unused_chars = chars.unused_chars;
  std::vector<int> widths = cfg.widths;
  std::sort(widths.begin(), widths.end());
  widths.erase(std::unique(widths.begin(), widths.end()), widths.end());
  for (int n : widths) {
    if (n < 1) throw Error("filter widths must be >= 1");
    auto rng = stream("conv" + std::to_string(n));
    p.banks.push_back({n, scaled_uniform(cfg.filters, n * dc, n * dc, cfg.filters, rng),
                       Matrix::Zero(1, cfg.filters)});
  }
  p.cluster_bias = Matrix::Zero(1, h);
  return init;
}

// ---------------------------------------------------------------------------
// Checkpoints: repeated "PARAM <language> <name> <rows> <cols>" headers, each
// followed by <rows> lines of space-separated values (9 significant digits).

namespace detail {

inline void append_block(std::string& out, const std::string& lang, const std::string& name,
                         const Matrix& m) {
  out += "PARAM " + lang + " " + name + " " + std::to_string(m.rows()) + " " +
         std::to_string(m.cols()) + "\n";
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out += ' ';
      text::append_general(out, m(r, c), 9);
    }
    out += '\n';
  }
}

}  // namespace detail

inline std::string format_checkpoint(const LanguageParams& p) {
  std::string out;
  const std::string& l = p.language;
  Matrix flags(1, 3);
  flags << p.components.neighbors, p.components.chars, p.components.lingprops;
  detail::append_block(out, l, "components", flags);
  detail::append_block(out, l, "neighbor_count",
                       Matrix::Constant(1, 1, static_cast<double>(p.neighbor_count)));
  Matrix codes(p.chars.inventory.size(), 1);
  for (Index k = 0; k < codes.rows(); ++k)
    codes(k, 0) = static_cast<double>(p.chars.inventory.chars[static_cast<std::size_t>(k)]);
  detail::append_block(out, l, "char_codes", codes);
  detail::append_block(out, l, "W", p.projection.weight);
  detail::append_block(out, l, "b", p.projection.bias);
  detail::append_block(out, l, "b_rec", p.projection.recon_bias);
  detail::append_block(out, l, "U", p.neighbor.weight);
  detail::append_block(out, l, "b_nbr", p.neighbor.recon_bias);
  detail::append_block(out, l, "char_emb", p.chars.vectors);
  for (const auto& b : p.banks) {
    detail::append_block(out, l, "conv" + std::to_string(b.width) + ".weight", b.weights);
    detail::append_block(out, l, "conv" + std::to_string(b.width) + ".bias", b.bias);
  }
  detail::append_block(out, l, "b_cluster", p.cluster_bias);
  return out;
}

inline void save_checkpoint(const LanguageParams& p, const std::string& path) {
  text::write_file(path, format_checkpoint(p));
}

inline std::vector<LanguageParams> parse_checkpoint(std::istream& in, const std::string& source) {
  // Blocks grouped by language, in file order.
  std::vector<std::pair<std::string, std::map<std::string, Matrix>>> langs;
  std::vector<std::vector<std::string>> order;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = text::strip_cr(raw);
    if (text::trim(line).empty()) continue;
    const auto head = text::split_spaces(line);
    Index rows = 0, cols = 0;
    if (head.size() != 5 || head[0] != "PARAM" || !text::parse_int(head[3], rows) ||
        !text::parse_int(head[4], cols) || rows < 1 || cols < 1) {
      throw ParseError(source, line_no, "expected 'PARAM <language> <name> <rows> <cols>'");
    }
    const std::string lang(head[1]);
    const std::string name(head[2]);
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
      if (!std::getline(in, raw)) throw ParseError(source, line_no + 1, "truncated block " + name);
      ++line_no;
      const auto vals = text::split_spaces(text::strip_cr(raw));
      if (static_cast<Index>(vals.size()) != cols) {
        throw ParseError(source, line_no, "expected " + std::to_string(cols) + " values");
      }
      for (Index c = 0; c < cols; ++c) {
        double v = 0.0;
        if (!text::parse_double(vals[static_cast<std::size_t>(c)], v) || !std::isfinite(v)) {
          throw ParseError(source, line_no, "bad value in block " + name);
        }
        m(r, c) = v;
      }
    }
    auto it = std::find_if(langs.begin(), langs.end(), [&](const auto& e) { return e.first == lang; });
    if (it == langs.end()) {
      langs.push_back({lang, {}});
      order.emplace_back();
      it = langs.end() - 1;
    }
    const auto idx = static_cast<std::size_t>(it - langs.begin());
    if (!it->second.emplace(name, std::move(m)).second) {
      throw ParseError(source, line_no, "duplicate block " + lang + "/" + name);
    }
    order[idx].push_back(name);
  }

  std::vector<LanguageParams> out;
  for (std::size_t k = 0; k < langs.size(); ++k) {
    auto& [lang, blocks] = langs[k];
    const auto take = [&, &lang = lang, &blocks = blocks](const std::string& name) -> Matrix {
      const auto it = blocks.find(name);
      if (it == blocks.end()) throw ParseError(source, 0, "missing block " + lang + "/" + name);
      return it->second;
    };
    LanguageParams p;
    p.language = lang;
    const Matrix flags = take("components");
    if (flags.size() != 3) throw ParseError(source, 0, "components block must be 1x3");
    p.components = {flags(0) != 0.0, flags(1) != 0.0, flags(2) != 0.0};
    p.neighbor_count = static_cast<Index>(take("neighbor_count")(0, 0));
    const Matrix codes = take("char_codes");
    p.chars.inventory.language = lang;
    for (Index r = 0; r < codes.rows(); ++r)
      p.chars.inventory.chars.push_back(static_cast<char32_t>(codes(r, 0)));
    p.projection = {take("W"), take("b"), take("b_rec")};
    p.neighbor = {take("U"), take("b_nbr")};
    p.chars.vectors = take("char_emb");
    for (const std::string& name : order[k]) {
      if (name.rfind("conv", 0) == 0 && name.size() > 11 &&
          name.compare(name.size() - 7, 7, ".weight") == 0) {
        int width = 0;
        if (!text::parse_int(std::string_view(name).substr(4, name.size() - 11), width)) {
          throw ParseError(source, 0, "bad bank name " + name);
        }
        p.banks.push_back({width, take(name), take("conv" + std::to_string(width) + ".bias")});
      }
    }
    p.cluster_bias = take("b_cluster");
    const Index d = p.projection.weight.rows();
    const Index h = p.projection.weight.cols();
    if (p.projection.bias.cols() != h || p.projection.recon_bias.cols() != d ||
        p.neighbor.weight.rows() != d || p.neighbor.weight.cols() != h ||
        p.cluster_bias.cols() != h || p.chars.vectors.rows() != p.chars.inventory.size()) {
      throw ParseError(source, 0, "inconsistent block shapes for language " + lang);
    }
    out.push_back(std::move(p));
  }
  return out;
}

inline std::vector<LanguageParams> load_checkpoint(const std::string& path) {
  std::ifstream in = text::open_input(path);
  return parse_checkpoint(in, path);
}

}  // namespace ccnet

#endif  // CCNET_MODEL_HPP
