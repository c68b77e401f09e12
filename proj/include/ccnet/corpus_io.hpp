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

#ifndef CCNET_CORPUS_IO_HPP
#define CCNET_CORPUS_IO_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ccnet/error.hpp"
#include "ccnet/numerics.hpp"
#include "ccnet/text.hpp"

namespace ccnet {

// Ordered set of unique words for one language.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::string language) : language_(std::move(language)) {}

  // Returns false (and leaves the vocabulary untouched) if `word` is present.
  bool add(const std::string& word) {
    const auto [it, inserted] = index_.emplace(word, static_cast<Index>(words_.size()));
    if (inserted) words_.push_back(word);
    return inserted;
  }

  // -1 when absent.
  Index find(const std::string& word) const {
    const auto it = index_.find(word);
    return it == index_.end() ? -1 : it->second;
  }

  bool contains(const std::string& word) const { return index_.count(word) > 0; }
  const std::string& word(Index i) const { return words_.at(static_cast<std::size_t>(i)); }
  const std::vector<std::string>& words() const { return words_; }
  Index size() const { return static_cast<Index>(words_.size()); }
  const std::string& language() const { return language_; }
  void set_language(std::string language) { language_ = std::move(language); }

 private:
  std::string language_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, Index> index_;
};

struct EmbeddingTable {
  Vocabulary vocab;
  Matrix vectors;  // |V| x dim

  Index size() const { return vocab.size(); }
  Index dim() const { return vectors.cols(); }
  const std::string& language() const { return vocab.language(); }
};

inline std::string language_from_path(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

// Text embedding format: "<count> <dim>" header, then one "word v1 ... vdim"
// line per word.
inline EmbeddingTable parse_embeddings(std::istream& in, const std::string& source,
                                       const std::string& language) {
  EmbeddingTable table{Vocabulary(language), Matrix()};
  std::string raw;
  std::size_t line_no = 0;
  Index count = 0, dim = 0;

  if (!std::getline(in, raw)) throw ParseError(source, 1, "missing header");
  ++line_no;
  {
    const auto fields = text::split_spaces(text::strip_cr(raw));
    if (fields.size() != 2 || !text::parse_int(fields[0], count) ||
        !text::parse_int(fields[1], dim) || count < 1 || dim < 1) {
      throw ParseError(source, line_no, "malformed header, expected '<vocab_size> <dim>'");
    }
  }
  table.vectors.resize(count, dim);

  Index row = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = text::strip_cr(raw);
    if (text::trim(line).empty()) continue;
    if (row == count) {
      throw ParseError(source, line_no,
                       "more entries than the header count " + std::to_string(count));
    }
    const auto fields = text::split_spaces(line);
    if (static_cast<Index>(fields.size()) != dim + 1) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(dim) + " values, got " +
                           std::to_string(static_cast<Index>(fields.size()) - 1));
    }
    const std::string word(fields[0]);
    if (!table.vocab.add(word)) throw ParseError(source, line_no, "duplicate word '" + word + "'");
    for (Index c = 0; c < dim; ++c) {
      double v = 0.0;
      if (!text::parse_double(fields[static_cast<std::size_t>(c) + 1], v)) {
        throw ParseError(source, line_no, "unparsable value '" +
                                              std::string(fields[static_cast<std::size_t>(c) + 1]) +
                                              "'");
      }
      if (!std::isfinite(v)) throw ParseError(source, line_no, "non-finite value");
      table.vectors(row, c) = v;
    }
    ++row;
  }
  if (row != count) {
    throw ParseError(source, line_no + 1,
                     "header announces " + std::to_string(count) + " entries, found " +
                         std::to_string(row));
  }
  return table;
}

inline EmbeddingTable load_embeddings(const std::string& path, const std::string& language = {}) {
  std::ifstream in = text::open_input(path);
  return parse_embeddings(in, path, language.empty() ? language_from_path(path) : language);
}

// Six decimals per value.
inline std::string format_embeddings(const EmbeddingTable& table) {
  std::string out;
  out.reserve(static_cast<std::size_t>(table.size() * (table.dim() * 10 + 16)) + 32);
  out += std::to_string(table.size()) + " " + std::to_string(table.dim()) + "\n";
  for (Index r = 0; r < table.size(); ++r) {
    out += table.vocab.word(r);
    for (Index c = 0; c < table.dim(); ++c) {
      out += ' ';
      text::append_fixed(out, table.vectors(r, c), 6);
    }
    out += '\n';
  }
  return out;
}

inline void save_embeddings(const EmbeddingTable& table, const std::string& path) {
  text::write_file(path, format_embeddings(table));
}

// ---------------------------------------------------------------------------
// Bilingual dictionaries

enum class UnresolvedPolicy { kSkip, kError };

struct DictionaryPairSet {
  std::string language_i;
  std::string language_j;
  std::vector<std::pair<Index, Index>> pairs;
  std::size_t skipped = 0;     // unresolved or multi-word entries
  std::size_t duplicates = 0;  // repeated entries folded into one pair

  std::size_t kept() const { return pairs.size(); }
};

inline DictionaryPairSet parse_dictionary(std::istream& in, const std::string& source,
                                          const Vocabulary& vocab_i, const Vocabulary& vocab_j,
                                          UnresolvedPolicy policy = UnresolvedPolicy::kSkip) {
  DictionaryPairSet dict{vocab_i.language(), vocab_j.language(), {}, 0, 0};
  std::set<std::pair<Index, Index>> seen;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = text::strip_cr(raw);
    if (text::trim(line).empty() || line.front() == '#') continue;
    const auto fields = text::split(line, '\t');
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw ParseError(source, line_no, "expected 'word<TAB>word'");
    }
    // Multi-word entries have no single embedding row.
    if (fields[0].find(' ') != std::string_view::npos ||
        fields[1].find(' ') != std::string_view::npos) {
      ++dict.skipped;
      continue;
    }
    const Index i = vocab_i.find(std::string(fields[0]));
    const Index j = vocab_j.find(std::string(fields[1]));
    if (i < 0 || j < 0) {
      if (policy == UnresolvedPolicy::kError) {
        throw ParseError(source, line_no,
                         "unresolved word '" + std::string(i < 0 ? fields[0] : fields[1]) + "'");
      }
      ++dict.skipped;
      continue;
    }
    if (!seen.emplace(i, j).second) {
      ++dict.duplicates;
      continue;
    }
    dict.pairs.emplace_back(i, j);
  }
  if (dict.pairs.empty()) {
    throw EmptyDictionaryError(source + ": no resolvable dictionary pairs");
  }
  return dict;
}

inline DictionaryPairSet load_dictionary(const std::string& path, const Vocabulary& vocab_i,
                                         const Vocabulary& vocab_j,
                                         UnresolvedPolicy policy = UnresolvedPolicy::kSkip) {
  std::ifstream in = text::open_input(path);
  return parse_dictionary(in, path, vocab_i, vocab_j, policy);
}

// ---------------------------------------------------------------------------
// Linguistic-property clusters

enum class MemberKind { kWord, kPair };

struct LinguisticCluster {
  std::string function_id;
  MemberKind kind = MemberKind::kWord;
  std::vector<std::string> words;                           // kWord
  std::vector<std::pair<std::string, std::string>> pairs;   // kPair: (basic, extended)

  std::size_t size() const { return kind == MemberKind::kWord ? words.size() : pairs.size(); }
};

struct LinguisticClusterSet {
  std::string language;
  std::vector<LinguisticCluster> clusters;
  std::size_t dropped_clusters = 0;  // no resolvable member
  std::size_t dropped_members = 0;

  const LinguisticCluster* find(const std::string& function_id) const {
    for (const auto& c : clusters)
      if (c.function_id == function_id) return &c;
    return nullptr;
  }
};

// Lines: "function_id<TAB>kind<TAB>member[<TAB>member...]", kind in {word, pair},
// pair members written "basic|extended". Lines sharing a function id are merged.
inline LinguisticClusterSet parse_clusters(std::istream& in, const std::string& source,
                                           const Vocabulary& vocab) {
  std::vector<LinguisticCluster> raw_clusters;
  std::map<std::string, std::size_t> by_id;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = text::strip_cr(raw);
    if (text::trim(line).empty() || line.front() == '#') continue;
    const auto fields = text::split(line, '\t');
    if (fields.size() < 3 || fields[0].empty()) {
      throw ParseError(source, line_no, "expected 'function_id<TAB>kind<TAB>member...'");
    }
    MemberKind kind;
    if (fields[1] == "word") {
      kind = MemberKind::kWord;
    } else if (fields[1] == "pair") {
      kind = MemberKind::kPair;
    } else {
      throw ParseError(source, line_no, "unknown member kind '" + std::string(fields[1]) + "'");
    }
    const std::string id(fields[0]);
    auto [it, inserted] = by_id.emplace(id, raw_clusters.size());
    if (inserted) raw_clusters.push_back({id, kind, {}, {}});
    LinguisticCluster& cluster = raw_clusters[it->second];
    if (cluster.kind != kind) {
      throw ParseError(source, line_no, "mixed member kinds in cluster '" + id + "'");
    }
    for (std::size_t f = 2; f < fields.size(); ++f) {
      const std::string_view member = fields[f];
      if (member.empty()) continue;
      const auto bar = member.find('|');
      if (kind == MemberKind::kWord) {
        if (bar != std::string_view::npos) {
          throw ParseError(source, line_no, "mixed member kinds in cluster '" + id + "'");
        }
        cluster.words.emplace_back(member);
      } else {
        if (bar == std::string_view::npos || bar == 0 || bar + 1 == member.size() ||
            member.find('|', bar + 1) != std::string_view::npos) {
          throw ParseError(source, line_no,
                           "pair member '" + std::string(member) + "' is not 'basic|extended'");
        }
        cluster.pairs.emplace_back(std::string(member.substr(0, bar)),
                                   std::string(member.substr(bar + 1)));
      }
    }
  }

  LinguisticClusterSet set{vocab.language(), {}, 0, 0};
  for (LinguisticCluster& cluster : raw_clusters) {
    LinguisticCluster kept{cluster.function_id, cluster.kind, {}, {}};
    for (auto& w : cluster.words) {
      if (vocab.contains(w)) {
        kept.words.push_back(std::move(w));
      } else {
        ++set.dropped_members;
      }
    }
    for (auto& p : cluster.pairs) {
      if (vocab.contains(p.first) && vocab.contains(p.second)) {
        kept.pairs.push_back(std::move(p));
      } else {
        ++set.dropped_members;
      }
    }
    if (kept.size() == 0) {
      ++set.dropped_clusters;
    } else {
      set.clusters.push_back(std::move(kept));
    }
  }
  return set;
}

inline LinguisticClusterSet load_clusters(const std::string& path, const Vocabulary& vocab) {
  std::ifstream in = text::open_input(path);
  return parse_clusters(in, path, vocab);
}

inline std::string format_clusters(const LinguisticClusterSet& set) {
  std::string out;
  for (const auto& c : set.clusters) {
    out += c.function_id;
    out += c.kind == MemberKind::kWord ? "\tword" : "\tpair";
    for (const auto& w : c.words) out += "\t" + w;
    for (const auto& p : c.pairs) out += "\t" + p.first + "|" + p.second;
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Character inventories

// Index 0 is the PAD symbol; real characters follow in ascending code point order.
struct CharInventory {
  static constexpr Index kPad = 0;

  std::string language;
  std::vector<char32_t> chars;  // chars[0] is the PAD placeholder (U+0000)

  Index size() const { return static_cast<Index>(chars.size()); }

  // -1 when absent. PAD is never returned for a real character.
  Index find(char32_t c) const {
    if (c == 0) return -1;
    const auto it = std::lower_bound(chars.begin() + 1, chars.end(), c);
    return it != chars.end() && *it == c ? static_cast<Index>(it - chars.begin()) : -1;
  }
};

inline CharInventory build_char_inventory(const Vocabulary& vocab) {
  std::set<char32_t> seen;
  for (const auto& w : vocab.words()) {
    for (char32_t c : text::decode_utf8(w)) {
      if (c != 0) seen.insert(c);
    }
  }
  CharInventory inv{vocab.language(), {0}};
  inv.chars.insert(inv.chars.end(), seen.begin(), seen.end());
  return inv;
}

}  // namespace ccnet

#endif  // CCNET_CORPUS_IO_HPP
