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

#ifndef CCNET_CLI_HPP
#define CCNET_CLI_HPP

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "ccnet/corpus_io.hpp"
#include "ccnet/diagnostics.hpp"
#include "ccnet/model.hpp"
#include "ccnet/neighborhood.hpp"
#include "ccnet/qvec.hpp"
#include "ccnet/synth.hpp"
#include "ccnet/text.hpp"
#include "ccnet/trainer.hpp"

namespace ccnet {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitUsage = 2 };

// ---------------------------------------------------------------------------
// Run manifests: flat "key = value" lines, '#' comments. Relative paths are
// resolved against the manifest's directory.
//
//   languages = en da
//   embeddings.en = en.vec
//   clusters.en = en.clusters.tsv        (optional)
//   dictionary.en.da = en-da.tsv
//   output = run1                        (optional)
//   epochs = 50                          (any TrainConfig key, see below)

struct DictionaryEntry {
  std::string language_i;
  std::string language_j;
  std::string path;
};

struct RunManifest {
  TrainConfig config;
  std::vector<std::string> languages;
  std::map<std::string, std::string> embeddings;
  std::map<std::string, std::string> clusters;
  std::vector<DictionaryEntry> dictionaries;
  std::string output;
  UnresolvedPolicy policy = UnresolvedPolicy::kSkip;
};

namespace detail {

inline std::vector<int> parse_widths(std::string_view s) {
  std::vector<int> out;
  for (std::string_view tok : text::split(s, ',')) {
    int w = 0;
    if (!text::parse_int(text::trim(tok), w) || w < 1) {
      throw Error("bad filter width list '" + std::string(s) + "'");
    }
    out.push_back(w);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, std::string_view value) {
  T out{};
  bool ok = false;
  if constexpr (std::is_floating_point_v<T>) {
    ok = text::parse_double(value, out);
  } else {
    ok = text::parse_int(value, out);
  }
  if (!ok) throw Error("manifest key '" + key + "': bad value '" + std::string(value) + "'");
  return out;
}

}  // namespace detail

inline void apply_config_key(TrainConfig& cfg, const std::string& key, std::string_view value) {
  using detail::parse_number;
  if (key == "dim_common") {
    cfg.dim_common = parse_number<Index>(key, value);
  } else if (key == "char_dim") {
    cfg.char_dim = parse_number<Index>(key, value);
  } else if (key == "filters") {
    cfg.filters = parse_number<Index>(key, value);
  } else if (key == "widths") {
    cfg.widths = detail::parse_widths(value);
  } else if (key == "batch_size") {
    cfg.batch_size = parse_number<Index>(key, value);
  } else if (key == "lr") {
    cfg.learning_rate = parse_number<double>(key, value);
  } else if (key == "neighbors") {
    cfg.neighbors = parse_number<Index>(key, value);
  } else if (key == "epochs") {
    cfg.epochs = parse_number<int>(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "components") {
    cfg.components = Components::parse(std::string(value));
  } else if (key == "early_stop_tolerance") {
    cfg.early_stop_tolerance = parse_number<double>(key, value);
  } else if (key == "early_stop_patience") {
    cfg.early_stop_patience = parse_number<int>(key, value);
  } else {
    throw Error("unknown manifest key '" + key + "'");
  }
}

inline RunManifest parse_manifest(std::istream& in, const std::string& source,
                                  const std::string& base_dir) {
  namespace fs = std::filesystem;
  const auto resolve = [&](std::string_view p) {
    fs::path path{std::string(p)};
    return (path.is_absolute() ? path : fs::path(base_dir) / path).lexically_normal().string();
  };
  RunManifest m;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected 'key = value'");
    const std::string key(text::trim(line.substr(0, eq)));
    const std::string_view value = text::trim(line.substr(eq + 1));
    const auto parts = text::split(key, '.');
    try {
      if (key == "languages") {
        for (auto tok : text::split_spaces(value)) m.languages.emplace_back(tok);
      } else if (parts.size() == 2 && parts[0] == "embeddings") {
        m.embeddings[std::string(parts[1])] = resolve(value);
      } else if (parts.size() == 2 && parts[0] == "clusters") {
        m.clusters[std::string(parts[1])] = resolve(value);
      } else if (parts.size() == 3 && parts[0] == "dictionary") {
        m.dictionaries.push_back({std::string(parts[1]), std::string(parts[2]), resolve(value)});
      } else if (key == "output") {
        m.output = resolve(value);
      } else if (key == "dictionary_policy") {
        if (value == "skip") {
          m.policy = UnresolvedPolicy::kSkip;
        } else if (value == "error") {
          m.policy = UnresolvedPolicy::kError;
        } else {
          throw Error("dictionary_policy must be 'skip' or 'error'");
        }
      } else {
        apply_config_key(m.config, key, value);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  return m;
}

inline RunManifest load_manifest(const std::string& path) {
  std::ifstream in = text::open_input(path);
  return parse_manifest(in, path, std::filesystem::path(path).parent_path().string());
}

inline std::string format_manifest(const RunManifest& m) {
  const TrainConfig& c = m.config;
  std::string out = "languages =";
  for (const auto& l : m.languages) out += " " + l;
  out += "\n";
  for (const auto& [l, p] : m.embeddings) out += "embeddings." + l + " = " + p + "\n";
  for (const auto& [l, p] : m.clusters) out += "clusters." + l + " = " + p + "\n";
  for (const auto& d : m.dictionaries) {
    out += "dictionary." + d.language_i + "." + d.language_j + " = " + d.path + "\n";
  }
  if (!m.output.empty()) out += "output = " + m.output + "\n";
  out += std::string("dictionary_policy = ") +
         (m.policy == UnresolvedPolicy::kSkip ? "skip" : "error") + "\n";
  std::string widths;
  for (int w : c.widths) widths += (widths.empty() ? "" : ",") + std::to_string(w);
  std::string lr, tol;
  text::append_general(lr, c.learning_rate, 17);
  text::append_general(tol, c.early_stop_tolerance, 17);
  out += "dim_common = " + std::to_string(c.dim_common) + "\n";
  out += "char_dim = " + std::to_string(c.char_dim) + "\n";
  out += "filters = " + std::to_string(c.filters) + "\n";
  out += "widths = " + widths + "\n";
  out += "batch_size = " + std::to_string(c.batch_size) + "\n";
  out += "lr = " + lr + "\n";
  out += "neighbors = " + std::to_string(c.neighbors) + "\n";
  out += "epochs = " + std::to_string(c.epochs) + "\n";
  out += "seed = " + std::to_string(c.seed) + "\n";
  out += "components = " + c.components.str() + "\n";
  out += "early_stop_tolerance = " + tol + "\n";
  out += "early_stop_patience = " + std::to_string(c.early_stop_patience) + "\n";
  return out;
}

// Checks every referenced path and loads the resources.
inline TrainingResources load_resources(const RunManifest& m) {
  namespace fs = std::filesystem;
  if (m.languages.size() < 2) throw Error("manifest must list at least 2 languages");
  if (m.dictionaries.empty()) throw Error("manifest lists no dictionary");
  const auto require = [](const std::string& what, const std::string& path) {
    if (!fs::exists(path)) throw IoError(what + " not found: " + path);
  };
  for (const auto& l : m.languages) {
    const auto it = m.embeddings.find(l);
    if (it == m.embeddings.end()) throw Error("no embeddings given for language '" + l + "'");
    require("embeddings", it->second);
    if (const auto c = m.clusters.find(l); c != m.clusters.end()) require("cluster file", c->second);
  }
  for (const auto& d : m.dictionaries) require("dictionary", d.path);

  TrainingResources res;
  for (const auto& l : m.languages) {
    LanguageResources lr{load_embeddings(m.embeddings.at(l), l), std::nullopt};
    if (const auto c = m.clusters.find(l); c != m.clusters.end()) {
      lr.clusters = load_clusters(c->second, lr.table.vocab);
    }
    res.languages.push_back(std::move(lr));
  }
  for (const auto& d : m.dictionaries) {
    const auto& vi = res.languages[res.index_of(d.language_i)].table.vocab;
    const auto& vj = res.languages[res.index_of(d.language_j)].table.vocab;
    res.pairs.push_back({d.language_i, d.language_j, load_dictionary(d.path, vi, vj, m.policy)});
  }
  return res;
}

// ---------------------------------------------------------------------------
// Subcommands

inline int cmd_train(RunManifest m, const std::string& out_override, std::ostream& out,
                     std::ostream& err) {
  namespace fs = std::filesystem;
  if (!out_override.empty()) m.output = out_override;
  if (m.output.empty()) throw Error("no output directory (use --out or 'output =' in the manifest)");
  const TrainingResources res = load_resources(m);
  for (const auto& l : res.languages) {
    if (l.clusters && l.clusters->dropped_clusters > 0) {
      err << "warning: " << l.clusters->dropped_clusters << " cluster(s) of '" << l.language()
          << "' have no in-vocabulary member\n";
    }
  }
  for (const auto& p : res.pairs) {
    if (p.dictionary.skipped > 0) {
      err << "warning: " << p.dictionary.skipped << " unresolved entries skipped in dictionary "
          << p.language_i << "-" << p.language_j << "\n";
    }
  }
  fs::create_directories(m.output);
  const fs::path dir(m.output);
  text::write_file((dir / "manifest.txt").string(), format_manifest(m));

  std::string log = format_log_header();
  const std::string log_path = (dir / "train_log.tsv").string();
  text::write_file(log_path, log);
  TrainOptions opt;
  opt.checkpoint_dir = (dir / "checkpoints").string();
  opt.on_epoch = [&](const EpochRecord& rec) {
    log += format_log_row(rec);
    text::write_file(log_path, log);
  };
  Trainer trainer(res, m.config);
  const TrainResult result = trainer.run(opt);
  text::write_file((dir / "initial_loss.tsv").string(),
                   format_log_header() + format_log_row({0, result.initial}));
  if (result.log.empty()) {
    fs::create_directories(opt.checkpoint_dir);
    for (const auto& p : result.params.languages) {
      save_checkpoint(p, (fs::path(opt.checkpoint_dir) / (p.language + ".ckpt")).string());
    }
  }
  const LossBreakdown& last = result.log.empty() ? result.initial : result.log.back().loss;
  out << "trained " << result.log.size() << " epoch(s)" << (result.stopped_early ? " (early stop)" : "")
      << "; O_total " << result.initial.total() << " -> " << last.total() << "\n";
  return kExitOk;
}

inline const LanguageParams& select_language(const std::vector<LanguageParams>& langs,
                                             const std::string& language, const std::string& source) {
  if (language.empty()) {
    if (langs.size() == 1) return langs.front();
    throw LookupError(source + " holds several languages; pass --language");
  }
  for (const auto& l : langs)
    if (l.language == language) return l;
  throw LookupError("language '" + language + "' not found in checkpoint " + source);
}

inline int cmd_project(const std::string& checkpoint, const std::string& language,
                       const std::string& embeddings, const std::string& out_path, bool no_char,
                       std::ostream& out) {
  namespace fs = std::filesystem;
  std::string path = checkpoint;
  if (fs::is_directory(path)) {
    if (language.empty()) throw Error("--language is required with a checkpoint directory");
    path = (fs::path(path) / (language + ".ckpt")).string();
    if (!fs::exists(path)) throw LookupError("language '" + language + "' absent from checkpoint " + checkpoint);
  }
  const std::vector<LanguageParams> langs = load_checkpoint(path);
  const LanguageParams& p = select_language(langs, language, path);
  const EmbeddingTable table = load_embeddings(embeddings, p.language);
  const EmbeddingTable projected = project_vocabulary(table, p, p.components.chars && !no_char);
  save_embeddings(projected, out_path);
  out << "wrote " << projected.size() << " x " << projected.dim() << " to " << out_path << "\n";
  return kExitOk;
}

inline int cmd_eval(const std::vector<std::string>& embeddings,
                    const std::vector<std::string>& linguistic, const std::string& mode,
                    std::ostream& out) {
  if (embeddings.empty() || embeddings.size() != linguistic.size()) {
    throw Error("give one --linguistic file per --embeddings file");
  }
  if (mode != "qvec" && mode != "qvec-cca") throw Error("--mode must be qvec or qvec-cca");
  std::vector<EmbeddingTable> tables, lings;
  for (std::size_t k = 0; k < embeddings.size(); ++k) {
    tables.push_back(load_embeddings(embeddings[k]));
    lings.push_back(load_embeddings(linguistic[k]));
    if (tables.size() > 1) {
      // Keep language tags distinct when file stems collide.
      for (std::size_t j = 0; j + 1 < tables.size(); ++j) {
        if (tables[j].language() == tables.back().language()) {
          tables.back().vocab.set_language(tables.back().language() + "#" + std::to_string(k));
        }
      }
    }
  }
  const QvecInstance inst = multilingual_instance(tables, lings);
  const double score = mode == "qvec" ? qvec_score(inst).score : qvec_cca_score(inst);
  std::string line = "setting\tmetric\tscore\tcoverage\n";
  line += tables.size() == 1 ? "monolingual" : "multilingual";
  line += "\t" + mode + "\t";
  text::append_general(line, score, 9);
  line += "\t";
  text::append_general(line, inst.coverage, 9);
  out << line << "\n";
  return kExitOk;
}

struct Neighbor {
  Index index = 0;
  std::string word;
  double cosine = 0.0;
};

// k nearest words of `target` to `word` of `source`, by cosine, descending,
// ties by index. With `exclude_self` the query's own row of `target` is skipped.
inline std::vector<Neighbor> nearest_words(const EmbeddingTable& source, const EmbeddingTable& target,
                                           const std::string& word, Index k, bool exclude_self) {
  const Index q = source.vocab.find(word);
  if (q < 0) throw LookupError("unknown word '" + word + "'");
  if (source.dim() != target.dim()) throw DimensionError("neighbors: tables differ in dimension");
  if (k < 1) throw Error("k must be >= 1");
  const Matrix unit = normalized_rows(target.vectors);
  Eigen::RowVectorXd query = source.vectors.row(q);
  if (query.norm() >= kDegenerateNorm) query.normalize();
  const Index exclude = exclude_self ? target.vocab.find(word) : -1;
  std::vector<Neighbor> out;
  for (Index r : nearest_rows(unit, query, k, exclude)) {
    out.push_back({r, target.vocab.word(r), unit.row(r).dot(query)});
  }
  return out;
}

inline int cmd_neighbors(const std::string& source_path, const std::string& target_path,
                         const std::string& word, Index k, std::ostream& out) {
  namespace fs = std::filesystem;
  const EmbeddingTable source = load_embeddings(source_path);
  const bool same = fs::equivalent(source_path, target_path);
  const EmbeddingTable target = same ? source : load_embeddings(target_path);
  std::string text_out;
  Index rank = 1;
  for (const Neighbor& n : nearest_words(source, target, word, k, same)) {
    text_out += std::to_string(rank++) + "\t" + n.word + "\t";
    text::append_fixed(text_out, n.cosine, 6);
    text_out += "\n";
  }
  out << text_out;
  return kExitOk;
}

inline int cmd_synth(const SynthOptions& opt, const std::string& dir, std::ostream& out) {
  const SynthFiles files = write_synthetic(make_synthetic(opt), dir);
  out << "wrote synthetic task to " << dir << " (manifest " << files.manifest << ")\n";
  return kExitOk;
}

inline int cmd_gradcheck(std::uint64_t seed, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const GradCheckReport report = check_toy_model(seed);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const BlockCheck& b : report.blocks) out << b.name << "\t" << b.max_rel_error << "\n";
  if (report.passed) {
    out << "PASS max relative error " << report.max_rel_error << " (" << secs << " s)\n";
    return kExitOk;
  }
  out << "FAIL max relative error " << report.max_rel_error << " in block " << report.worst_block
      << "\n";
  return kExitCheckFailed;
}

// ---------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cluster-consistent multilingual embedding alignment"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "Train a common space from a run manifest");
  std::string manifest_path, train_out, components, widths;
  std::uint64_t seed = 1;
  int epochs = 0, patience = 0;
  Index batch = 0, neighbors = 0, filters = 0, dim_common = 0, char_dim = 0;
  double lr = 0.0;
  train->add_option("--manifest", manifest_path, "Run manifest")->required();
  train->add_option("--out", train_out, "Output directory");
  auto* o_seed = train->add_option("--seed", seed, "Random seed");
  auto* o_comp = train->add_option("--components", components, "W | W+N | W+N+Ch | W+N+L | W+N+Ch+L");
  auto* o_epochs = train->add_option("--epochs", epochs);
  auto* o_batch = train->add_option("--batch-size", batch);
  auto* o_lr = train->add_option("--lr", lr, "Scale applied to the Adadelta update");
  auto* o_nbr = train->add_option("--neighbors", neighbors, "Neighbours per cluster (N)");
  auto* o_filters = train->add_option("--filters", filters, "Filters per width (F)");
  auto* o_widths = train->add_option("--widths", widths, "Comma-separated filter widths");
  auto* o_dim = train->add_option("--dim-common", dim_common, "Common-space dimension (h)");
  auto* o_cdim = train->add_option("--char-dim", char_dim, "Character embedding dimension");
  auto* o_pat = train->add_option("--patience", patience, "Early-stop window; 0 disables");

  // project
  auto* project = app.add_subcommand("project", "Project a vocabulary into the common space");
  std::string ckpt, language, proj_emb, proj_out;
  bool no_char = false;
  project->add_option("--checkpoint", ckpt, "Checkpoint file or directory")->required();
  project->add_option("--language", language);
  project->add_option("--embeddings", proj_emb, "Monolingual embeddings")->required();
  project->add_option("--out", proj_out, "Output embedding file")->required();
  project->add_flag("--no-char", no_char, "Omit the character-level part");

  // eval
  auto* eval = app.add_subcommand("eval", "QVEC / QVEC-CCA evaluation");
  std::vector<std::string> eval_emb, eval_ling;
  std::string mode = "qvec";
  eval->add_option("--embeddings", eval_emb, "Embedding file(s), one per language")->required();
  eval->add_option("--linguistic", eval_ling, "Linguistic feature file(s), same order")->required();
  eval->add_option("--mode", mode, "qvec or qvec-cca");

  // neighbors
  auto* nbrs = app.add_subcommand("neighbors", "Nearest words across two common-space tables");
  std::string nb_source, nb_target, nb_word;
  Index nb_k = 5;
  nbrs->add_option("--source", nb_source, "Table containing the query word")->required();
  nbrs->add_option("--target", nb_target, "Table searched for neighbours")->required();
  nbrs->add_option("--word", nb_word)->required();
  nbrs->add_option("--k", nb_k);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate the synthetic rotated-copy task");
  SynthOptions sopt;
  std::string synth_out;
  synth->add_option("--seed", sopt.seed);
  synth->add_option("--vocab-size", sopt.vocab_size);
  synth->add_option("--dim", sopt.dim);
  synth->add_option("--noise", sopt.noise);
  synth->add_option("--train-fraction", sopt.train_fraction);
  synth->add_option("--out", synth_out)->required();

  // gradcheck
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of the full loss");
  std::uint64_t gc_seed = 1;
  gradcheck->add_option("--seed", gc_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*train) {
      RunManifest m = load_manifest(manifest_path);
      TrainConfig& c = m.config;
      if (o_seed->count()) c.seed = seed;
      if (o_comp->count()) c.components = Components::parse(components);
      if (o_epochs->count()) c.epochs = epochs;
      if (o_batch->count()) c.batch_size = batch;
      if (o_lr->count()) c.learning_rate = lr;
      if (o_nbr->count()) c.neighbors = neighbors;
      if (o_filters->count()) c.filters = filters;
      if (o_widths->count()) c.widths = detail::parse_widths(widths);
      if (o_dim->count()) c.dim_common = dim_common;
      if (o_cdim->count()) c.char_dim = char_dim;
      if (o_pat->count()) c.early_stop_patience = patience;
      return cmd_train(std::move(m), train_out, out, err);
    }
    if (*project) return cmd_project(ckpt, language, proj_emb, proj_out, no_char, out);
    if (*eval) return cmd_eval(eval_emb, eval_ling, mode, out);
    if (*nbrs) return cmd_neighbors(nb_source, nb_target, nb_word, nb_k, out);
    if (*synth) return cmd_synth(sopt, synth_out, out);
    if (*gradcheck) return cmd_gradcheck(gc_seed, out);
  } catch (const NonFiniteError& e) {
    err << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"ccnet"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace ccnet

#endif  // CCNET_CLI_HPP
