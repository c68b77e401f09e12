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

#include <gtest/gtest.h>

#include <sstream>

#include "ccnet/cli.hpp"
#include "test_util.hpp"

namespace ccnet {
namespace {

using testing::TempDir;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

// Small synthetic task plus the flags that keep training fast.
struct SmallTask {
  TempDir dir;
  std::string manifest;

  SmallTask() {
    const CliRun r = cli({"synth", "--seed", "3", "--vocab-size", "60", "--dim", "6", "--out",
                       dir.file("data")});
    EXPECT_EQ(r.code, 0) << r.err;
    manifest = dir.file("data/manifest.txt");
  }

  CliRun train(const std::string& out, std::vector<std::string> extra) const {
    std::vector<std::string> args{"train",     "--manifest", manifest, "--out", dir.file(out),
                                  "--dim-common", "6",       "--filters", "2",  "--batch-size",
                                  "16",        "--patience", "0"};
    args.insert(args.end(), extra.begin(), extra.end());
    return cli(args);
  }
};

TEST(Cli, HelpExitsZero) {
  EXPECT_EQ(cli({"--help"}).code, 0);
  EXPECT_EQ(cli({"train", "--help"}).code, 0);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"train"}).code, 2);
}

TEST(Cli, TrainWritesLogCheckpointsAndManifest) {
  SmallTask task;
  const CliRun r = task.train("run", {"--epochs", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string log = text::read_file(task.dir.file("run/train_log.tsv"));
  EXPECT_EQ(count_lines(log), 4u);
  EXPECT_EQ(log.substr(0, log.find('\n') + 1), format_log_header());
  EXPECT_TRUE(std::filesystem::exists(task.dir.file("run/checkpoints/a.ckpt")));
  EXPECT_TRUE(std::filesystem::exists(task.dir.file("run/checkpoints/b.ckpt")));
  EXPECT_TRUE(std::filesystem::exists(task.dir.file("run/initial_loss.tsv")));
  const RunManifest echoed = load_manifest(task.dir.file("run/manifest.txt"));
  EXPECT_EQ(echoed.config.epochs, 3);
  EXPECT_EQ(echoed.config.dim_common, 6);
  EXPECT_EQ(echoed.languages, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(format_manifest(echoed), text::read_file(task.dir.file("run/manifest.txt")));
}

TEST(Cli, WordOnlyLogsZeroColumns) {
  SmallTask task;
  ASSERT_EQ(task.train("run", {"--epochs", "2", "--components", "W"}).code, 0);
  std::istringstream log(text::read_file(task.dir.file("run/train_log.tsv")));
  std::string line;
  std::getline(log, line);
  int rows = 0;
  while (std::getline(log, line)) {
    const auto f = text::split(line, '\t');
    EXPECT_NE(f[1], "0");
    EXPECT_EQ(f[2], "0");
    EXPECT_EQ(f[3], "0");
    EXPECT_EQ(f[4], "0");
    ++rows;
  }
  EXPECT_EQ(rows, 2);
}

TEST(Cli, MissingDictionaryNamesPath) {
  SmallTask task;
  std::string m = text::read_file(task.manifest);
  m += "dictionary.a.b = nowhere.tsv\n";
  text::write_file(task.manifest, m);
  const CliRun r = task.train("run", {"--epochs", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("nowhere.tsv"), std::string::npos) << r.err;
  EXPECT_EQ(count_lines(r.err), 1u);
  EXPECT_FALSE(std::filesystem::exists(task.dir.file("run")));
}

TEST(Cli, MissingManifestAndBadComponents) {
  SmallTask task;
  const CliRun r = cli({"train", "--manifest", task.dir.file("none.txt"), "--out", task.dir.file("x")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("none.txt"), std::string::npos);
  EXPECT_EQ(task.train("run", {"--components", "N"}).code, 2);
}

TEST(Cli, ProjectDimensionsAndRoundTrip) {
  SmallTask task;
  ASSERT_EQ(task.train("run", {"--epochs", "1"}).code, 0);
  const std::string ckpt = task.dir.file("run/checkpoints");
  const std::string vec = task.dir.file("data/a.vec");
  ASSERT_EQ(cli({"project", "--checkpoint", ckpt, "--language", "a", "--embeddings", vec, "--out",
                 task.dir.file("a.proj")}).code,
            0);
  ASSERT_EQ(cli({"project", "--checkpoint", ckpt + "/a.ckpt", "--embeddings", vec, "--out",
                 task.dir.file("a.nochar"), "--no-char"}).code,
            0);
  const EmbeddingTable full = load_embeddings(task.dir.file("a.proj"));
  const EmbeddingTable word = load_embeddings(task.dir.file("a.nochar"));
  EXPECT_EQ(full.dim(), 6 + 3 * 2);
  EXPECT_EQ(word.dim(), 6);
  EXPECT_EQ(full.size(), 60);
  EXPECT_LE((full.vectors.leftCols(6) - word.vectors).cwiseAbs().maxCoeff(), 0.0);
  const CliRun absent = cli({"project", "--checkpoint", ckpt, "--language", "zz", "--embeddings", vec,
                          "--out", task.dir.file("z.proj")});
  EXPECT_EQ(absent.code, 2);
}

TEST(Cli, ProjectUnderDefaultsGives572) {
  TempDir dir;
  ASSERT_EQ(cli({"synth", "--vocab-size", "40", "--dim", "4", "--out", dir.file("d")}).code, 0);
  ASSERT_EQ(cli({"train", "--manifest", dir.file("d/manifest.txt"), "--out", dir.file("r"),
                 "--epochs", "0"}).code,
            0);
  ASSERT_EQ(cli({"project", "--checkpoint", dir.file("r/checkpoints"), "--language", "b",
                 "--embeddings", dir.file("d/b.vec"), "--out", dir.file("b.proj")}).code,
            0);
  ASSERT_EQ(cli({"project", "--checkpoint", dir.file("r/checkpoints"), "--language", "b",
                 "--embeddings", dir.file("d/b.vec"), "--out", dir.file("b.word"), "--no-char"}).code,
            0);
  EXPECT_EQ(load_embeddings(dir.file("b.proj")).dim(), 572);
  EXPECT_EQ(load_embeddings(dir.file("b.word")).dim(), 512);
}

TEST(Cli, EvalModes) {
  TempDir dir;
  const Matrix x = testing::random_matrix(40, 3, 1);
  std::vector<std::string> words;
  for (int k = 0; k < 40; ++k) words.push_back("w" + std::to_string(k));
  save_embeddings(testing::make_table("x", words, x), dir.file("x.vec"));
  Matrix r = testing::random_matrix(3, 3, 2);
  r += 2.0 * Matrix::Identity(3, 3);
  save_embeddings(testing::make_table("s", words, x * r), dir.file("s.vec"));

  const CliRun q = cli({"eval", "--embeddings", dir.file("x.vec"), "--linguistic", dir.file("x.vec")});
  ASSERT_EQ(q.code, 0) << q.err;
  EXPECT_EQ(q.out.substr(0, q.out.find('\n')), "setting\tmetric\tscore\tcoverage");
  const auto row = text::split(text::trim(q.out.substr(q.out.find('\n') + 1)), '\t');
  ASSERT_EQ(row.size(), 4u);
  double score = 0.0;
  ASSERT_TRUE(text::parse_double(row[2], score));
  EXPECT_NEAR(score, 3.0, 1e-6);

  const CliRun cca = cli({"eval", "--mode", "qvec-cca", "--embeddings", dir.file("x.vec"),
                       "--linguistic", dir.file("s.vec")});
  ASSERT_EQ(cca.code, 0);
  const auto cca_row = text::split(text::trim(cca.out.substr(cca.out.find('\n') + 1)), '\t');
  ASSERT_TRUE(text::parse_double(cca_row[2], score));
  EXPECT_NEAR(score, 1.0, 1e-6);

  const CliRun two = cli({"eval", "--embeddings", dir.file("x.vec"), dir.file("s.vec"), "--linguistic",
                       dir.file("x.vec"), dir.file("s.vec")});
  ASSERT_EQ(two.code, 0) << two.err;
  EXPECT_NE(two.out.find("multilingual"), std::string::npos);

  save_embeddings(testing::make_table("o", {"zz"}, Matrix::Ones(1, 3)), dir.file("o.vec"));
  EXPECT_EQ(cli({"eval", "--embeddings", dir.file("x.vec"), "--linguistic", dir.file("o.vec")}).code, 2);
  EXPECT_EQ(cli({"eval", "--mode", "bogus", "--embeddings", dir.file("x.vec"), "--linguistic",
                 dir.file("x.vec")}).code,
            2);
}

TEST(Cli, NeighborsRankingAndSelfExclusion) {
  TempDir dir;
  Matrix m(4, 2);
  m << 1, 0,
       0.9, 0.1,
       0, 1,
       -1, 0;
  save_embeddings(testing::make_table("t", {"a", "b", "c", "d"}, m), dir.file("t.vec"));
  save_embeddings(testing::make_table("u", {"a", "b", "c", "d"}, m), dir.file("u.vec"));
  const CliRun self = cli({"neighbors", "--source", dir.file("t.vec"), "--target", dir.file("t.vec"),
                        "--word", "a", "--k", "1"});
  ASSERT_EQ(self.code, 0) << self.err;
  EXPECT_EQ(self.out.substr(0, self.out.find('\n')).substr(0, 4), "1\tb\t");
  const CliRun all = cli({"neighbors", "--source", dir.file("t.vec"), "--target", dir.file("u.vec"),
                       "--word", "a", "--k", "10"});
  ASSERT_EQ(all.code, 0);
  EXPECT_EQ(count_lines(all.out), 4u);
  EXPECT_EQ(all.out.substr(0, 11), "1\ta\t1.00000");
  EXPECT_NE(all.out.find("4\td\t-1.000000"), std::string::npos);
  EXPECT_EQ(cli({"neighbors", "--source", dir.file("t.vec"), "--target", dir.file("u.vec"),
                 "--word", "nope"}).code,
            2);
}

TEST(Cli, SynthIsDeterministicAndParsesCleanly) {
  TempDir dir;
  ASSERT_EQ(cli({"synth", "--seed", "11", "--out", dir.file("one")}).code, 0);
  ASSERT_EQ(cli({"synth", "--seed", "11", "--out", dir.file("two")}).code, 0);
  for (const char* f : {"a.vec", "b.vec", "dict.train.tsv", "dict.heldout.tsv", "clusters.a.tsv",
                        "clusters.b.tsv", "manifest.txt"}) {
    EXPECT_EQ(text::read_file(dir.file(std::string("one/") + f)),
              text::read_file(dir.file(std::string("two/") + f)))
        << f;
  }
  const RunManifest m = load_manifest(dir.file("one/manifest.txt"));
  const TrainingResources res = load_resources(m);
  EXPECT_EQ(res.languages[0].table.size(), 500);
  EXPECT_EQ(res.languages[0].table.dim(), 32);
  EXPECT_EQ(res.pairs[0].dictionary.kept(), 400u);
  EXPECT_EQ(res.pairs[0].dictionary.skipped, 0u);
  for (const auto& l : res.languages) {
    EXPECT_EQ(l.clusters->dropped_clusters, 0u);
    EXPECT_EQ(l.clusters->dropped_members, 0u);
  }
  const auto held = load_dictionary(dir.file("one/dict.heldout.tsv"), res.languages[0].table.vocab,
                                    res.languages[1].table.vocab);
  EXPECT_EQ(held.kept(), 100u);
}

TEST(Synth, NoiselessCopyIsExactlyAligned) {
  SynthOptions opt;
  opt.noise = 0.0;
  const SynthData d = make_synthetic(opt);
  const Matrix mapped = normalized_rows(d.a.vectors * d.rotation);
  const Matrix unit_b = normalized_rows(d.b.vectors);
  for (Index r = 0; r < d.a.size(); ++r) {
    const auto nn = nearest_rows(unit_b, mapped.row(r), 1);
    EXPECT_EQ(d.b.vocab.word(nn[0]), d.b.vocab.word(r));
  }
  EXPECT_TRUE((d.rotation.transpose() * d.rotation).isApprox(Matrix::Identity(32, 32), 1e-12));
  EXPECT_LE((d.a.vectors * d.rotation - d.b.vectors).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Cli, GradcheckPassesOnSeveralSeeds) {
  for (const char* seed : {"1", "2", "3"}) {
    const CliRun r = cli({"gradcheck", "--seed", seed});
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("PASS"), std::string::npos);
  }
}

TEST(Manifest, ParseErrorsCarryLineNumbers) {
  std::istringstream in("languages = a b\nepochs = many\n");
  try {
    parse_manifest(in, "m.txt", ".");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream unknown("bogus = 1\n");
  EXPECT_THROW(parse_manifest(unknown, "m.txt", "."), ParseError);
}

}  // namespace
}  // namespace ccnet
