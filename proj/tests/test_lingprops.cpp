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

#include "test_util.hpp"

namespace ccnet {
namespace {

using testing::random_matrix;

struct Fixture {
  EmbeddingTable table;
  LinguisticClusterSet clusters;
};

Fixture fixture(const std::string& lang, std::uint64_t seed, const std::string& extra = "") {
  Fixture f{testing::make_table(lang, {"a", "b", "c", "d", "e", "f"}, random_matrix(6, 3, seed)), {}};
  std::istringstream in("colors\tword\ta\tb\n-like\tpair\ta|c\td|e\ndays\tword\tf\n" + extra);
  f.clusters = parse_clusters(in, "mem", f.table.vocab);
  return f;
}

ProjectionParams projection(std::uint64_t seed) {
  return {random_matrix(3, 2, seed), random_matrix(1, 2, seed + 1), random_matrix(1, 3, seed + 2)};
}

TEST(ClusterVectors, WordAndPairAverages) {
  const Fixture f = fixture("x", 1);
  const ClusterVectorSet s = build_cluster_vectors(f.clusters, f.table);
  const Matrix& m = f.table.vectors;
  ASSERT_EQ(s.function_ids, (std::vector<std::string>{"colors", "-like", "days"}));
  EXPECT_TRUE(s.vectors.row(0).isApprox((m.row(0) + m.row(1)) / 2.0));
  EXPECT_TRUE(s.vectors.row(1).isApprox(((m.row(2) - m.row(0)) + (m.row(4) - m.row(3))) / 2.0));
  EXPECT_TRUE(s.vectors.row(2).isApprox(m.row(5)));
}

TEST(ClusterVectors, SinglePair) {
  const auto t = testing::make_table("x", {"god", "godlike"}, random_matrix(2, 3, 4));
  std::istringstream in("-like\tpair\tgod|godlike\n");
  const auto s = build_cluster_vectors(parse_clusters(in, "mem", t.vocab), t);
  EXPECT_TRUE(s.vectors.row(0).isApprox(t.vectors.row(1) - t.vectors.row(0)));
}

TEST(Intersect, SortedSharedIds) {
  const auto a = build_cluster_vectors(fixture("x", 1).clusters, fixture("x", 1).table);
  const Fixture fb = fixture("y", 2, "only-y\tword\tb\n");
  const auto b = build_cluster_vectors(fb.clusters, fb.table);
  const AlignedClusters al = intersect_clusters(a, b);
  EXPECT_EQ(al.function_ids, (std::vector<std::string>{"-like", "colors", "days"}));
  EXPECT_TRUE(al.vectors_i.row(1) == a.vectors.row(0));
  EXPECT_TRUE(al.vectors_j.row(0) == b.vectors.row(1));
}

TEST(LossLingprops, IdenticalLanguagesGiveZero) {
  const Fixture f = fixture("x", 1);
  const auto s = build_cluster_vectors(f.clusters, f.table);
  const auto p = projection(3);
  const Matrix br = random_matrix(1, 2, 4);
  const LingpropsLoss l = loss_lingprops(s, s, p, br, p, br);
  EXPECT_FALSE(l.skipped);
  EXPECT_NEAR(l.value, 0.0, 1e-12);
}

TEST(LossLingprops, DirectRecomputationAndOneSidedIds) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Fixture fa = fixture("x", seed), fb = fixture("y", seed + 10);
    const auto a = build_cluster_vectors(fa.clusters, fa.table);
    const auto b = build_cluster_vectors(fb.clusters, fb.table);
    const auto pa = projection(seed + 20), pb = projection(seed + 30);
    const Matrix ba = random_matrix(1, 2, seed + 40), bb = random_matrix(1, 2, seed + 50);
    const double value = loss_lingprops(a, b, pa, ba, pb, bb).value;
    double expected = 0.0;
    for (const char* id : {"-like", "colors", "days"}) {
      Index ra = 0, rb = 0;
      while (a.function_ids[static_cast<std::size_t>(ra)] != id) ++ra;
      while (b.function_ids[static_cast<std::size_t>(rb)] != id) ++rb;
      const Matrix ha = sigmoid(a.vectors.row(ra) * pa.weight + ba);
      const Matrix hb = sigmoid(b.vectors.row(rb) * pb.weight + bb);
      expected += 1.0 - ha.row(0).dot(hb.row(0)) / (ha.norm() * hb.norm());
    }
    EXPECT_NEAR(value, expected, 1e-12);
    EXPECT_GE(value, 0.0);
    const Fixture fc = fixture("y", seed + 10, "extra\tword\tc\td\n");
    const auto c = build_cluster_vectors(fc.clusters, fc.table);
    EXPECT_NEAR(loss_lingprops(a, c, pa, ba, pb, bb).value, value, 1e-15);
  }
}

TEST(LossLingprops, NoSharedIdsIsSkipped) {
  const Fixture fa = fixture("x", 1);
  const auto a = build_cluster_vectors(fa.clusters, fa.table);
  ClusterVectorSet b = a;
  for (auto& id : b.function_ids) id += "_other";
  const auto p = projection(3);
  const LingpropsLoss l = loss_lingprops(a, b, p, p.bias, p, p.bias);
  EXPECT_TRUE(l.skipped);
  EXPECT_EQ(l.value, 0.0);
}

TEST(LossLingprops, InvariantToConsistentIdPermutation) {
  const Fixture fa = fixture("x", 1), fb = fixture("y", 2);
  const auto a = build_cluster_vectors(fa.clusters, fa.table);
  const auto b = build_cluster_vectors(fb.clusters, fb.table);
  const auto pa = projection(3), pb = projection(4);
  const double base = loss_lingprops(a, b, pa, pa.bias, pb, pb.bias).value;
  ClusterVectorSet a2 = a, b2 = b;
  const std::vector<Index> perm{2, 0, 1};
  a2.vectors = gather_rows(a.vectors, perm);
  b2.vectors = gather_rows(b.vectors, perm);
  for (std::size_t k = 0; k < 3; ++k) {
    a2.function_ids[k] = a.function_ids[static_cast<std::size_t>(perm[k])];
    b2.function_ids[k] = b.function_ids[static_cast<std::size_t>(perm[k])];
  }
  EXPECT_NEAR(loss_lingprops(a2, b2, pa, pa.bias, pb, pb.bias).value, base, 1e-12);
}

TEST(LossLingprops, GradientFlowsIntoWeightsAndClusterBias) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Fixture fa = fixture("x", seed), fb = fixture("y", seed + 7);
    const auto a = build_cluster_vectors(fa.clusters, fa.table);
    const auto b = build_cluster_vectors(fb.clusters, fb.table);
    auto pa = projection(seed + 1), pb = projection(seed + 2);
    Matrix ba = random_matrix(1, 2, seed + 3), bb = random_matrix(1, 2, seed + 4);
    Matrix gwa = Matrix::Zero(3, 2), gwb = Matrix::Zero(3, 2);
    Matrix gba = Matrix::Zero(1, 2), gbb = Matrix::Zero(1, 2);
    const LingpropsGrads g{&gwa, &gba, &gwb, &gbb};
    const Matrix frozen = a.vectors;
    loss_lingprops(a, b, pa, ba, pb, bb, &g);
    EXPECT_TRUE(a.vectors == frozen);
    const ParamBlock blocks[] = {
        {"W_i", &pa.weight, &gwa, 0}, {"bR_i", &ba, &gba, 0}, {"W_j", &pb.weight, &gwb, 0}, {"bR_j", &bb, &gbb, 0}};
    const auto report = finite_diff_check(
        [&] { return loss_lingprops(a, b, pa, ba, pb, bb).value; }, blocks, 1e-4);
    EXPECT_TRUE(report.passed) << report.worst_block << " " << report.max_rel_error;
  }
}

}  // namespace
}  // namespace ccnet
