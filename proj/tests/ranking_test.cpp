// Copyright 2026 The ESA Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "esa/ranking.hpp"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "esa/rng.hpp"
#include "oracles.hpp"

namespace esa::stats {
namespace {

SystemScore sys(std::string id, std::vector<double> values) {
  SystemScore s{std::move(id), mean_of(values), std::move(values)};
  return s;
}

std::vector<SystemScore> means_only(const std::vector<double>& means) {
  std::vector<SystemScore> out;
  for (std::size_t i = 0; i < means.size(); ++i) {
    out.push_back({"s" + std::to_string(100 + i), means[i], {}});
  }
  return out;
}

TEST(Cluster, ThreeVersusThreeNeverSplits) {
  Rng rng(31);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> a(3), b(3);
    for (auto& v : a) v = rng.uniform() * 100;
    for (auto& v : b) v = rng.uniform() * 100 - 200;
    const Ranking r = cluster_systems({sys("a", a), sys("b", b)}, {});
    EXPECT_EQ(r.cluster_count(), 1);
  }
}

TEST(Cluster, SeparatedTwoHundredSegmentsSplit) {
  std::vector<double> a, b;
  for (int i = 0; i < 200; ++i) {
    a.push_back(60 + i * 0.1);
    b.push_back(10 + i * 0.1);
  }
  for (auto test : {ClusterTest::kRankSum, ClusterTest::kSignedRank}) {
    const Ranking r = cluster_systems({sys("b", b), sys("a", a)}, {0.05, test});
    ASSERT_EQ(r.systems.size(), 2u);
    EXPECT_EQ(r.systems[0].system_id, "a");
    EXPECT_EQ(r.systems[0].cluster, 1);
    EXPECT_EQ(r.systems[1].cluster, 2);
  }
}

// The walk re-implemented with the enumeration p-value.
std::vector<int> oracle_clusters(std::vector<SystemScore> s, double alpha) {
  std::sort(s.begin(), s.end(), [](const auto& x, const auto& y) {
    return x.mean != y.mean ? x.mean > y.mean : x.system_id < y.system_id;
  });
  std::vector<int> out;
  std::vector<std::size_t> current;
  int cluster = 1;
  for (std::size_t i = 0; i < s.size(); ++i) {
    bool split = !current.empty();
    for (std::size_t m : current) {
      split = split &&
              oracle::rank_sum_p(s[m].segment_values, s[i].segment_values) < alpha;
    }
    if (split) {
      ++cluster;
      current.clear();
    }
    current.push_back(i);
    out.push_back(cluster);
  }
  return out;
}

TEST(Cluster, AdjacencyOnRandomFixtures) {
  Rng rng(32);
  for (int k = 0; k < 100; ++k) {
    std::vector<SystemScore> systems;
    const std::size_t n = 2 + rng.index(7);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> v(5);
      const double level = rng.uniform() * 40;
      for (auto& x : v) x = level + rng.uniform() * 10;
      systems.push_back(sys("s" + std::to_string(i), v));
    }
    const Ranking r = cluster_systems(systems, {});
    ASSERT_EQ(r.systems.size(), n);
    EXPECT_EQ(r.systems.front().cluster, 1);
    for (std::size_t i = 1; i < n; ++i) {
      EXPECT_GE(r.systems[i - 1].mean, r.systems[i].mean);
      const int step = r.systems[i].cluster - r.systems[i - 1].cluster;
      EXPECT_TRUE(step == 0 || step == 1);
    }
    std::vector<int> got;
    for (const auto& s : r.systems) got.push_back(s.cluster);
    EXPECT_EQ(got, oracle_clusters(systems, 0.05));
  }
}

TEST(Cluster, TiesOrderBySystemId) {
  const Ranking r = cluster_systems({sys("b", {1, 2}), sys("a", {2, 1})}, {});
  EXPECT_EQ(r.systems[0].system_id, "a");
  EXPECT_EQ(r.systems[1].system_id, "b");
}

TEST(Cluster, RejectsBadAlpha) {
  EXPECT_THROW(cluster_systems({}, {0.0}), std::invalid_argument);
  EXPECT_THROW(cluster_systems({}, {1.0}), std::invalid_argument);
}

TEST(Cluster, UndefinedSignedRankCountsAsNotSignificant) {
  EXPECT_EQ(cluster_test_p({1, 2, 3}, {1, 2, 3}, ClusterTest::kSignedRank), 1.0);
}

TEST(PairwiseAccuracy, OneFlippedPairOfThirteen) {
  std::vector<double> ref;
  for (int i = 0; i < 13; ++i) ref.push_back(100 - i);
  std::vector<double> flipped = ref;
  std::swap(flipped[4], flipped[5]);
  const PairAgreement same = pairwise_agreement(means_only(ref), means_only(ref));
  const PairAgreement one = pairwise_agreement(means_only(flipped), means_only(ref));
  EXPECT_EQ(same.pairs, 78);
  EXPECT_EQ(same.half_points, 156);
  EXPECT_EQ(one.half_points, 154);
  EXPECT_EQ(same.accuracy(), 1.0);
  EXPECT_EQ(one.accuracy(), 77.0 / 78.0);
}

TEST(PairwiseAccuracy, TieOnOneSideIsHalfAPair) {
  EXPECT_EQ(pairwise_accuracy(means_only({1, 1}), means_only({1, 2})), 0.5);
  EXPECT_EQ(pairwise_accuracy(means_only({1, 1}), means_only({3, 3})), 1.0);
  EXPECT_EQ(pairwise_accuracy(means_only({2, 1}), means_only({1, 2})), 0.0);
}

TEST(PairwiseAccuracy, MatchesOracle) {
  Rng rng(33);
  for (int k = 0; k < 300; ++k) {
    const std::size_t n = 2 + rng.index(14);
    std::vector<double> c(n), r(n);
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = static_cast<double>(rng.between(0, 6));
      r[i] = static_cast<double>(rng.between(0, 6));
    }
    EXPECT_EQ(pairwise_accuracy(means_only(c), means_only(r)),
              oracle::pairwise_accuracy(c, r));
  }
}

TEST(PairwiseAccuracy, RejectsMismatchedSystems) {
  auto a = means_only({1, 2});
  auto b = means_only({1, 2});
  b[1].system_id = "other";
  EXPECT_THROW(pairwise_accuracy(a, b), std::invalid_argument);
  EXPECT_THROW(pairwise_accuracy(means_only({1}), means_only({1})),
               std::invalid_argument);
  EXPECT_THROW(pairwise_accuracy(means_only({1, 2}), means_only({1, 2, 3})),
               std::invalid_argument);
}

SystemScoreTable noisy_table(Rng& rng, std::size_t systems, std::size_t segments,
                             double noise) {
  SystemScoreTable t;
  for (std::size_t j = 0; j < segments; ++j) t.segment_ids.push_back("g" + std::to_string(j));
  for (std::size_t i = 0; i < systems; ++i) {
    std::vector<double> v(segments);
    for (auto& x : v) x = 50 + 2.0 * static_cast<double>(i) + noise * rng.normal();
    t.systems.push_back(sys("s" + std::to_string(10 + i), v));
  }
  return t;
}

TEST(SubsetConsistency, EndpointIsExactlyOne) {
  Rng rng(34);
  const SystemScoreTable t = noisy_table(rng, 6, 57, 10);
  const ConsistencyCurve c = subset_consistency(t, {{5, 20, 57}, 10, 3});
  ASSERT_EQ(c.points.size(), 3u);
  EXPECT_EQ(c.points.back().subset_size, 57u);
  EXPECT_EQ(c.points.back().mean_accuracy, 1.0);
  EXPECT_DOUBLE_EQ(c.average, (c.points[0].mean_accuracy + c.points[1].mean_accuracy + 1.0) / 3);
}

TEST(SubsetConsistency, DeterministicGivenSeed) {
  Rng rng(35);
  const SystemScoreTable t = noisy_table(rng, 5, 40, 10);
  const auto a = subset_consistency(t, {{}, 20, 9});
  const auto b = subset_consistency(t, {{}, 20, 9});
  ASSERT_EQ(a.points.size(), 40u);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].mean_accuracy, b.points[i].mean_accuracy);
  }
}

TEST(SubsetConsistency, LowerNoiseIsMoreConsistent) {
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto low = subset_consistency(noisy_table(rng, 6, 100, 5), {{}, 20, seed});
    const auto high = subset_consistency(noisy_table(rng, 6, 100, 15), {{}, 20, seed});
    wins += low.average > high.average;
  }
  EXPECT_GE(wins, 19);
}

TEST(SubsetConsistency, DefaultSizes) {
  EXPECT_THAT(default_subset_sizes(3), ::testing::ElementsAre(1, 2, 3));
  const auto big = default_subset_sizes(1000);
  EXPECT_EQ(big.size(), 50u);
  EXPECT_EQ(big.front(), 20u);
  EXPECT_EQ(big.back(), 1000u);
  EXPECT_TRUE(default_subset_sizes(0).empty());
}

TEST(SubsetConsistency, RejectsBadOptions) {
  Rng rng(36);
  const SystemScoreTable t = noisy_table(rng, 3, 10, 1);
  EXPECT_THROW(subset_consistency(t, {{11}, 1, 0}), std::invalid_argument);
  EXPECT_THROW(subset_consistency(t, {{0}, 1, 0}), std::invalid_argument);
  EXPECT_THROW(subset_consistency(t, {{}, 0, 0}), std::invalid_argument);
  EXPECT_THROW(subset_consistency(noisy_table(rng, 1, 10, 1), {}), std::invalid_argument);
}

}  // namespace
}  // namespace esa::stats
