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

#include "esa/correlation.hpp"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <vector>

#include "esa/rng.hpp"
#include "oracles.hpp"

namespace esa::stats {
namespace {

using V = std::vector<double>;

// Random paired sample; small integer grids force ties.
std::pair<V, V> random_pair(Rng& rng, bool ties) {
  const std::size_t n = 3 + rng.index(48);
  V x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (ties) {
      x[i] = static_cast<double>(rng.between(0, 5));
      y[i] = static_cast<double>(rng.between(0, 5)) + 0.5 * x[i];
    } else {
      x[i] = rng.uniform() * 100.0;
      y[i] = 0.3 * x[i] + rng.normal() * 20.0;
    }
  }
  return {x, y};
}

void expect_same(std::optional<double> got, std::optional<double> want) {
  ASSERT_EQ(got.has_value(), want.has_value());
  if (got) EXPECT_NEAR(*got, *want, 1e-12);
}

TEST(Pearson, MatchesRawSumOracle) {
  Rng rng(11);
  for (int k = 0; k < 500; ++k) {
    const auto [x, y] = random_pair(rng, k % 2 == 1);
    expect_same(pearson(x, y), oracle::pearson(x, y));
  }
}

TEST(Pearson, Boundaries) {
  EXPECT_DOUBLE_EQ(*pearson(V{1, 2, 3, 4}, V{2, 4, 6, 8}), 1.0);
  EXPECT_DOUBLE_EQ(*pearson(V{1, 2, 3, 4}, V{8, 6, 4, 2}), -1.0);
  EXPECT_FALSE(pearson(V{1, 2}, V{1, 2}));
  EXPECT_FALSE(pearson(V{1, 1, 1}, V{1, 2, 3}));
  EXPECT_FALSE(pearson(V{1, 2, 3}, V{5, 5, 5}));
}

TEST(Pearson, RejectsUnpairedInput) {
  EXPECT_THROW(pearson(V{1, 2, 3}, V{1, 2}), std::invalid_argument);
}

TEST(FractionalRanks, AveragesTies) {
  EXPECT_THAT(fractional_ranks(V{10, 20, 20, 5}), ::testing::ElementsAre(2, 3.5, 3.5, 1));
}

TEST(Spearman, MatchesRankCountingOracle) {
  Rng rng(12);
  for (int k = 0; k < 500; ++k) {
    const auto [x, y] = random_pair(rng, k % 2 == 1);
    expect_same(spearman(x, y), oracle::spearman(x, y));
  }
}

TEST(Spearman, MonotoneIsOne) {
  EXPECT_DOUBLE_EQ(*spearman(V{1, 2, 3, 4, 5}, V{1, 8, 27, 64, 125}), 1.0);
  EXPECT_DOUBLE_EQ(*spearman(V{1, 2, 3, 4, 5}, V{9, 7, 5, 3, 1}), -1.0);
}

TEST(Concordance, CountsPairsLikeEnumeration) {
  Rng rng(13);
  for (int k = 0; k < 200; ++k) {
    const auto [x, y] = random_pair(rng, true);
    long long c = 0, d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = i + 1; j < x.size(); ++j) {
        const double p = (x[i] - x[j]) * (y[i] - y[j]);
        c += p > 0;
        d += p < 0;
      }
    }
    const PairCounts got = concordance(x, y);
    EXPECT_EQ(got.concordant, c);
    EXPECT_EQ(got.discordant, d);
  }
}

TEST(KendallTauC, MatchesPairEnumerationOracle) {
  Rng rng(14);
  for (int k = 0; k < 500; ++k) {
    const auto [x, y] = random_pair(rng, k % 2 == 1);
    expect_same(kendall_tau_c(x, y), oracle::kendall_tau_c(x, y));
  }
}

TEST(KendallTauC, Boundaries) {
  // No ties and an even n: tau-c reaches +-1.
  EXPECT_DOUBLE_EQ(*kendall_tau_c(V{1, 2, 3, 4}, V{1, 2, 3, 4}), 1.0);
  EXPECT_DOUBLE_EQ(*kendall_tau_c(V{1, 2, 3, 4}, V{4, 3, 2, 1}), -1.0);
  EXPECT_FALSE(kendall_tau_c(V{1, 1, 1}, V{1, 2, 3}));
  EXPECT_THROW(kendall_tau_c(V{1}, V{1}), std::invalid_argument);
}

TEST(KendallTauC, HandComputed) {
  // C = 4, D = 0, two pairs tied in x; n = 4, m = 2: 2 * 4 / (16 / 2).
  EXPECT_DOUBLE_EQ(*kendall_tau_c(V{1, 1, 2, 2}, V{1, 2, 3, 4}), 1.0);
  // C = 5, D = 1; n = m = 4: 2 * 4 / (16 * 3 / 4).
  EXPECT_DOUBLE_EQ(*kendall_tau_c(V{1, 2, 3, 4}, V{1, 3, 2, 4}), 2.0 / 3.0);
  // C = 2, D = 1, n = m = 3: 2 * 1 / (9 * 2 / 3).
  EXPECT_DOUBLE_EQ(*kendall_tau_c(V{1, 2, 3}, V{1, 3, 2}), 1.0 / 3.0);
}

}  // namespace
}  // namespace esa::stats
