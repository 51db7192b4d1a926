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

// Two-sided Wilcoxon tests.
//
// Both exact paths use the permutation distribution of the (mid)rank
// statistic, so ties are handled exactly. The two-sided p-value is the
// probability of a statistic at least as far from its null mean as the
// observed one. Ranks are kept doubled so all comparisons are integral.

#ifndef ESA_SIGNIFICANCE_HPP_
#define ESA_SIGNIFICANCE_HPP_

#include <optional>
#include <span>

namespace esa::stats {

// Exact path is used while both samples have at most this many values.
inline constexpr std::size_t kRankSumExactMaxPerSide = 12;
// Exact path is used while there are at most this many nonzero differences.
inline constexpr std::size_t kSignedRankExactMaxPairs = 20;

enum class TestMethod { kAuto, kExact, kNormal };

// Mann-Whitney / Wilcoxon rank-sum. Throws std::invalid_argument on an
// empty sample.
double wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b,
                         TestMethod method = TestMethod::kAuto);

// Paired signed-rank test on a - b. Zero differences are dropped; returns
// std::nullopt when every difference is zero. Throws on length mismatch.
std::optional<double> wilcoxon_signed_rank(std::span<const double> a,
                                           std::span<const double> b,
                                           TestMethod method = TestMethod::kAuto);

}  // namespace esa::stats

#endif  // ESA_SIGNIFICANCE_HPP_
