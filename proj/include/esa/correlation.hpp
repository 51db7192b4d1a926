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

// Correlation coefficients. Undefined results (constant input, too few
// points) are std::nullopt, never 0. Length mismatches throw
// std::invalid_argument.

#ifndef ESA_CORRELATION_HPP_
#define ESA_CORRELATION_HPP_

#include <optional>
#include <span>
#include <vector>

namespace esa::stats {

// Sample Pearson correlation; needs n >= 3 and nonzero variance on both
// sides.
std::optional<double> pearson(std::span<const double> x,
                              std::span<const double> y);

// 1-based fractional ranks; ties share the average of their positions.
std::vector<double> fractional_ranks(std::span<const double> x);

// Pearson on fractional ranks.
std::optional<double> spearman(std::span<const double> x,
                               std::span<const double> y);

struct PairCounts {
  long long concordant = 0;
  long long discordant = 0;
};

// Concordant/discordant pair counts; pairs tied in x or y count as neither.
// O(n log n).
PairCounts concordance(std::span<const double> x, std::span<const double> y);

// Stuart's tau-c: 2m(C - D) / (n^2 (m - 1)), with m the smaller number of
// distinct values on either side. Needs n >= 2; undefined when m < 2.
std::optional<double> kendall_tau_c(std::span<const double> x,
                                    std::span<const double> y);

}  // namespace esa::stats

#endif  // ESA_CORRELATION_HPP_
