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

#include "esa/significance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace esa::stats {
namespace {

struct DoubledRanks {
  std::vector<long> ranks;  // 2 * midrank, aligned with the input
  double tie_term = 0.0;    // sum over tie groups of t^3 - t
};

DoubledRanks doubled_midranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  DoubledRanks out;
  out.ranks.resize(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && v[order[j]] == v[order[i]]) ++j;
    const long doubled = static_cast<long>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) out.ranks[order[k]] = doubled;
    const double t = static_cast<double>(j - i);
    out.tie_term += t * t * t - t;
    i = j;
  }
  return out;
}

double normal_two_sided(double deviation, double variance) {
  if (!(variance > 0.0)) return 1.0;
  const double z = std::max(0.0, deviation - 0.5) / std::sqrt(variance);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

double rank_sum_exact(const std::vector<long>& r2, std::size_t n1,
                      long observed) {
  const std::size_t total = r2.size();
  const long max_sum = std::accumulate(r2.begin(), r2.end(), 0L);
  // ways[k][s]: subsets of size k with doubled rank sum s.
  std::vector<std::vector<std::uint64_t>> ways(
      n1 + 1, std::vector<std::uint64_t>(max_sum + 1, 0));
  ways[0][0] = 1;
  for (std::size_t item = 0; item < total; ++item) {
    const long r = r2[item];
    for (std::size_t k = std::min(n1, item + 1); k >= 1; --k) {
      auto& dst = ways[k];
      const auto& src = ways[k - 1];
      for (long s = max_sum; s >= r; --s) dst[s] += src[s - r];
    }
  }
  const long centre = static_cast<long>(n1) * static_cast<long>(total + 1);
  const long obs_dev = std::labs(observed - centre);
  std::uint64_t extreme = 0, all = 0;
  for (long s = 0; s <= max_sum; ++s) {
    all += ways[n1][s];
    if (std::labs(s - centre) >= obs_dev) extreme += ways[n1][s];
  }
  return static_cast<double>(extreme) / static_cast<double>(all);
}

double signed_rank_exact(const std::vector<long>& r2, long observed) {
  const long total = std::accumulate(r2.begin(), r2.end(), 0L);
  std::vector<std::uint64_t> ways(total + 1, 0);
  ways[0] = 1;
  for (long r : r2) {
    for (long s = total; s >= r; --s) ways[s] += ways[s - r];
  }
  const long obs_dev = std::labs(2 * observed - total);
  std::uint64_t extreme = 0, all = 0;
  for (long s = 0; s <= total; ++s) {
    all += ways[s];
    if (std::labs(2 * s - total) >= obs_dev) extreme += ways[s];
  }
  return static_cast<double>(extreme) / static_cast<double>(all);
}

}  // namespace

double wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b,
                         TestMethod method) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("wilcoxon_rank_sum needs non-empty samples");
  }
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const DoubledRanks dr = doubled_midranks(pooled);
  const std::size_t n1 = a.size(), n2 = b.size();
  const long observed =
      std::accumulate(dr.ranks.begin(), dr.ranks.begin() + n1, 0L);

  const bool exact =
      method == TestMethod::kExact ||
      (method == TestMethod::kAuto && n1 <= kRankSumExactMaxPerSide &&
       n2 <= kRankSumExactMaxPerSide);
  if (exact) return rank_sum_exact(dr.ranks, n1, observed);

  const double N = static_cast<double>(n1 + n2);
  const double u1 = observed / 2.0 - n1 * (n1 + 1.0) / 2.0;
  const double mu = n1 * static_cast<double>(n2) / 2.0;
  const double var = n1 * static_cast<double>(n2) / 12.0 *
                     ((N + 1.0) - dr.tie_term / (N * (N - 1.0)));
  return normal_two_sided(std::fabs(u1 - mu), var);
}

std::optional<double> wilcoxon_signed_rank(std::span<const double> a,
                                           std::span<const double> b,
                                           TestMethod method) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("wilcoxon_signed_rank needs paired samples");
  }
  std::vector<double> magnitude;
  std::vector<bool> positive;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d == 0.0) continue;
    magnitude.push_back(std::fabs(d));
    positive.push_back(d > 0.0);
  }
  if (magnitude.empty()) return std::nullopt;

  const DoubledRanks dr = doubled_midranks(magnitude);
  long observed = 0;
  for (std::size_t i = 0; i < magnitude.size(); ++i) {
    if (positive[i]) observed += dr.ranks[i];
  }
  const std::size_t n = magnitude.size();
  const bool exact =
      method == TestMethod::kExact ||
      (method == TestMethod::kAuto && n <= kSignedRankExactMaxPairs);
  if (exact) return signed_rank_exact(dr.ranks, observed);

  const double nd = static_cast<double>(n);
  const double w = observed / 2.0;
  const double mu = nd * (nd + 1.0) / 4.0;
  const double var =
      nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - dr.tie_term / 48.0;
  return normal_two_sided(std::fabs(w - mu), var);
}

}  // namespace esa::stats
