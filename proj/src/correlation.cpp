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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace esa::stats {
namespace {

void check_paired(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("correlation inputs differ in length");
  }
}

bool is_constant(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
}

long long tied_pairs_in_runs(const std::vector<std::size_t>& order,
                             auto&& equal) {
  long long total = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && equal(order[i], order[j])) ++j;
    const long long t = static_cast<long long>(j - i);
    total += t * (t - 1) / 2;
    i = j;
  }
  return total;
}

// Counts strict inversions of `v` while merge-sorting it.
long long count_inversions(std::vector<double>& v, std::vector<double>& buf,
                           std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  long long inv = count_inversions(v, buf, lo, mid) +
                  count_inversions(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      inv += static_cast<long long>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
  return inv;
}

std::size_t distinct_count(std::span<const double> x) {
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

}  // namespace

std::optional<double> pearson(std::span<const double> x,
                              std::span<const double> y) {
  check_paired(x, y);
  const std::size_t n = x.size();
  if (n < 3 || is_constant(x) || is_constant(y)) return std::nullopt;

  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> fractional_ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && x[order[j]] == x[order[i]]) ++j;
    // Positions i..j-1 (0-based) share rank ((i+1) + j) / 2.
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

std::optional<double> spearman(std::span<const double> x,
                               std::span<const double> y) {
  check_paired(x, y);
  const auto rx = fractional_ranks(x);
  const auto ry = fractional_ranks(y);
  return pearson(rx, ry);
}

PairCounts concordance(std::span<const double> x, std::span<const double> y) {
  check_paired(x, y);
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });

  const long long all = static_cast<long long>(n) * (n - (n > 0)) / 2;
  const long long tied_x = tied_pairs_in_runs(
      order, [&](std::size_t a, std::size_t b) { return x[a] == x[b]; });
  const long long tied_xy =
      tied_pairs_in_runs(order, [&](std::size_t a, std::size_t b) {
        return x[a] == x[b] && y[a] == y[b];
      });

  // Within a run of equal x the y values are ascending, so every strict
  // inversion is a discordant pair.
  std::vector<double> ys(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  const long long discordant = count_inversions(ys, buf, 0, n);

  // ys is now sorted; count ties in y.
  std::vector<std::size_t> sorted_y(n);
  std::iota(sorted_y.begin(), sorted_y.end(), 0);
  const long long tied_y = tied_pairs_in_runs(
      sorted_y, [&](std::size_t a, std::size_t b) { return ys[a] == ys[b]; });

  PairCounts c;
  c.discordant = discordant;
  c.concordant = all - tied_x - tied_y + tied_xy - discordant;
  return c;
}

std::optional<double> kendall_tau_c(std::span<const double> x,
                                    std::span<const double> y) {
  check_paired(x, y);
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("kendall_tau_c needs n >= 2");
  const std::size_t m = std::min(distinct_count(x), distinct_count(y));
  if (m < 2) return std::nullopt;
  const PairCounts c = concordance(x, y);
  const double nn = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double tau = 2.0 * md * static_cast<double>(c.concordant - c.discordant) /
                     (nn * nn * (md - 1.0));
  return std::clamp(tau, -1.0, 1.0);
}

}  // namespace esa::stats
