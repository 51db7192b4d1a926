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

#include <algorithm>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "esa/rng.hpp"
#include "esa/significance.hpp"

namespace esa::stats {

std::string_view to_string(ClusterTest t) {
  return t == ClusterTest::kSignedRank ? "signed_rank" : "rank_sum";
}

ClusterTest parse_cluster_test(std::string_view s) {
  if (s == "rank_sum" || s == "rank-sum") return ClusterTest::kRankSum;
  if (s == "signed_rank" || s == "signed-rank") return ClusterTest::kSignedRank;
  throw std::invalid_argument(fmt::format("unknown cluster test '{}'", s));
}

double cluster_test_p(const std::vector<double>& a, const std::vector<double>& b,
                      ClusterTest test) {
  if (test == ClusterTest::kRankSum) return wilcoxon_rank_sum(a, b);
  return wilcoxon_signed_rank(a, b).value_or(1.0);
}

Ranking cluster_systems(const std::vector<SystemScore>& scores,
                        const ClusterConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie strictly between 0 and 1");
  }
  std::vector<const SystemScore*> order;
  for (const auto& s : scores) order.push_back(&s);
  std::sort(order.begin(), order.end(),
            [](const SystemScore* a, const SystemScore* b) {
              if (a->mean != b->mean) return a->mean > b->mean;
              return a->system_id < b->system_id;
            });

  Ranking ranking;
  std::vector<const SystemScore*> current;
  int cluster = 1;
  for (const SystemScore* s : order) {
    bool worse_than_all = !current.empty();
    for (const SystemScore* member : current) {
      if (cluster_test_p(member->segment_values, s->segment_values, cfg.test) >=
          cfg.alpha) {
        worse_than_all = false;
        break;
      }
    }
    if (worse_than_all) {
      ++cluster;
      current.clear();
    }
    current.push_back(s);
    ranking.systems.push_back({s->system_id, s->mean, cluster});
  }
  return ranking;
}

namespace {

int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

PairAgreement pairwise_agreement(const std::vector<SystemScore>& candidate,
                                 const std::vector<SystemScore>& reference) {
  std::map<std::string, double> ref;
  for (const auto& s : reference) ref[s.system_id] = s.mean;
  std::map<std::string, double> cand;
  for (const auto& s : candidate) cand[s.system_id] = s.mean;
  if (ref.size() != reference.size() || cand.size() != candidate.size()) {
    throw std::invalid_argument("duplicate system in ranking");
  }
  if (cand.size() != ref.size() ||
      !std::equal(cand.begin(), cand.end(), ref.begin(),
                  [](const auto& x, const auto& y) { return x.first == y.first; })) {
    throw std::invalid_argument("rankings cover different system sets");
  }
  if (cand.size() < 2) {
    throw std::invalid_argument("pairwise accuracy needs at least two systems");
  }

  std::vector<std::pair<double, double>> rows;
  for (const auto& [id, mean] : cand) rows.emplace_back(mean, ref.at(id));

  PairAgreement out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      const int sc = sign(rows[i].first - rows[j].first);
      const int sr = sign(rows[i].second - rows[j].second);
      ++out.pairs;
      if (sc == sr) {
        out.half_points += 2;
      } else if (sc == 0 || sr == 0) {
        out.half_points += 1;
      }
    }
  }
  return out;
}

double pairwise_accuracy(const std::vector<SystemScore>& candidate,
                         const std::vector<SystemScore>& reference) {
  return pairwise_agreement(candidate, reference).accuracy();
}

std::vector<std::size_t> default_subset_sizes(std::size_t segment_count) {
  std::vector<std::size_t> sizes;
  if (segment_count == 0) return sizes;
  if (segment_count <= 200) {
    for (std::size_t n = 1; n <= segment_count; ++n) sizes.push_back(n);
    return sizes;
  }
  constexpr std::size_t kPoints = 50;
  for (std::size_t i = 1; i <= kPoints; ++i) {
    sizes.push_back(std::max<std::size_t>(1, segment_count * i / kPoints));
  }
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  return sizes;
}

ConsistencyCurve subset_consistency(const SystemScoreTable& table,
                                    const ConsistencyOptions& options) {
  const std::size_t n_segments = table.segment_ids.size();
  if (table.systems.size() < 2) {
    throw std::invalid_argument("subset consistency needs at least two systems");
  }
  if (options.resamples < 1) {
    throw std::invalid_argument("subset consistency needs resamples >= 1");
  }
  std::vector<std::size_t> sizes = options.subset_sizes.empty()
                                       ? default_subset_sizes(n_segments)
                                       : options.subset_sizes;
  for (std::size_t n : sizes) {
    if (n == 0 || n > n_segments) {
      throw std::invalid_argument(fmt::format(
          "subset size {} outside [1, {}] segments", n, n_segments));
    }
  }

  Rng rng(options.seed);
  std::vector<SystemScore> subset = table.systems;
  ConsistencyCurve curve;
  for (std::size_t n : sizes) {
    double total = 0.0;
    for (int r = 0; r < options.resamples; ++r) {
      const std::vector<std::size_t> picked = rng.sample_indices(n_segments, n);
      for (std::size_t s = 0; s < subset.size(); ++s) {
        const auto& values = table.systems[s].segment_values;
        // Same summation order as mean_of(), so n == n_segments reproduces
        // the full-data means bit for bit.
        double sum = 0.0;
        for (std::size_t idx : picked) sum += values[idx];
        subset[s].mean = sum / static_cast<double>(n);
      }
      total += pairwise_accuracy(subset, table.systems);
    }
    curve.points.push_back({n, total / options.resamples});
  }
  double sum = 0.0;
  for (const auto& p : curve.points) sum += p.mean_accuracy;
  curve.average = curve.points.empty() ? 0.0 : sum / curve.points.size();
  return curve;
}

ConsistencyCurve subset_consistency(
    const std::vector<SegmentAnnotation>& annotations,
    const ScoreOptions& score_options, const ConsistencyOptions& options) {
  return subset_consistency(system_scores(annotations, score_options), options);
}

}  // namespace esa::stats
