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

// System-level ranking: significance clusters, pairwise accuracy between
// two rankings and subset consistency.

#ifndef ESA_RANKING_HPP_
#define ESA_RANKING_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "esa/scoring.hpp"

namespace esa::stats {

enum class ClusterTest { kRankSum, kSignedRank };

std::string_view to_string(ClusterTest t);
ClusterTest parse_cluster_test(std::string_view s);

struct ClusterConfig {
  double alpha = 0.05;
  ClusterTest test = ClusterTest::kRankSum;
};

struct RankedSystem {
  std::string system_id;
  double mean = 0.0;
  int cluster = 1;  // 1 = best
};

struct Ranking {
  std::vector<RankedSystem> systems;  // descending mean

  int cluster_count() const {
    return systems.empty() ? 0 : systems.back().cluster;
  }
};

// p-value of the configured test between two segment vectors; undefined
// signed-rank results (no nonzero difference) are reported as 1.
double cluster_test_p(const std::vector<double>& a, const std::vector<double>& b,
                      ClusterTest test);

// Sorts systems by mean (descending, ties by system_id) and walks down the
// list: system S opens a new cluster iff it is significantly worse
// (p < alpha) than every system already in the current cluster.
Ranking cluster_systems(const std::vector<SystemScore>& scores,
                        const ClusterConfig& cfg);

struct PairAgreement {
  // Agreement counted in half-points so the value is exact: concordant
  // pairs score 2, pairs tied on exactly one side score 1.
  long long half_points = 0;
  long long pairs = 0;

  double accuracy() const {
    return static_cast<double>(half_points) / (2.0 * static_cast<double>(pairs));
  }
};

// Throws std::invalid_argument when the system sets differ or fewer than
// two systems are given.
PairAgreement pairwise_agreement(const std::vector<SystemScore>& candidate,
                                 const std::vector<SystemScore>& reference);

double pairwise_accuracy(const std::vector<SystemScore>& candidate,
                         const std::vector<SystemScore>& reference);

struct ConsistencyPoint {
  std::size_t subset_size = 0;
  double mean_accuracy = 0.0;
};

struct ConsistencyCurve {
  std::vector<ConsistencyPoint> points;
  double average = 0.0;  // mean over the curve
};

struct ConsistencyOptions {
  // Empty selects a default grid ending at the full segment count.
  std::vector<std::size_t> subset_sizes;
  int resamples = 100;
  std::uint64_t seed = 0;
};

// Default grid: every size up to 200 segments, otherwise 50 evenly spaced
// sizes; the full segment count is always the last point.
std::vector<std::size_t> default_subset_sizes(std::size_t segment_count);

// Accuracy of rankings computed on random segment subsets (same segments
// for every system, without replacement) against the full-data ranking.
ConsistencyCurve subset_consistency(const SystemScoreTable& table,
                                    const ConsistencyOptions& options);

ConsistencyCurve subset_consistency(
    const std::vector<SegmentAnnotation>& annotations,
    const ScoreOptions& score_options, const ConsistencyOptions& options);

}  // namespace esa::stats

#endif  // ESA_RANKING_HPP_
