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

#include "esa/features.hpp"

#include <array>

#include <fmt/format.h>

#include "esa/correlation.hpp"

namespace esa::stats {

std::vector<FeatureCorrelation> feature_correlations(
    const std::vector<SegmentAnnotation>& annotations,
    const TextLengths& lengths) {
  static constexpr std::array<const char*, 8> kNames = {
      "source_token_count",       "target_token_count",
      "minor_count",              "major_count",
      "missing_count",            "minor_count_normalized",
      "major_count_normalized",   "missing_count_normalized"};

  std::vector<double> score;
  std::array<std::vector<double>, kNames.size()> columns;
  for (const auto& a : annotations) {
    if (a.is_perturbed) continue;
    if (!a.direct_score || !protocol_has_spans(a.protocol)) {
      throw ScoringError(fmt::format(
          "feature correlations need scored ESA annotations; ({}, {}) is {}",
          a.system_id, a.seg_id, to_string(a.protocol)));
    }
    const SeverityCounts c = count_severities(a.spans);
    const double target = lengths.target(a.system_id, a.seg_id);
    score.push_back(*a.direct_score);
    columns[0].push_back(lengths.source(a.seg_id));
    columns[1].push_back(target);
    columns[2].push_back(c.minor);
    columns[3].push_back(c.major);
    columns[4].push_back(c.missing);
    // Zero-token targets contribute 0 errors per token.
    const double denom = target > 0 ? target : 1.0;
    columns[5].push_back(c.minor / denom);
    columns[6].push_back(c.major / denom);
    columns[7].push_back(c.missing / denom);
  }

  std::vector<FeatureCorrelation> out;
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    out.push_back({kNames[i], pearson(columns[i], score)});
  }
  return out;
}

}  // namespace esa::stats
