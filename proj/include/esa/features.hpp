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

#ifndef ESA_FEATURES_HPP_
#define ESA_FEATURES_HPP_

#include <optional>
#include <string>
#include <vector>

#include "esa/scoring.hpp"

namespace esa::stats {

struct FeatureCorrelation {
  std::string feature;
  std::optional<double> pearson;  // absent for degenerate features
};

// Segment-level Pearson correlation of length and error-count features
// with the direct score, in this order: source/target token count;
// minor/major/missing counts; the three counts divided by target tokens.
// Attention-check annotations are skipped.
std::vector<FeatureCorrelation> feature_correlations(
    const std::vector<SegmentAnnotation>& annotations, const TextLengths& lengths);

}  // namespace esa::stats

#endif  // ESA_FEATURES_HPP_
