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

#include <gtest/gtest.h>

#include <vector>

#include "esa/correlation.hpp"
#include "test_util.hpp"

namespace esa::stats {
namespace {

using esa::testing::ann;
using esa::testing::major;
using esa::testing::minor;
using esa::testing::missing;

TEST(Features, EightFeaturesInOrder) {
  const std::vector<Document> docs = {
      {"d", "", {make_segment("a", "one two"), make_segment("b", "one two three"),
                 make_segment("c", "one two three four")}}};
  const std::vector<SystemOutput> outs = {{"m", "a", "w w", false, {}},
                                          {"m", "b", "w w w w", false, {}},
                                          {"m", "c", "w w w", false, {}}};
  const TextLengths len = TextLengths::from(docs, outs);
  std::vector<SegmentAnnotation> a = {
      ann("r", "m", "a", 90, {minor(0, 1)}),
      ann("r", "m", "b", 40, {major(0, 1), minor(2, 3), missing(7)}),
      ann("r", "m", "c", 70, {major(0, 1)}),
  };
  SegmentAnnotation check = ann("r", "m", "a", 0, {major(0, 1)});
  check.is_perturbed = true;
  a.push_back(check);

  const auto f = feature_correlations(a, len);
  ASSERT_EQ(f.size(), 8u);
  const std::vector<std::string> names = {
      "source_token_count",     "target_token_count",     "minor_count",
      "major_count",            "missing_count",          "minor_count_normalized",
      "major_count_normalized", "missing_count_normalized"};
  for (std::size_t i = 0; i < names.size(); ++i) EXPECT_EQ(f[i].feature, names[i]);

  // The missing span also counts as a major error.
  const std::vector<double> score = {90, 40, 70};
  EXPECT_DOUBLE_EQ(*f[0].pearson, *pearson(std::vector<double>{2, 3, 4}, score));
  EXPECT_DOUBLE_EQ(*f[1].pearson, *pearson(std::vector<double>{2, 4, 3}, score));
  EXPECT_DOUBLE_EQ(*f[3].pearson, *pearson(std::vector<double>{0, 2, 1}, score));
  EXPECT_DOUBLE_EQ(*f[6].pearson, *pearson(std::vector<double>{0, 0.5, 1.0 / 3}, score));
  EXPECT_DOUBLE_EQ(*f[4].pearson, *pearson(std::vector<double>{0, 1, 0}, score));
}

TEST(Features, DegenerateFeatureIsAbsent) {
  const std::vector<Document> docs = {
      {"d", "", {make_segment("a", "x y"), make_segment("b", "x y"), make_segment("c", "x y")}}};
  const std::vector<SystemOutput> outs = {
      {"m", "a", "w", false, {}}, {"m", "b", "w", false, {}}, {"m", "c", "w", false, {}}};
  const auto f = feature_correlations(
      {ann("r", "m", "a", 1), ann("r", "m", "b", 2), ann("r", "m", "c", 3)},
      TextLengths::from(docs, outs));
  for (const auto& x : f) EXPECT_FALSE(x.pearson) << x.feature;
}

TEST(Features, RequiresScoredSpanAnnotations) {
  const std::vector<Document> docs = {{"d", "", {make_segment("a", "x")}}};
  const std::vector<SystemOutput> outs = {{"m", "a", "w", false, {}}};
  const TextLengths len = TextLengths::from(docs, outs);
  EXPECT_THROW(feature_correlations({ann("r", "m", "a", std::nullopt, {}, Protocol::kMqm)}, len),
               ScoringError);
  EXPECT_THROW(feature_correlations({ann("r", "m", "a", 5, {}, Protocol::kDa)}, len),
               ScoringError);
}

}  // namespace
}  // namespace esa::stats
