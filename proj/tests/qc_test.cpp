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

#include "esa/qc.hpp"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <vector>

#include "esa/rng.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace esa {
namespace {

using testing::ann;
using testing::major;
using testing::minor;

const std::vector<std::string> kExampleVocabulary = {
    "apple", "blue", "quietly", "river", "seven", "squirrels", "tense", "window"};

SystemOutput out(std::string text) { return {"sys", "s1", std::move(text), false, {}}; }

TEST(Perturb, ExampleFixtureIsByteExact) {
  const Perturbation p =
      perturb(out("He postponed the meeting again yesterday."), 1820, kExampleVocabulary);
  EXPECT_EQ(p.perturbed_text, "He postponed the meeting squirrels tense.");
  EXPECT_EQ(p.word_count_replaced, 2);
  EXPECT_EQ(p.replaced_range, (CharInterval{25, 40}));
  EXPECT_EQ(p.original_range, (CharInterval{25, 40}));
  EXPECT_EQ(p.seed, 1820u);
  EXPECT_EQ(restore_original(p), "He postponed the meeting again yesterday.");
}

TEST(Perturb, SameSeedSameResult) {
  const SystemOutput o = out("one two three four five six");
  EXPECT_EQ(perturb(o, 7, kExampleVocabulary), perturb(o, 7, kExampleVocabulary));
}

TEST(Perturb, InvariantsOnRandomTexts) {
  Rng rng(51);
  const std::vector<std::string> vocab = {"alpha", "été", "猫", "zz"};
  for (int k = 0; k < 2000; ++k) {
    const std::string text = oracle::random_sentence(rng);
    const Perturbation p = perturb(out(text), rng.next(), vocab);
    ASSERT_EQ(oracle::perturbation_violation(text, p), "") << text;
    ASSERT_EQ(restore_original(p), text);
  }
}

TEST(Perturb, KeepsSurroundingPunctuation) {
  Rng rng(52);
  for (int k = 0; k < 200; ++k) {
    const Perturbation p = perturb(out("(alpha) (beta) (gamma) (delta)"), rng.next(), {"w"});
    EXPECT_EQ(p.perturbed_text.front(), '(');
    EXPECT_EQ(p.perturbed_text.back(), ')');
  }
}

TEST(Perturb, Errors) {
  EXPECT_THROW(perturb(out("too short"), 1, kExampleVocabulary), NotPerturbableError);
  EXPECT_THROW(perturb(out("a b c"), 1, {}), std::invalid_argument);
  EXPECT_THROW(perturb(out("a b c"), 1, {"two words"}), std::invalid_argument);
}

TEST(Perturb, OutputCopyCarriesRange) {
  const Perturbation p = perturb(out("a b c d"), 3, {"w"});
  const SystemOutput o = perturbed_output(p);
  EXPECT_TRUE(o.is_perturbed);
  EXPECT_EQ(o.target_text, p.perturbed_text);
  EXPECT_EQ(o.perturbed_range, p.replaced_range);
}

TEST(Vocabulary, StripsPunctuationAndSkipsCopies) {
  SystemOutput copy = out("ignored words");
  copy.is_perturbed = true;
  EXPECT_THAT(build_vocabulary({out("Hello, world! “Hello” -- ok."), copy}),
              ::testing::ElementsAre("Hello", "ok", "world"));
}

Perturbation fixed_perturbation() {
  Perturbation p;
  p.system_id = "sys";
  p.seg_id = "s1";
  p.original_text = "a b c d";
  p.perturbed_text = "a w c d";
  p.replaced_range = {2, 3};
  p.original_range = {2, 3};
  p.word_count_replaced = 1;
  return p;
}

SegmentAnnotation copy_of(SegmentAnnotation a) {
  a.is_perturbed = true;
  return a;
}

TEST(QcEvaluate, PassingPairCountsEverywhere) {
  const QCReport r = qc_evaluate({ann("r", "sys", "s1", 90), copy_of(ann("r", "sys", "s1", 40, {major(2, 3)}))},
                                 {fixed_perturbation()});
  EXPECT_EQ(r.pairs, 1);
  EXPECT_EQ(*r.ok_score_pct, 100);
  EXPECT_EQ(*r.ok_spans_pct, 100);
  EXPECT_EQ(*r.perturbation_marked_pct, 100);
  EXPECT_EQ(*r.mean_score_original, 90);
  EXPECT_EQ(*r.mean_spans_perturbed, 1);
}

TEST(QcEvaluate, IdenticalAnnotationsFail) {
  const auto a = ann("r", "sys", "s1", 70, {minor(0, 1)});
  const QCReport r = qc_evaluate({a, copy_of(a)}, {fixed_perturbation()});
  EXPECT_EQ(*r.ok_score_pct, 0);
  EXPECT_EQ(*r.ok_spans_pct, 0);
  EXPECT_EQ(*r.perturbation_marked_pct, 0);
}

TEST(QcEvaluate, SpanScoresWithoutDirectScore) {
  const QCReport r = qc_evaluate(
      {ann("r", "sys", "s1", std::nullopt, {}, Protocol::kMqm),
       copy_of(ann("r", "sys", "s1", std::nullopt, {minor(0, 1)}, Protocol::kMqm))},
      {fixed_perturbation()});
  EXPECT_EQ(*r.mean_score_perturbed, -1);
  EXPECT_EQ(*r.ok_score_pct, 100);
  EXPECT_EQ(*r.perturbation_marked_pct, 0);
}

TEST(QcEvaluate, IncompletePairsAreSkippedWithWarning) {
  const QCReport none = qc_evaluate({ann("r", "sys", "s1", 90)}, {fixed_perturbation()});
  EXPECT_EQ(none.pairs, 0);
  EXPECT_FALSE(none.ok_score_pct);
  ASSERT_EQ(none.warnings.size(), 1u);
  const QCReport other =
      qc_evaluate({ann("r", "sys", "s1", 90), copy_of(ann("q", "sys", "s1", 10))},
                  {fixed_perturbation()});
  EXPECT_EQ(other.pairs, 0);
  EXPECT_THAT(other.warnings[0], ::testing::HasSubstr("q"));
}

TEST(QcEvaluate, LatestSubmissionWins) {
  SegmentAnnotation early = ann("r", "sys", "s1", 10);
  early.submitted_at_ms = 1;
  SegmentAnnotation late = ann("r", "sys", "s1", 95);
  late.submitted_at_ms = 2;
  const QCReport r = qc_evaluate({late, early, copy_of(ann("r", "sys", "s1", 50))},
                                 {fixed_perturbation()});
  EXPECT_EQ(*r.mean_score_original, 95);
}

}  // namespace
}  // namespace esa
