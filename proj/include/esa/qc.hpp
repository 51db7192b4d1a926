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

// Attention checks: a translation in which a few consecutive words are
// replaced by random words, shown to the same annotator next to the
// original.

#ifndef ESA_QC_HPP_
#define ESA_QC_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "esa/model.hpp"
#include "esa/scoring.hpp"

namespace esa {

inline constexpr int kMaxReplacedTokens = 4;
inline constexpr int kMinPerturbableTokens = 3;

struct Perturbation {
  std::string seg_id;
  std::string system_id;
  std::string original_text;
  std::string perturbed_text;
  CharInterval replaced_range;   // in perturbed_text
  CharInterval original_range;   // the replaced region in original_text
  int word_count_replaced = 0;
  std::uint64_t seed = 0;

  bool operator==(const Perturbation&) const = default;
};

class NotPerturbableError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Picks a run of k tokens (k uniform in [1, min(4, n - 1)], start uniform)
// and replaces each with a uniformly drawn vocabulary word. Punctuation
// leading the first or trailing the last replaced token is kept. Throws
// NotPerturbableError for targets with fewer than 3 tokens, and
// std::invalid_argument for an empty vocabulary or words containing
// whitespace.
Perturbation perturb(const SystemOutput& output, std::uint64_t seed,
                     const std::vector<std::string>& vocabulary);

// Sorted distinct word forms (punctuation stripped) of the given targets.
std::vector<std::string> build_vocabulary(const std::vector<SystemOutput>& outputs);

// The attention-check copy of the perturbed unit.
SystemOutput perturbed_output(const Perturbation& p);

// Splices the original region back; reproduces original_text exactly.
std::string restore_original(const Perturbation& p);

struct QCReport {
  int pairs = 0;
  std::optional<double> mean_score_original;
  std::optional<double> mean_score_perturbed;
  std::optional<double> mean_spans_original;
  std::optional<double> mean_spans_perturbed;
  std::optional<double> ok_score_pct;
  std::optional<double> ok_spans_pct;
  std::optional<double> perturbation_marked_pct;
  std::vector<std::string> warnings;
};

// Pairs, per perturbation and annotator, the annotation of the original
// unit with the annotation of its perturbed copy. Scores are direct scores
// when present, otherwise span scores under `weights`. Perturbations
// without both annotations are skipped with a warning.
QCReport qc_evaluate(const std::vector<SegmentAnnotation>& annotations,
                     const std::vector<Perturbation>& perturbations,
                     const SeverityWeights& weights = {});

}  // namespace esa

#endif  // ESA_QC_HPP_
