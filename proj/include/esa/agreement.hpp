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

// Span- and segment-level agreement between two annotation collections.
//
// Two spans match when their character intervals share at least one
// position. MISSING spans match only other MISSING spans of the same unit.

#ifndef ESA_AGREEMENT_HPP_
#define ESA_AGREEMENT_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "esa/model.hpp"
#include "esa/scoring.hpp"

namespace esa {

bool intervals_overlap(const CharInterval& a, const CharInterval& b);

// The single overlap predicate used by agreement and attention checks.
bool spans_match(const ErrorSpan& a, const ErrorSpan& b);

// Whether a (non-missing) span touches a plain interval of the text.
bool span_hits_interval(const ErrorSpan& span, const CharInterval& interval);

// Number of shared positions (0 for missing spans).
std::int64_t overlap_length(const ErrorSpan& a, const ErrorSpan& b);

// Fraction of B's spans that overlap some span of A on the same unit
// (system, segment, attention-check flag). 1.0 when B has no spans. Not
// symmetric.
double span_coverage(const std::vector<SegmentAnnotation>& a,
                     const std::vector<SegmentAnnotation>& b);

enum class TaxonomyDepth { kNone, kCategory, kSubcategory };

struct SpanAgreement {
  double any = 1.0;
  double same_severity = 1.0;
  std::optional<double> same_category;
  std::optional<double> same_severity_and_category;
  std::optional<double> same_severity_and_subcategory;
  int b_spans = 0;
};

// Top-level category: the part before the first '/'.
std::string top_level_category(const std::string& category);

class AgreementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// For every span of B, the overlapping span of A with the longest overlap
// (ties: earliest start, then input order) decides severity and category
// agreement. Category comparisons need every span to carry a category;
// otherwise AgreementError is thrown.
SpanAgreement span_agreement_frequencies(const std::vector<SegmentAnnotation>& a,
                                         const std::vector<SegmentAnnotation>& b,
                                         TaxonomyDepth depth);

enum class CellPairing {
  kSameAnnotator,  // intra-annotator: cells keyed by annotator too
  kAnyAnnotator,   // inter-annotator / cross-protocol
};

enum class RecallDirection {
  kGivenFirst,   // P(run2 marks | run1 marks)
  kGivenSecond,  // P(run1 marks | run2 marks)
};

struct AgreementReport {
  std::optional<double> kendall_tau_c;
  std::optional<double> pearson;
  std::optional<double> error_recall;
  std::optional<double> minor_recall;
  std::optional<double> major_recall;
  int cells = 0;
};

struct SegmentAgreementOptions {
  ScoreKind kind = ScoreKind::kDirect;
  // Score kind applied to the second run; defaults to `kind`.
  std::optional<ScoreKind> second_kind;
  SeverityWeights weights;
  const TextLengths* lengths = nullptr;
  CellPairing pairing = CellPairing::kSameAnnotator;
  RecallDirection direction = RecallDirection::kGivenFirst;
};

// Pairs the cells present in both runs (repeated annotations of a cell
// are averaged) and reports score correlations and error recall. Throws
// AgreementError when the runs share no cell.
AgreementReport segment_agreement(const std::vector<SegmentAnnotation>& run1,
                                  const std::vector<SegmentAnnotation>& run2,
                                  const SegmentAgreementOptions& options);

}  // namespace esa

#endif  // ESA_AGREEMENT_HPP_
