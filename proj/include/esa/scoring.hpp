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

// Segment- and system-level scores for ESA, MQM and DA annotations.

#ifndef ESA_SCORING_HPP_
#define ESA_SCORING_HPP_

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "esa/model.hpp"

namespace esa {

struct SeverityWeights {
  double minor = -1.0;
  double major = -5.0;
};

// Throws std::invalid_argument if a weight is positive.
void check_weights(const SeverityWeights& w);

enum class ScoreKind { kDirect, kSpanBased, kSpanBasedNormalized };

std::string_view to_string(ScoreKind k);
// Accepts "direct", "spans", "spans-normalized" (and the enum spellings).
ScoreKind parse_score_kind(std::string_view s);

class ScoringError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Whitespace token counts of sources (by seg_id) and targets (by
// system_id, seg_id). Needed by normalized scores and feature tables.
struct TextLengths {
  std::map<std::string, int> source_tokens;
  std::map<std::pair<std::string, std::string>, int> target_tokens;

  static TextLengths from(const std::vector<Document>& documents,
                          const std::vector<SystemOutput>& outputs);

  // Throws ScoringError when the unit is unknown.
  int target(const std::string& system_id, const std::string& seg_id) const;
  int source(const std::string& seg_id) const;
};

// w.major * #major + w.minor * #minor; missing spans count under their
// severity.
double span_score(const std::vector<ErrorSpan>& spans,
                  const SeverityWeights& w = {});

// span_score / target_token_count. Throws ScoringError("empty target")
// when the count is not positive.
double span_score_normalized(const std::vector<ErrorSpan>& spans,
                             const SeverityWeights& w, int target_token_count);

struct SegmentScore {
  std::string annotator_id;
  std::string system_id;
  std::string seg_id;
  ScoreKind kind = ScoreKind::kDirect;
  double value = 0.0;
};

// Throws ScoringError on a kind/protocol mismatch (direct score on MQM,
// span score on DA) or when kSpanBasedNormalized is requested without
// lengths.
SegmentScore segment_score(const SegmentAnnotation& a, ScoreKind kind,
                           const SeverityWeights& w = {},
                           const TextLengths* lengths = nullptr);

struct SystemScore {
  std::string system_id;
  double mean = 0.0;
  // Aligned with SystemScoreTable::segment_ids.
  std::vector<double> segment_values;
};

struct SystemScoreTable {
  std::vector<std::string> segment_ids;
  std::vector<SystemScore> systems;  // sorted by system_id

  const SystemScore* find(const std::string& system_id) const;
};

struct ScoreOptions {
  ScoreKind kind = ScoreKind::kDirect;
  SeverityWeights weights;
  const TextLengths* lengths = nullptr;
  // Restricts the shared segment list; by default it is the union of all
  // segments annotated for any system.
  std::optional<std::vector<std::string>> segments;
};

class MissingCellsError : public ScoringError {
 public:
  MissingCellsError(std::vector<std::pair<std::string, std::string>> cells);
  const std::vector<std::pair<std::string, std::string>>& cells() const {
    return cells_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> cells_;
};

// Averages repeated annotations of a (system, segment) cell, then averages
// cells per system. Attention-check annotations are ignored. Throws
// MissingCellsError listing every (system, segment) without a score.
SystemScoreTable system_scores(const std::vector<SegmentAnnotation>& annotations,
                               const ScoreOptions& options);

// Arithmetic mean computed in index order; shared by every place that
// turns a segment vector into a system mean.
double mean_of(const std::vector<double>& values);

struct WeightScanPoint {
  double major_weight = 0.0;
  std::optional<double> correlation;  // absent when undefined
};

struct WeightScanResult {
  double best_major_weight = 0.0;
  double best_correlation = 0.0;
  std::vector<WeightScanPoint> curve;
};

struct WeightGrid {
  double lo = -10.0;
  double hi = -1.0;
  double step = 0.1;

  std::vector<double> values() const;
};

// Pearson correlation between direct scores and span scores for each
// candidate major weight. Requires ESA annotations carrying a direct score;
// throws ScoringError with fewer than 3 annotations or when no grid point
// has a defined correlation.
WeightScanResult scan_major_weight(
    const std::vector<SegmentAnnotation>& annotations, double minor_weight = -1.0,
    const WeightGrid& grid = {});

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
};

// Contiguous bins of `bin_width` aligned to multiples of the width. Values
// below `clip_at` are merged into the bin containing clip_at.
std::vector<HistogramBin> score_histogram(const std::vector<double>& scores,
                                          double bin_width,
                                          std::optional<double> clip_at = {});

// Default bin widths: 5 for direct scores, 1 for span-derived scores.
double default_bin_width(ScoreKind kind);

}  // namespace esa

#endif  // ESA_SCORING_HPP_
