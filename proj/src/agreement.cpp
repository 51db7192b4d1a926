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

#include "esa/agreement.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include <fmt/format.h>

#include "esa/correlation.hpp"

namespace esa {

bool intervals_overlap(const CharInterval& a, const CharInterval& b) {
  return a.start < b.end && b.start < a.end;
}

bool spans_match(const ErrorSpan& a, const ErrorSpan& b) {
  if (a.is_missing || b.is_missing) return a.is_missing && b.is_missing;
  return intervals_overlap(a.interval(), b.interval());
}

bool span_hits_interval(const ErrorSpan& span, const CharInterval& interval) {
  return !span.is_missing && intervals_overlap(span.interval(), interval);
}

std::int64_t overlap_length(const ErrorSpan& a, const ErrorSpan& b) {
  if (a.is_missing || b.is_missing) return 0;
  return std::max<std::int64_t>(
      0, std::min(a.end, b.end) - std::max(a.start, b.start));
}

namespace {

using UnitKey = std::tuple<std::string, std::string, bool>;

UnitKey unit_of(const SegmentAnnotation& a) {
  return {a.system_id, a.seg_id, a.is_perturbed};
}

// Spans of one collection on one unit, indexed for overlap queries.
struct UnitIndex {
  std::vector<std::int64_t> starts;    // ascending
  std::vector<std::int64_t> max_end;   // prefix maximum of ends
  bool has_missing = false;

  bool hit(const ErrorSpan& b) const {
    if (b.is_missing) return has_missing;
    // Candidates are spans starting before b ends; one of them must end
    // after b starts.
    const auto k = std::lower_bound(starts.begin(), starts.end(), b.end) -
                   starts.begin();
    return k > 0 && max_end[k - 1] > b.start;
  }
};

std::map<UnitKey, UnitIndex> index_spans(
    const std::vector<SegmentAnnotation>& annotations) {
  std::map<UnitKey, std::vector<CharInterval>> raw;
  std::map<UnitKey, UnitIndex> out;
  for (const auto& a : annotations) {
    auto& unit = out[unit_of(a)];
    auto& intervals = raw[unit_of(a)];
    for (const auto& s : a.spans) {
      if (s.is_missing) {
        unit.has_missing = true;
      } else if (s.start < s.end) {
        intervals.push_back(s.interval());
      }
    }
  }
  for (auto& [key, intervals] : raw) {
    std::sort(intervals.begin(), intervals.end(),
              [](const CharInterval& x, const CharInterval& y) {
                return x.start < y.start;
              });
    auto& unit = out[key];
    std::int64_t running = INT64_MIN;
    for (const auto& iv : intervals) {
      running = std::max(running, iv.end);
      unit.starts.push_back(iv.start);
      unit.max_end.push_back(running);
    }
  }
  return out;
}

}  // namespace

double span_coverage(const std::vector<SegmentAnnotation>& a,
                     const std::vector<SegmentAnnotation>& b) {
  const auto index = index_spans(a);
  long total = 0, hits = 0;
  for (const auto& ann : b) {
    const auto it = index.find(unit_of(ann));
    for (const auto& span : ann.spans) {
      ++total;
      if (it != index.end() && it->second.hit(span)) ++hits;
    }
  }
  return total == 0 ? 1.0 : static_cast<double>(hits) / total;
}

std::string top_level_category(const std::string& category) {
  return category.substr(0, category.find('/'));
}

SpanAgreement span_agreement_frequencies(const std::vector<SegmentAnnotation>& a,
                                         const std::vector<SegmentAnnotation>& b,
                                         TaxonomyDepth depth) {
  if (depth != TaxonomyDepth::kNone) {
    for (const auto* set : {&a, &b}) {
      for (const auto& ann : *set) {
        for (const auto& s : ann.spans) {
          if (!s.category) {
            throw AgreementError(fmt::format(
                "category agreement needs categorized (MQM) spans; ({}, {}) "
                "by {} has an uncategorized span",
                ann.system_id, ann.seg_id, ann.annotator_id));
          }
        }
      }
    }
  }

  std::map<UnitKey, std::vector<const ErrorSpan*>> by_unit;
  for (const auto& ann : a) {
    auto& spans = by_unit[unit_of(ann)];
    for (const auto& s : ann.spans) spans.push_back(&s);
  }

  long total = 0, any = 0, sev = 0, cat = 0, sev_cat = 0, sev_subcat = 0;
  for (const auto& ann : b) {
    const auto it = by_unit.find(unit_of(ann));
    for (const auto& span : ann.spans) {
      ++total;
      if (it == by_unit.end()) continue;
      const ErrorSpan* best = nullptr;
      std::int64_t best_overlap = -1;
      for (const ErrorSpan* cand : it->second) {
        if (!spans_match(*cand, span)) continue;
        const std::int64_t ov = overlap_length(*cand, span);
        if (best == nullptr || ov > best_overlap ||
            (ov == best_overlap && cand->start < best->start)) {
          best = cand;
          best_overlap = ov;
        }
      }
      if (best == nullptr) continue;
      ++any;
      const bool same_sev = best->severity == span.severity;
      if (same_sev) ++sev;
      if (depth != TaxonomyDepth::kNone) {
        const bool same_top =
            top_level_category(*best->category) == top_level_category(*span.category);
        if (same_top) ++cat;
        if (same_top && same_sev) ++sev_cat;
        if (same_sev && *best->category == *span.category) ++sev_subcat;
      }
    }
  }

  auto frac = [&](long k) {
    return total == 0 ? 1.0 : static_cast<double>(k) / total;
  };
  SpanAgreement out;
  out.b_spans = static_cast<int>(total);
  out.any = frac(any);
  out.same_severity = frac(sev);
  if (depth != TaxonomyDepth::kNone) {
    out.same_category = frac(cat);
    out.same_severity_and_category = frac(sev_cat);
  }
  if (depth == TaxonomyDepth::kSubcategory) {
    out.same_severity_and_subcategory = frac(sev_subcat);
  }
  return out;
}

namespace {

struct Cell {
  double score_sum = 0.0;
  int count = 0;
  bool any = false;
  bool minor = false;
  bool major = false;

  double score() const { return score_sum / count; }
};

using CellKey = std::tuple<std::string, std::string, std::string, bool>;

std::map<CellKey, Cell> collect_cells(const std::vector<SegmentAnnotation>& run,
                                      ScoreKind kind,
                                      const SegmentAgreementOptions& options) {
  std::map<CellKey, Cell> cells;
  for (const auto& a : run) {
    const std::string annotator =
        options.pairing == CellPairing::kSameAnnotator ? a.annotator_id : "";
    Cell& c = cells[{annotator, a.system_id, a.seg_id, a.is_perturbed}];
    c.score_sum += segment_score(a, kind, options.weights, options.lengths).value;
    ++c.count;
    const SeverityCounts counts = count_severities(a.spans);
    c.any = c.any || !a.spans.empty();
    c.minor = c.minor || counts.minor > 0;
    c.major = c.major || counts.major > 0;
  }
  return cells;
}

std::optional<double> conditional_rate(long hits, long events) {
  if (events == 0) return std::nullopt;
  return static_cast<double>(hits) / events;
}

}  // namespace

AgreementReport segment_agreement(const std::vector<SegmentAnnotation>& run1,
                                  const std::vector<SegmentAnnotation>& run2,
                                  const SegmentAgreementOptions& options) {
  const auto first = collect_cells(run1, options.kind, options);
  const auto second =
      collect_cells(run2, options.second_kind.value_or(options.kind), options);

  std::vector<double> x, y;
  long any_events = 0, any_hits = 0;
  long minor_events = 0, minor_hits = 0;
  long major_events = 0, major_hits = 0;
  for (const auto& [key, c1] : first) {
    const auto it = second.find(key);
    if (it == second.end()) continue;
    const Cell& c2 = it->second;
    x.push_back(c1.score());
    y.push_back(c2.score());
    const Cell& given =
        options.direction == RecallDirection::kGivenFirst ? c1 : c2;
    const Cell& other =
        options.direction == RecallDirection::kGivenFirst ? c2 : c1;
    if (given.any) {
      ++any_events;
      any_hits += other.any;
    }
    if (given.minor) {
      ++minor_events;
      minor_hits += other.minor;
    }
    if (given.major) {
      ++major_events;
      major_hits += other.major;
    }
  }
  if (x.empty()) throw AgreementError("the two runs share no annotated cell");

  AgreementReport out;
  out.cells = static_cast<int>(x.size());
  if (x.size() >= 2) out.kendall_tau_c = stats::kendall_tau_c(x, y);
  out.pearson = stats::pearson(x, y);
  out.error_recall = conditional_rate(any_hits, any_events);
  out.minor_recall = conditional_rate(minor_hits, minor_events);
  out.major_recall = conditional_rate(major_hits, major_events);
  return out;
}

}  // namespace esa
