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

#include "esa/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "esa/correlation.hpp"

namespace esa {

void check_weights(const SeverityWeights& w) {
  if (!(w.minor <= 0.0) || !(w.major <= 0.0)) {
    throw std::invalid_argument(fmt::format(
        "severity weights must be <= 0 (minor={}, major={})", w.minor,
        w.major));
  }
}

std::string_view to_string(ScoreKind k) {
  switch (k) {
    case ScoreKind::kDirect:
      return "direct";
    case ScoreKind::kSpanBased:
      return "spans";
    case ScoreKind::kSpanBasedNormalized:
      return "spans-normalized";
  }
  return "unknown";
}

ScoreKind parse_score_kind(std::string_view s) {
  if (s == "direct") return ScoreKind::kDirect;
  if (s == "spans" || s == "span_based") return ScoreKind::kSpanBased;
  if (s == "spans-normalized" || s == "span_based_normalized") {
    return ScoreKind::kSpanBasedNormalized;
  }
  throw std::invalid_argument(fmt::format("unknown score kind '{}'", s));
}

TextLengths TextLengths::from(const std::vector<Document>& documents,
                              const std::vector<SystemOutput>& outputs) {
  TextLengths t;
  for (const auto& d : documents) {
    for (const auto& s : d.segments) t.source_tokens[s.seg_id] = s.token_count;
  }
  for (const auto& o : outputs) {
    if (o.is_perturbed) continue;
    t.target_tokens[{o.system_id, o.seg_id}] = count_tokens(o.target_text);
  }
  return t;
}

int TextLengths::target(const std::string& system_id,
                        const std::string& seg_id) const {
  auto it = target_tokens.find({system_id, seg_id});
  if (it == target_tokens.end()) {
    throw ScoringError(
        fmt::format("no target text for ({}, {})", system_id, seg_id));
  }
  return it->second;
}

int TextLengths::source(const std::string& seg_id) const {
  auto it = source_tokens.find(seg_id);
  if (it == source_tokens.end()) {
    throw ScoringError(fmt::format("no source text for {}", seg_id));
  }
  return it->second;
}

double span_score(const std::vector<ErrorSpan>& spans,
                  const SeverityWeights& w) {
  const SeverityCounts c = count_severities(spans);
  return w.major * c.major + w.minor * c.minor;
}

double span_score_normalized(const std::vector<ErrorSpan>& spans,
                             const SeverityWeights& w, int target_token_count) {
  if (target_token_count <= 0) throw ScoringError("empty target");
  return span_score(spans, w) / target_token_count;
}

SegmentScore segment_score(const SegmentAnnotation& a, ScoreKind kind,
                           const SeverityWeights& w,
                           const TextLengths* lengths) {
  SegmentScore out{a.annotator_id, a.system_id, a.seg_id, kind, 0.0};
  switch (kind) {
    case ScoreKind::kDirect:
      if (!protocol_has_score(a.protocol) || !a.direct_score) {
        throw ScoringError(fmt::format(
            "direct score requested for {} annotation of ({}, {})",
            to_string(a.protocol), a.system_id, a.seg_id));
      }
      out.value = *a.direct_score;
      break;
    case ScoreKind::kSpanBased:
    case ScoreKind::kSpanBasedNormalized:
      if (!protocol_has_spans(a.protocol)) {
        throw ScoringError(fmt::format(
            "span score requested for DA annotation of ({}, {})", a.system_id,
            a.seg_id));
      }
      if (kind == ScoreKind::kSpanBased) {
        out.value = span_score(a.spans, w);
      } else {
        if (lengths == nullptr) {
          throw ScoringError("normalized span score needs target lengths");
        }
        out.value = span_score_normalized(
            a.spans, w, lengths->target(a.system_id, a.seg_id));
      }
      break;
  }
  return out;
}

const SystemScore* SystemScoreTable::find(const std::string& system_id) const {
  for (const auto& s : systems) {
    if (s.system_id == system_id) return &s;
  }
  return nullptr;
}

MissingCellsError::MissingCellsError(
    std::vector<std::pair<std::string, std::string>> cells)
    : ScoringError([&] {
        std::string msg = fmt::format("{} (system, segment) cells lack a score:",
                                      cells.size());
        for (const auto& [sys, seg] : cells) {
          msg += fmt::format(" ({}, {})", sys, seg);
        }
        return msg;
      }()),
      cells_(std::move(cells)) {}

double mean_of(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

SystemScoreTable system_scores(const std::vector<SegmentAnnotation>& annotations,
                               const ScoreOptions& options) {
  // (system, seg) -> (sum, count)
  std::map<std::pair<std::string, std::string>, std::pair<double, int>> cells;
  std::set<std::string> systems;
  std::set<std::string> segments;
  for (const auto& a : annotations) {
    if (a.is_perturbed) continue;
    const SegmentScore s =
        segment_score(a, options.kind, options.weights, options.lengths);
    auto& cell = cells[{a.system_id, a.seg_id}];
    cell.first += s.value;
    cell.second += 1;
    systems.insert(a.system_id);
    segments.insert(a.seg_id);
  }

  SystemScoreTable table;
  if (options.segments) {
    table.segment_ids = *options.segments;
  } else {
    table.segment_ids.assign(segments.begin(), segments.end());
  }

  std::vector<std::pair<std::string, std::string>> missing;
  for (const auto& sys : systems) {
    SystemScore score;
    score.system_id = sys;
    score.segment_values.reserve(table.segment_ids.size());
    for (const auto& seg : table.segment_ids) {
      auto it = cells.find({sys, seg});
      if (it == cells.end()) {
        missing.emplace_back(sys, seg);
        continue;
      }
      score.segment_values.push_back(it->second.first / it->second.second);
    }
    score.mean = mean_of(score.segment_values);
    table.systems.push_back(std::move(score));
  }
  if (!missing.empty()) throw MissingCellsError(std::move(missing));
  return table;
}

std::vector<double> WeightGrid::values() const {
  if (!(step > 0.0) || hi < lo) {
    throw std::invalid_argument("weight grid needs step > 0 and lo <= hi");
  }
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) {
    // Round to 1e-9 so grid points print as the decimals they represent.
    out.push_back(std::round((lo + i * step) * 1e9) / 1e9);
  }
  return out;
}

WeightScanResult scan_major_weight(
    const std::vector<SegmentAnnotation>& annotations, double minor_weight,
    const WeightGrid& grid) {
  std::vector<double> direct;
  std::vector<SeverityCounts> counts;
  for (const auto& a : annotations) {
    if (a.protocol != Protocol::kEsa || !a.direct_score) {
      throw ScoringError(fmt::format(
          "weight scan needs ESA annotations with scores; got {} for ({}, {})",
          to_string(a.protocol), a.system_id, a.seg_id));
    }
    direct.push_back(*a.direct_score);
    counts.push_back(count_severities(a.spans));
  }
  if (direct.size() < 3) {
    throw ScoringError("weight scan needs at least 3 annotations");
  }

  WeightScanResult result;
  bool found = false;
  std::vector<double> spans(direct.size());
  for (double w_major : grid.values()) {
    for (std::size_t i = 0; i < counts.size(); ++i) {
      spans[i] = w_major * counts[i].major + minor_weight * counts[i].minor;
    }
    WeightScanPoint p{w_major, stats::pearson(direct, spans)};
    if (p.correlation && (!found || *p.correlation > result.best_correlation)) {
      result.best_major_weight = w_major;
      result.best_correlation = *p.correlation;
      found = true;
    }
    result.curve.push_back(p);
  }
  if (!found) {
    throw ScoringError("weight scan undefined: zero variance at every grid point");
  }
  return result;
}

std::vector<HistogramBin> score_histogram(const std::vector<double>& scores,
                                          double bin_width,
                                          std::optional<double> clip_at) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("bin width must be > 0");
  std::vector<HistogramBin> bins;
  if (scores.empty()) return bins;

  auto bin_of = [&](double v) {
    return static_cast<long>(std::floor(v / bin_width));
  };
  long lo = bin_of(*std::min_element(scores.begin(), scores.end()));
  const long hi = bin_of(*std::max_element(scores.begin(), scores.end()));
  if (clip_at) lo = std::max(lo, std::min(bin_of(*clip_at), hi));

  for (long b = lo; b <= hi; ++b) {
    bins.push_back({b * bin_width, (b + 1) * bin_width, 0});
  }
  for (double v : scores) {
    const long b = std::max(bin_of(v), lo);
    ++bins[static_cast<std::size_t>(b - lo)].count;
  }
  return bins;
}

double default_bin_width(ScoreKind kind) {
  return kind == ScoreKind::kDirect ? 5.0 : 1.0;
}

}  // namespace esa
