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

#include "esa/timing.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace esa::stats {

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

TimeStats time_stats(const std::vector<SegmentAnnotation>& annotations,
                     double cap_s) {
  TimeStats out;
  std::vector<double> pooled;
  std::map<std::string, std::vector<double>> by_annotator;
  std::map<std::string, int> seen;
  for (const auto& a : annotations) {
    ++seen[a.annotator_id];
    if (a.duration_s > cap_s) {
      ++out.excluded_over_cap;
      continue;
    }
    pooled.push_back(a.duration_s);
    by_annotator[a.annotator_id].push_back(a.duration_s);
  }
  if (pooled.empty()) {
    throw std::invalid_argument("no annotation durations within the break cap");
  }
  for (const auto& [annotator, count] : seen) {
    if (!by_annotator.contains(annotator)) {
      out.warnings.push_back(fmt::format(
          "annotator {} has no durations within {} s; excluded", annotator,
          cap_s));
    }
  }
  out.kept = static_cast<int>(pooled.size());
  out.pooled_median_s = median(pooled);
  double sum = 0.0;
  for (const auto& [annotator, durations] : by_annotator) {
    const double m = median(durations);
    out.per_annotator_medians[annotator] = m;
    sum += m;
  }
  out.mean_of_annotator_medians_s = sum / by_annotator.size();
  return out;
}

std::vector<double> moving_average(const std::vector<double>& values,
                                   int window) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  std::vector<double> out;
  const auto w = static_cast<std::size_t>(window);
  if (values.size() < w) return out;
  for (std::size_t i = 0; i + w <= values.size(); ++i) {
    double sum = 0.0;
    for (std::size_t k = i; k < i + w; ++k) sum += values[k];
    out.push_back(sum / window);
  }
  return out;
}

SpeedupResult learned_speedup(const std::vector<SegmentAnnotation>& annotations,
                              int window, double cap_s) {
  std::map<std::string, std::vector<const SegmentAnnotation*>> by_annotator;
  for (const auto& a : annotations) by_annotator[a.annotator_id].push_back(&a);

  SpeedupResult out;
  for (auto& [annotator, items] : by_annotator) {
    std::stable_sort(items.begin(), items.end(),
                     [](const SegmentAnnotation* x, const SegmentAnnotation* y) {
                       if (x->started_at_ms != y->started_at_ms) {
                         return x->started_at_ms < y->started_at_ms;
                       }
                       return x->submitted_at_ms < y->submitted_at_ms;
                     });
    std::vector<double> durations;
    for (const auto* a : items) {
      if (a->duration_s <= cap_s) durations.push_back(a->duration_s);
    }
    if (durations.size() < 2 * static_cast<std::size_t>(window)) {
      out.warnings.push_back(fmt::format(
          "annotator {} has {} timed segments (< 2 windows of {}); excluded",
          annotator, durations.size(), window));
      continue;
    }
    AnnotatorSpeedup s;
    s.annotator_id = annotator;
    s.smoothed = moving_average(durations, window);
    s.slope_s_per_segment = (s.smoothed.front() - s.smoothed.back()) /
                            static_cast<double>(durations.size() - window);
    out.annotators.push_back(std::move(s));
  }
  if (out.annotators.empty()) {
    throw std::invalid_argument("no annotator has enough data for a speedup");
  }

  double sum = 0.0;
  std::size_t longest = 0;
  for (const auto& s : out.annotators) {
    sum += s.slope_s_per_segment;
    longest = std::max(longest, s.smoothed.size());
  }
  out.mean_slope = sum / out.annotators.size();
  for (std::size_t i = 0; i < longest; ++i) {
    double total = 0.0;
    int count = 0;
    for (const auto& s : out.annotators) {
      if (i < s.smoothed.size()) {
        total += s.smoothed[i];
        ++count;
      }
    }
    out.mean_series.push_back(total / count);
  }
  return out;
}

}  // namespace esa::stats
