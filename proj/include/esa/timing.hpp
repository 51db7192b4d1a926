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

// Annotation-time statistics.

#ifndef ESA_TIMING_HPP_
#define ESA_TIMING_HPP_

#include <map>
#include <string>
#include <vector>

#include "esa/model.hpp"

namespace esa::stats {

// Per-segment durations above this many seconds contain breaks and are
// dropped from every timing statistic.
inline constexpr double kBreakCapSeconds = 300.0;
inline constexpr int kSpeedupWindow = 15;

double median(std::vector<double> values);

struct TimeStats {
  double pooled_median_s = 0.0;
  double mean_of_annotator_medians_s = 0.0;
  std::map<std::string, double> per_annotator_medians;
  int kept = 0;
  int excluded_over_cap = 0;
  std::vector<std::string> warnings;
};

// Throws std::invalid_argument when no duration survives the cap.
TimeStats time_stats(const std::vector<SegmentAnnotation>& annotations,
                     double cap_s = kBreakCapSeconds);

struct AnnotatorSpeedup {
  std::string annotator_id;
  double slope_s_per_segment = 0.0;  // positive = getting faster
  std::vector<double> smoothed;
};

struct SpeedupResult {
  std::vector<AnnotatorSpeedup> annotators;
  double mean_slope = 0.0;
  // Position-wise mean of the smoothed series over annotators that reach
  // that position.
  std::vector<double> mean_series;
  std::vector<std::string> warnings;
};

// Trailing-window moving average ("valid" positions only).
std::vector<double> moving_average(const std::vector<double>& values, int window);

// Durations are ordered per annotator by started_at (then submitted_at)
// and smoothed with `window`; the speedup is (first window mean - last
// window mean) / (n - window). Annotators with fewer than two windows of
// data are skipped with a warning. Throws when nobody qualifies.
SpeedupResult learned_speedup(const std::vector<SegmentAnnotation>& annotations,
                              int window = kSpeedupWindow,
                              double cap_s = kBreakCapSeconds);

}  // namespace esa::stats

#endif  // ESA_TIMING_HPP_
