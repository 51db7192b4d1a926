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

// Analysis commands behind the CLI. Each returns its artifacts in memory
// (file name -> content): report.json plus plot-ready CSVs.

#ifndef ESA_REPORT_HPP_
#define ESA_REPORT_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "esa/agreement.hpp"
#include "esa/ingest.hpp"
#include "esa/model.hpp"
#include "esa/qc.hpp"
#include "esa/ranking.hpp"
#include "esa/scoring.hpp"
#include "esa/timing.hpp"
#include "json.hpp"

namespace esa::report {

struct ReportConfig {
  std::optional<std::filesystem::path> dataset;
  std::vector<std::filesystem::path> annotations;
  std::optional<std::filesystem::path> reference;
  std::optional<std::filesystem::path> perturbations;
  // Keeps only annotations of this protocol.
  std::optional<Protocol> protocol;
  // Inferred per set when absent: direct if every annotation is scored.
  std::optional<ScoreKind> kind;
  std::optional<ScoreKind> reference_kind;
  SeverityWeights weights;
  double alpha = 0.05;
  stats::ClusterTest test = stats::ClusterTest::kRankSum;
  std::uint64_t seed = 0;
  // histogram
  std::optional<double> clip;
  std::optional<double> bin_width;
  // consistency
  std::vector<std::size_t> subset_sizes;
  int resamples = 100;
  // time
  double cap_s = stats::kBreakCapSeconds;
  int window = stats::kSpeedupWindow;
  // agreement
  CellPairing pairing = CellPairing::kAnyAnnotator;
  RecallDirection direction = RecallDirection::kGivenFirst;
  // weightscan
  double minor_weight = -1.0;
  WeightGrid grid;

  std::filesystem::path out = "out";
};

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Overrides fields of `base` with the keys present in `config`; relative
// paths resolve against `base_dir`. Unknown keys are rejected.
ReportConfig apply_config(ReportConfig base, const nlohmann::json& config,
                          const std::filesystem::path& base_dir);

struct AnnotationSet {
  std::string name;
  std::vector<SegmentAnnotation> annotations;
};

struct Inputs {
  std::optional<ingest::Dataset> dataset;
  std::vector<AnnotationSet> sets;
  std::optional<AnnotationSet> reference;
  std::vector<Perturbation> perturbations;
};

// Reads every file named in `config`. Set names are file stems.
Inputs load_inputs(const ReportConfig& config);

using Artifacts = std::map<std::string, std::string>;

Artifacts cmd_rank(const Inputs& in, const ReportConfig& config);
Artifacts cmd_agreement(const Inputs& in, const ReportConfig& config);
Artifacts cmd_qc(const Inputs& in, const ReportConfig& config);
Artifacts cmd_time(const Inputs& in, const ReportConfig& config);
Artifacts cmd_weightscan(const Inputs& in, const ReportConfig& config);
Artifacts cmd_consistency(const Inputs& in, const ReportConfig& config);
Artifacts cmd_histogram(const Inputs& in, const ReportConfig& config);

// Writes artifacts into `dir`, creating it.
void write_artifacts(const Artifacts& artifacts, const std::filesystem::path& dir);

}  // namespace esa::report

#endif  // ESA_REPORT_HPP_
