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

// Campaign construction: documents x systems packed into annotator tasks
// with embedded attention checks and a tutorial gate.

#ifndef ESA_CAMPAIGN_HPP_
#define ESA_CAMPAIGN_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "esa/model.hpp"
#include "esa/qc.hpp"
#include "esa/scoring.hpp"
#include "json.hpp"

namespace esa {

struct RequiredSpan {
  CharInterval range;
  Severity severity = Severity::kMinor;
  bool is_missing = false;

  bool operator==(const RequiredSpan&) const = default;
};

struct TutorialItem {
  std::string item_id;
  std::string source;
  std::string target;
  std::vector<RequiredSpan> required_spans;
  // Code points by which a required span is widened on each side before
  // the overlap test.
  int slack = 0;
  std::optional<std::pair<double, double>> score_range;  // inclusive

  bool operator==(const TutorialItem&) const = default;
};

struct TutorialAnswer {
  std::string item_id;
  std::vector<ErrorSpan> spans;
  std::optional<double> direct_score;
};

struct TutorialItemResult {
  std::string item_id;
  bool passed = false;
  std::vector<std::string> diagnostics;
};

// Extra spans never fail an item.
TutorialItemResult check_tutorial_item(const TutorialItem& item,
                                       const TutorialAnswer& answer,
                                       Protocol protocol);

struct CampaignConfig {
  std::string campaign_id;
  Protocol protocol = Protocol::kEsa;
  // Attention-check documents per 100 regular segments; 0 disables them.
  double qc_rate = 1.0;
  int batch_size = 100;
  // Annotators per task; above 1 the same unit is served to several people.
  int redundancy = 1;
  std::uint64_t seed = 0;
  // Subsample whole documents to at least this many segments first.
  std::optional<int> target_segments;
  // Opaque annotator tokens; generated when empty.
  std::vector<std::string> annotators;
  // Analysis defaults stored with the campaign.
  double alpha = 0.05;
  SeverityWeights weights;
  std::vector<std::string> taxonomy;
  std::vector<TutorialItem> tutorial;
};

CampaignConfig parse_campaign_config(const nlohmann::json& j);
CampaignConfig read_campaign_config(const std::filesystem::path& path);

struct Unit {
  std::string doc_id;
  std::string system_id;
  std::string seg_id;
  bool is_perturbed = false;

  bool operator==(const Unit&) const = default;
};

struct Task {
  std::string task_id;
  std::vector<std::string> annotators;
  std::vector<Unit> units;

  int regular_unit_count() const;
  bool operator==(const Task&) const = default;
};

struct Campaign {
  std::string campaign_id;
  Protocol protocol = Protocol::kEsa;
  double qc_rate = 1.0;
  int batch_size = 100;
  int redundancy = 1;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  SeverityWeights weights;
  std::vector<std::string> taxonomy;
  std::vector<std::string> system_ids;  // sorted
  std::vector<Document> documents;
  // Regular outputs followed by the attention-check copies.
  std::vector<SystemOutput> outputs;
  std::vector<Perturbation> perturbations;
  std::vector<Task> tasks;
  std::vector<TutorialItem> tutorial;

  std::vector<std::string> annotators() const;  // in first-assignment order
  int regular_unit_count() const;
  const SystemOutput* find_output(const Unit& unit) const;
  const Document* find_document(const std::string& doc_id) const;
};

class CampaignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every (system, document) pair lands in exactly one task, whole. Tasks are
// balanced by segment count; each gets attention-check copies of
// round(qc_rate * task segments / 100) of its documents (at least one when
// qc_rate > 0). Throws ingest::CoverageError on coverage gaps and
// CampaignError on inconsistent settings.
Campaign build_campaign(const std::vector<Document>& documents,
                        const std::vector<SystemOutput>& outputs,
                        const CampaignConfig& config);

// Same campaign under a new id; serves units in the identical order.
Campaign repeat_campaign(const Campaign& prior, const std::string& campaign_id);

nlohmann::json campaign_to_json(const Campaign& c);
Campaign campaign_from_json(const nlohmann::json& j);
// Canonical, deterministic text of the manifest.
std::string campaign_manifest(const Campaign& c);

void to_json(nlohmann::json& j, const TutorialItem& v);
void from_json(const nlohmann::json& j, TutorialItem& v);

}  // namespace esa

#endif  // ESA_CAMPAIGN_HPP_
