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

// Campaign store: serves units to annotators, takes submissions and keeps
// everything in an append-only log per campaign.
//
// Layout under the storage root:
//   <campaign_id>/manifest.json   written once at creation
//   <campaign_id>/log.jsonl       one event per line, fsync'd per append
//
// A torn final line (crash mid-append) is dropped on open.

#ifndef ESA_STORE_HPP_
#define ESA_STORE_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "esa/campaign.hpp"
#include "esa/model.hpp"
#include "json.hpp"

namespace esa {

// Milliseconds since the Unix epoch.
using Clock = std::function<std::int64_t()>;
std::int64_t system_clock_ms();

// Environment variable naming the storage root.
inline constexpr const char* kStorageEnv = "ESA_STORAGE";

class StoreError : public std::runtime_error {
 public:
  StoreError(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

struct TutorialView {
  std::string item_id;
  std::string source;
  std::string target;
  int index = 0;
  int count = 0;
};

// What the annotator sees. System identity is withheld.
struct UnitView {
  std::string campaign_id;
  std::string task_id;
  int unit_index = 0;
  int unit_count = 0;
  Protocol protocol = Protocol::kEsa;
  std::string doc_id;
  int position_in_document = 0;
  std::vector<std::string> document_sources;
  std::string source;
  std::string target;
  std::vector<std::string> taxonomy;
  // The live record when the unit was already submitted.
  std::optional<std::vector<ErrorSpan>> previous_spans;
  std::optional<double> previous_score;
};

struct NextItem {
  enum class Kind { kTutorial, kUnit, kDone };
  Kind kind = Kind::kDone;
  std::optional<TutorialView> tutorial;
  std::optional<UnitView> unit;
};

struct SubmitRequest {
  std::string annotator_id;
  std::string task_id;
  int unit_index = 0;
  std::vector<ErrorSpan> spans;
  std::optional<double> direct_score;
};

struct SubmitResult {
  bool accepted = false;
  std::vector<Violation> violations;
  int revision = 0;  // 1 for the first accepted submission of a unit
};

struct TutorialResult {
  bool passed = false;  // every item of the campaign has passed
  std::vector<TutorialItemResult> items;
};

struct ExportBundle {
  std::string status;  // "open" or "complete"
  std::string annotations_jsonl;  // live records
  std::string revisions_jsonl;    // every accepted submission
  std::string perturbations_jsonl;
  std::string timing_csv;
};

class CampaignStore {
 public:
  // Opens (creating if needed) the storage root and replays every campaign
  // found there.
  explicit CampaignStore(std::filesystem::path root, Clock clock = system_clock_ms);
  ~CampaignStore();

  CampaignStore(const CampaignStore&) = delete;
  CampaignStore& operator=(const CampaignStore&) = delete;

  // Throws StoreError("campaign_exists") when the id is taken.
  void create(const Campaign& campaign);
  std::vector<std::string> campaign_ids() const;
  Campaign campaign(const std::string& campaign_id) const;

  NextItem next_item(const std::string& campaign_id, const std::string& annotator_id);
  // Re-serves a unit the annotator already submitted (or the current one)
  // while its task is open.
  UnitView revisit(const std::string& campaign_id, const std::string& annotator_id,
                   const std::string& task_id, int unit_index);
  SubmitResult submit(const std::string& campaign_id, const SubmitRequest& request);
  TutorialResult check_tutorial(const std::string& campaign_id,
                                const std::string& annotator_id,
                                const std::vector<TutorialAnswer>& answers);

  std::vector<SegmentAnnotation> annotations(const std::string& campaign_id) const;
  ExportBundle export_campaign(const std::string& campaign_id) const;

  struct State;

 private:
  State& state(const std::string& campaign_id) const;

  std::filesystem::path root_;
  Clock clock_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::unique_ptr<State>> campaigns_;
};

inline constexpr std::string_view kTimingCsvSchema = "timing";

nlohmann::json to_json(const NextItem& item);
nlohmann::json to_json(const UnitView& unit);
nlohmann::json to_json(const SubmitResult& result);
nlohmann::json to_json(const TutorialResult& result);

}  // namespace esa

#endif  // ESA_STORE_HPP_
