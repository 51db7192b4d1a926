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

#include "esa/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

#include "esa/csv.hpp"
#include "esa/ingest.hpp"
#include "esa/json_io.hpp"
#include "esa/timing.hpp"

namespace esa {

using nlohmann::json;

std::int64_t system_clock_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

namespace {

struct UnitState {
  std::optional<SegmentAnnotation> live;
  int revisions = 0;
  std::int64_t first_serve = -1;
  std::int64_t last_serve = -1;
  std::int64_t last_submit = -1;
  double capped_sum = 0.0;
};

// (task index, annotator, unit index)
using UnitKey = std::tuple<std::size_t, std::string, int>;

void write_all(int fd, std::string_view data, const std::string& what) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw StoreError("io_error", fmt::format("write {}: {}", what, std::strerror(errno)));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

void sync_fd(int fd, const std::string& what) {
  if (::fsync(fd) != 0) {
    throw StoreError("io_error", fmt::format("fsync {}: {}", what, std::strerror(errno)));
  }
}

void write_file_durably(const std::filesystem::path& path, std::string_view data) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) {
    throw StoreError("io_error",
                     fmt::format("open {}: {}", tmp.string(), std::strerror(errno)));
  }
  try {
    write_all(fd, data, tmp.string());
    sync_fd(fd, tmp.string());
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  std::filesystem::rename(tmp, path);
}

bool valid_campaign_id(const std::string& id) {
  if (id.empty() || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '_' || c == '.';
  });
}

}  // namespace

struct CampaignStore::State {
  Campaign campaign;
  std::filesystem::path dir;
  int log_fd = -1;
  mutable std::mutex mu;

  std::set<std::string> annotators;
  std::map<std::string, std::size_t> task_index;
  std::map<std::string, std::set<std::string>> tutorial_passed;
  std::map<std::string, std::pair<std::size_t, int>> last_served;
  std::map<UnitKey, UnitState> units;
  std::vector<SegmentAnnotation> history;

  ~State() {
    if (log_fd >= 0) ::close(log_fd);
  }

  void index_campaign() {
    for (const auto& a : campaign.annotators()) annotators.insert(a);
    for (std::size_t i = 0; i < campaign.tasks.size(); ++i) {
      task_index[campaign.tasks[i].task_id] = i;
    }
  }

  void apply(const json& e) {
    const std::string kind = e.at("event").get<std::string>();
    if (kind == "serve") {
      const std::string annotator = e.at("annotator").get<std::string>();
      const std::size_t task = task_index.at(e.at("task").get<std::string>());
      const int index = e.at("index").get<int>();
      const std::int64_t at = e.at("at_ms").get<std::int64_t>();
      UnitState& u = units[{task, annotator, index}];
      if (u.first_serve < 0) u.first_serve = at;
      u.last_serve = at;
      last_served[annotator] = {task, index};
    } else if (kind == "submit") {
      const std::size_t task = task_index.at(e.at("task").get<std::string>());
      const int index = e.at("index").get<int>();
      auto a = e.at("annotation").get<SegmentAnnotation>();
      UnitState& u = units[{task, a.annotator_id, index}];
      u.last_submit = a.submitted_at_ms;
      u.capped_sum = e.at("capped_sum").get<double>();
      ++u.revisions;
      history.push_back(a);
      u.live = std::move(a);
    } else if (kind == "tutorial") {
      tutorial_passed[e.at("annotator").get<std::string>()].insert(
          e.at("item_id").get<std::string>());
    } else {
      throw StoreError("corrupt_log", fmt::format("unknown event '{}'", kind));
    }
  }

  void append(const json& e) {
    write_all(log_fd, e.dump() + "\n", (dir / "log.jsonl").string());
    sync_fd(log_fd, (dir / "log.jsonl").string());
    apply(e);
  }

  void open_log() {
    const auto path = dir / "log.jsonl";
    log_fd = ::open(path.c_str(), O_RDWR | O_CREAT | O_APPEND, 0644);
    if (log_fd < 0) {
      throw StoreError("io_error",
                       fmt::format("open {}: {}", path.string(), std::strerror(errno)));
    }
  }

  // Replays the log; a final line that is torn or unparseable is cut off.
  void replay() {
    const auto path = dir / "log.jsonl";
    std::string text;
    {
      std::ifstream in(path, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
    std::size_t pos = 0;
    std::size_t valid = 0;
    int line = 0;
    while (pos < text.size()) {
      ++line;
      const std::size_t nl = text.find('\n', pos);
      const bool terminated = nl != std::string::npos;
      const std::string_view record(text.data() + pos,
                                    (terminated ? nl : text.size()) - pos);
      const std::size_t next = terminated ? nl + 1 : text.size();
      json e;
      bool parsed = terminated;
      if (parsed) {
        e = json::parse(record, nullptr, false);
        parsed = !e.is_discarded();
      }
      if (!parsed) {
        if (next < text.size()) {
          throw StoreError("corrupt_log",
                           fmt::format("{}:{}: unparseable record", path.string(), line));
        }
        break;
      }
      apply(e);
      valid = next;
      pos = next;
    }
    if (valid < text.size()) {
      std::filesystem::resize_file(path, valid);
    }
  }

  bool tutorial_done(const std::string& annotator) const {
    const auto it = tutorial_passed.find(annotator);
    for (const auto& item : campaign.tutorial) {
      if (it == tutorial_passed.end() || !it->second.contains(item.item_id)) return false;
    }
    return true;
  }

  bool frozen(std::size_t task, const std::string& annotator) const {
    const Task& t = campaign.tasks[task];
    for (int i = 0; i < static_cast<int>(t.units.size()); ++i) {
      const auto it = units.find({task, annotator, i});
      if (it == units.end() || !it->second.live) return false;
    }
    return true;
  }

  bool assigned(std::size_t task, const std::string& annotator) const {
    const auto& list = campaign.tasks[task].annotators;
    return std::find(list.begin(), list.end(), annotator) != list.end();
  }

  void require_annotator(const std::string& annotator) const {
    if (!annotators.contains(annotator)) {
      throw StoreError("unknown_annotator", fmt::format("unknown annotator '{}'", annotator));
    }
  }

  UnitView view(std::size_t task, const std::string& annotator, int index) const {
    const Task& t = campaign.tasks[task];
    const Unit& unit = t.units[index];
    UnitView v;
    v.campaign_id = campaign.campaign_id;
    v.task_id = t.task_id;
    v.unit_index = index;
    v.unit_count = static_cast<int>(t.units.size());
    v.protocol = campaign.protocol;
    v.doc_id = unit.doc_id;
    const Document* doc = campaign.find_document(unit.doc_id);
    for (std::size_t i = 0; i < doc->segments.size(); ++i) {
      v.document_sources.push_back(doc->segments[i].source_text);
      if (doc->segments[i].seg_id == unit.seg_id) {
        v.position_in_document = static_cast<int>(i);
        v.source = doc->segments[i].source_text;
      }
    }
    v.target = campaign.find_output(unit)->target_text;
    v.taxonomy = campaign.taxonomy;
    const auto it = units.find({task, annotator, index});
    if (it != units.end() && it->second.live) {
      v.previous_spans = it->second.live->spans;
      v.previous_score = it->second.live->direct_score;
    }
    return v;
  }

  json serve_event(std::size_t task, const std::string& annotator, int index,
                   std::int64_t now) const {
    return json{{"event", "serve"},
                {"annotator", annotator},
                {"task", campaign.tasks[task].task_id},
                {"index", index},
                {"at_ms", now}};
  }

  template <typename Fn>
  void for_each_live(Fn fn) const {
    for (std::size_t t = 0; t < campaign.tasks.size(); ++t) {
      const Task& task = campaign.tasks[t];
      for (const auto& annotator : task.annotators) {
        for (int i = 0; i < static_cast<int>(task.units.size()); ++i) {
          const auto it = units.find({t, annotator, i});
          if (it != units.end() && it->second.live) fn(task, i, it->second);
        }
      }
    }
  }
};

CampaignStore::CampaignStore(std::filesystem::path root, Clock clock)
    : root_(std::move(root)), clock_(std::move(clock)) {
  std::filesystem::create_directories(root_);
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::directory_iterator(root_)) {
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "manifest.json")) {
      dirs.push_back(entry.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    auto s = std::make_unique<State>();
    s->dir = dir;
    std::ifstream in(dir / "manifest.json");
    try {
      s->campaign = campaign_from_json(json::parse(in));
    } catch (const std::exception& e) {
      throw StoreError("corrupt_manifest",
                       fmt::format("{}: {}", (dir / "manifest.json").string(), e.what()));
    }
    s->index_campaign();
    s->replay();
    s->open_log();
    const std::string id = s->campaign.campaign_id;
    campaigns_[id] = std::move(s);
  }
}

CampaignStore::~CampaignStore() = default;

CampaignStore::State& CampaignStore::state(const std::string& campaign_id) const {
  std::shared_lock lock(mu_);
  const auto it = campaigns_.find(campaign_id);
  if (it == campaigns_.end()) {
    throw StoreError("unknown_campaign", fmt::format("unknown campaign '{}'", campaign_id));
  }
  return *it->second;
}

void CampaignStore::create(const Campaign& campaign) {
  if (!valid_campaign_id(campaign.campaign_id)) {
    throw StoreError("invalid_campaign_id",
                     fmt::format("campaign id '{}' must match [A-Za-z0-9._-]+",
                                 campaign.campaign_id));
  }
  std::unique_lock lock(mu_);
  const auto dir = root_ / campaign.campaign_id;
  if (campaigns_.contains(campaign.campaign_id) ||
      std::filesystem::exists(dir / "manifest.json")) {
    throw StoreError("campaign_exists",
                     fmt::format("campaign '{}' already exists", campaign.campaign_id));
  }
  std::filesystem::create_directories(dir);
  auto s = std::make_unique<State>();
  s->dir = dir;
  s->campaign = campaign;
  s->index_campaign();
  s->open_log();
  write_file_durably(dir / "manifest.json", campaign_manifest(campaign));
  campaigns_[campaign.campaign_id] = std::move(s);
}

std::vector<std::string> CampaignStore::campaign_ids() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> ids;
  for (const auto& [id, s] : campaigns_) ids.push_back(id);
  return ids;
}

Campaign CampaignStore::campaign(const std::string& campaign_id) const {
  State& s = state(campaign_id);
  std::lock_guard lock(s.mu);
  return s.campaign;
}

NextItem CampaignStore::next_item(const std::string& campaign_id,
                                  const std::string& annotator_id) {
  State& s = state(campaign_id);
  std::lock_guard lock(s.mu);
  s.require_annotator(annotator_id);
  NextItem out;
  const auto& tutorial = s.campaign.tutorial;
  for (std::size_t i = 0; i < tutorial.size(); ++i) {
    const auto it = s.tutorial_passed.find(annotator_id);
    if (it != s.tutorial_passed.end() && it->second.contains(tutorial[i].item_id)) continue;
    out.kind = NextItem::Kind::kTutorial;
    out.tutorial = TutorialView{tutorial[i].item_id, tutorial[i].source, tutorial[i].target,
                                static_cast<int>(i), static_cast<int>(tutorial.size())};
    return out;
  }
  for (std::size_t t = 0; t < s.campaign.tasks.size(); ++t) {
    if (!s.assigned(t, annotator_id) || s.frozen(t, annotator_id)) continue;
    const Task& task = s.campaign.tasks[t];
    for (int i = 0; i < static_cast<int>(task.units.size()); ++i) {
      const auto it = s.units.find({t, annotator_id, i});
      if (it != s.units.end() && it->second.live) continue;
      s.append(s.serve_event(t, annotator_id, i, clock_()));
      out.kind = NextItem::Kind::kUnit;
      out.unit = s.view(t, annotator_id, i);
      return out;
    }
  }
  out.kind = NextItem::Kind::kDone;
  return out;
}

UnitView CampaignStore::revisit(const std::string& campaign_id,
                                const std::string& annotator_id,
                                const std::string& task_id, int unit_index) {
  State& s = state(campaign_id);
  std::lock_guard lock(s.mu);
  s.require_annotator(annotator_id);
  if (!s.tutorial_done(annotator_id)) {
    throw StoreError("tutorial_required", "the tutorial must be passed first");
  }
  const auto t = s.task_index.find(task_id);
  if (t == s.task_index.end() || !s.assigned(t->second, annotator_id) || unit_index < 0 ||
      unit_index >= static_cast<int>(s.campaign.tasks[t->second].units.size())) {
    throw StoreError("out_of_task",
                     fmt::format("unit {}/{} is not in a task of {}", task_id, unit_index,
                                 annotator_id));
  }
  if (s.frozen(t->second, annotator_id)) {
    throw StoreError("task_frozen", fmt::format("task {} is complete", task_id));
  }
  const auto u = s.units.find({t->second, annotator_id, unit_index});
  const bool submitted = u != s.units.end() && u->second.live;
  const auto last = s.last_served.find(annotator_id);
  const bool current = last != s.last_served.end() &&
                       last->second == std::make_pair(t->second, unit_index);
  if (!submitted && !current) {
    throw StoreError("not_served",
                     fmt::format("unit {}/{} has not been served yet", task_id, unit_index));
  }
  s.append(s.serve_event(t->second, annotator_id, unit_index, clock_()));
  return s.view(t->second, annotator_id, unit_index);
}

SubmitResult CampaignStore::submit(const std::string& campaign_id,
                                   const SubmitRequest& request) {
  State& s = state(campaign_id);
  std::lock_guard lock(s.mu);
  s.require_annotator(request.annotator_id);
  SubmitResult out;
  auto reject = [&](std::string code, std::string message) {
    out.violations.push_back({std::move(code), std::move(message)});
    return out;
  };
  if (!s.tutorial_done(request.annotator_id)) {
    return reject("tutorial_required", "the tutorial must be passed first");
  }
  const auto t = s.task_index.find(request.task_id);
  if (t == s.task_index.end() || !s.assigned(t->second, request.annotator_id) ||
      request.unit_index < 0 ||
      request.unit_index >= static_cast<int>(s.campaign.tasks[t->second].units.size())) {
    return reject("out_of_task", fmt::format("unit {}/{} is not in a task of {}",
                                             request.task_id, request.unit_index,
                                             request.annotator_id));
  }
  const std::size_t task = t->second;
  if (s.frozen(task, request.annotator_id)) {
    return reject("task_frozen", fmt::format("task {} is complete", request.task_id));
  }
  const UnitKey key{task, request.annotator_id, request.unit_index};
  const auto uit = s.units.find(key);
  const bool has_live = uit != s.units.end() && uit->second.live;
  const auto last = s.last_served.find(request.annotator_id);
  const bool current = last != s.last_served.end() &&
                       last->second == std::make_pair(task, request.unit_index);
  if (!has_live && !current) {
    return reject("not_served",
                  fmt::format("unit {}/{} is neither the current unit nor a completed one",
                              request.task_id, request.unit_index));
  }
  const UnitState& u = uit->second;
  const Unit& unit = s.campaign.tasks[task].units[request.unit_index];
  const std::int64_t now = clock_();
  const std::int64_t begin = std::max(u.last_serve, u.last_submit);
  const double interval = static_cast<double>(std::max<std::int64_t>(0, now - begin)) / 1000.0;
  const double capped = std::min(interval, stats::kBreakCapSeconds);

  SegmentAnnotation a;
  a.annotator_id = request.annotator_id;
  a.system_id = unit.system_id;
  a.seg_id = unit.seg_id;
  a.protocol = s.campaign.protocol;
  a.is_perturbed = unit.is_perturbed;
  a.spans = request.spans;
  a.direct_score = request.direct_score;
  a.started_at_ms = u.first_serve;
  a.submitted_at_ms = now;
  const double capped_sum = has_live ? u.capped_sum + capped : capped;
  a.duration_s = has_live ? capped_sum : interval;

  out.violations = validate_annotation(a, *s.campaign.find_output(unit));
  if (!out.violations.empty()) return out;

  s.append(json{{"event", "submit"},
                {"task", request.task_id},
                {"index", request.unit_index},
                {"capped_sum", capped_sum},
                {"annotation", a}});
  out.accepted = true;
  out.revision = s.units.at(key).revisions;
  return out;
}

TutorialResult CampaignStore::check_tutorial(const std::string& campaign_id,
                                             const std::string& annotator_id,
                                             const std::vector<TutorialAnswer>& answers) {
  State& s = state(campaign_id);
  std::lock_guard lock(s.mu);
  s.require_annotator(annotator_id);
  TutorialResult out;
  for (const auto& answer : answers) {
    const auto& items = s.campaign.tutorial;
    const auto item = std::find_if(items.begin(), items.end(), [&](const TutorialItem& i) {
      return i.item_id == answer.item_id;
    });
    if (item == items.end()) {
      out.items.push_back(
          {answer.item_id, false, {fmt::format("unknown tutorial item '{}'", answer.item_id)}});
      continue;
    }
    TutorialItemResult r = check_tutorial_item(*item, answer, s.campaign.protocol);
    if (r.passed && !s.tutorial_passed[annotator_id].contains(item->item_id)) {
      s.append(json{{"event", "tutorial"},
                    {"annotator", annotator_id},
                    {"item_id", item->item_id},
                    {"at_ms", clock_()}});
    }
    out.items.push_back(std::move(r));
  }
  out.passed = s.tutorial_done(annotator_id);
  return out;
}

std::vector<SegmentAnnotation> CampaignStore::annotations(
    const std::string& campaign_id) const {
  State& s = state(campaign_id);
  std::lock_guard lock(s.mu);
  std::vector<SegmentAnnotation> out;
  s.for_each_live([&](const Task&, int, const UnitState& u) { out.push_back(*u.live); });
  return out;
}

ExportBundle CampaignStore::export_campaign(const std::string& campaign_id) const {
  State& s = state(campaign_id);
  std::lock_guard lock(s.mu);
  ExportBundle b;
  bool complete = true;
  for (std::size_t t = 0; t < s.campaign.tasks.size(); ++t) {
    for (const auto& a : s.campaign.tasks[t].annotators) complete = complete && s.frozen(t, a);
  }
  b.status = complete ? "complete" : "open";

  std::vector<SegmentAnnotation> live;
  CsvWriter timing(kTimingCsvSchema,
                   {"annotator_id", "task_id", "unit_index", "system_id", "seg_id",
                    "is_perturbed", "started_at_ms", "submitted_at_ms", "duration_s",
                    "revisions"});
  s.for_each_live([&](const Task& task, int index, const UnitState& u) {
    const SegmentAnnotation& a = *u.live;
    live.push_back(a);
    timing.row({a.annotator_id, task.task_id, std::to_string(index), a.system_id, a.seg_id,
                a.is_perturbed ? "true" : "false", std::to_string(a.started_at_ms),
                std::to_string(a.submitted_at_ms), csv_number(a.duration_s),
                std::to_string(u.revisions)});
  });
  b.annotations_jsonl = ingest::write_annotations(live);
  b.revisions_jsonl = ingest::write_annotations(s.history);
  b.perturbations_jsonl = ingest::write_perturbations(s.campaign.perturbations);
  b.timing_csv = timing.str();
  return b;
}

json to_json(const UnitView& u) {
  json j{{"campaign_id", u.campaign_id},
         {"task_id", u.task_id},
         {"unit_index", u.unit_index},
         {"unit_count", u.unit_count},
         {"protocol", to_string(u.protocol)},
         {"doc_id", u.doc_id},
         {"position_in_document", u.position_in_document},
         {"document_sources", u.document_sources},
         {"source", u.source},
         {"target", u.target},
         {"missing_token", kMissingToken},
         {"taxonomy", u.taxonomy}};
  if (u.previous_spans) j["previous_spans"] = *u.previous_spans;
  if (u.previous_spans) {
    j["previous_score"] = u.previous_score ? json(*u.previous_score) : json(nullptr);
  }
  return j;
}

json to_json(const NextItem& item) {
  switch (item.kind) {
    case NextItem::Kind::kTutorial:
      return json{{"kind", "tutorial"},
                  {"item",
                   {{"item_id", item.tutorial->item_id},
                    {"source", item.tutorial->source},
                    {"target", item.tutorial->target},
                    {"index", item.tutorial->index},
                    {"count", item.tutorial->count}}}};
    case NextItem::Kind::kUnit:
      return json{{"kind", "unit"}, {"unit", to_json(*item.unit)}};
    case NextItem::Kind::kDone:
      break;
  }
  return json{{"kind", "done"}};
}

json to_json(const SubmitResult& r) {
  json violations = json::array();
  for (const auto& v : r.violations) violations.push_back(v);
  return json{{"accepted", r.accepted}, {"revision", r.revision}, {"violations", violations}};
}

json to_json(const TutorialResult& r) {
  json items = json::array();
  for (const auto& i : r.items) {
    items.push_back(
        {{"item_id", i.item_id}, {"passed", i.passed}, {"diagnostics", i.diagnostics}});
  }
  return json{{"passed", r.passed}, {"items", items}};
}

}  // namespace esa
