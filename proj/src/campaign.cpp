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

#include "esa/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <fmt/format.h>

#include "esa/agreement.hpp"
#include "esa/ingest.hpp"
#include "esa/json_io.hpp"
#include "esa/rng.hpp"

namespace esa {

using nlohmann::json;

TutorialItemResult check_tutorial_item(const TutorialItem& item,
                                       const TutorialAnswer& answer,
                                       Protocol protocol) {
  TutorialItemResult r;
  r.item_id = item.item_id;
  if (protocol_has_spans(protocol)) {
    for (const auto& req : item.required_spans) {
      bool found = false;
      bool wrong_severity = false;
      const CharInterval widened{req.range.start - item.slack, req.range.end + item.slack};
      for (const auto& s : answer.spans) {
        const bool hits = req.is_missing
                              ? s.is_missing
                              : !s.is_missing && intervals_overlap(s.interval(), widened);
        if (!hits) continue;
        if (s.severity == req.severity) {
          found = true;
          break;
        }
        wrong_severity = true;
      }
      if (found) continue;
      const std::string what =
          req.is_missing ? std::string("missing content")
                         : fmt::format("span [{}, {})", req.range.start, req.range.end);
      r.diagnostics.push_back(
          wrong_severity
              ? fmt::format("{} marked with the wrong severity (expected {})", what,
                            to_string(req.severity))
              : fmt::format("{} not marked (expected {})", what, to_string(req.severity)));
    }
  }
  if (protocol_has_score(protocol) && item.score_range) {
    const auto [lo, hi] = *item.score_range;
    if (!answer.direct_score) {
      r.diagnostics.push_back("score required");
    } else if (*answer.direct_score < lo || *answer.direct_score > hi) {
      r.diagnostics.push_back(
          fmt::format("score {} outside [{}, {}]", *answer.direct_score, lo, hi));
    }
  }
  r.passed = r.diagnostics.empty();
  return r;
}

void to_json(json& j, const TutorialItem& v) {
  json spans = json::array();
  for (const auto& s : v.required_spans) {
    spans.push_back({{"start", s.range.start},
                     {"end", s.range.end},
                     {"severity", to_string(s.severity)},
                     {"is_missing", s.is_missing}});
  }
  j = json{{"item_id", v.item_id},
           {"source", v.source},
           {"target", v.target},
           {"required_spans", spans},
           {"slack", v.slack}};
  j["score_range"] = v.score_range
                         ? json::array({v.score_range->first, v.score_range->second})
                         : json(nullptr);
}

void from_json(const json& j, TutorialItem& v) {
  j.at("item_id").get_to(v.item_id);
  j.at("source").get_to(v.source);
  j.at("target").get_to(v.target);
  v.required_spans.clear();
  for (const auto& s : j.value("required_spans", json::array())) {
    RequiredSpan r;
    s.at("start").get_to(r.range.start);
    s.at("end").get_to(r.range.end);
    r.severity = parse_severity(s.at("severity").get<std::string>());
    r.is_missing = s.value("is_missing", false);
    v.required_spans.push_back(r);
  }
  v.slack = j.value("slack", 0);
  if (j.contains("score_range") && !j.at("score_range").is_null()) {
    const auto& range = j.at("score_range");
    if (!range.is_array() || range.size() != 2) {
      throw std::invalid_argument("score_range must be [lo, hi]");
    }
    v.score_range = std::make_pair(range[0].get<double>(), range[1].get<double>());
  } else {
    v.score_range.reset();
  }
}

CampaignConfig parse_campaign_config(const json& j) {
  static const std::set<std::string> kKeys = {
      "schema_version", "campaign_id", "protocol",   "qc_rate",
      "batch_size",     "redundancy",  "seed",       "target_segments",
      "annotators",     "alpha",       "weights",    "taxonomy",
      "tutorial"};
  if (!j.is_object()) throw std::invalid_argument("campaign config must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.contains(key)) {
      throw std::invalid_argument(fmt::format("unknown campaign config key '{}'", key));
    }
  }
  if (j.contains("schema_version")) require_schema_version(j);
  CampaignConfig c;
  c.campaign_id = j.at("campaign_id").get<std::string>();
  c.protocol = parse_protocol(j.value("protocol", std::string("esa")));
  c.qc_rate = j.value("qc_rate", c.qc_rate);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.redundancy = j.value("redundancy", c.redundancy);
  c.seed = j.value("seed", c.seed);
  if (j.contains("target_segments") && !j.at("target_segments").is_null()) {
    c.target_segments = j.at("target_segments").get<int>();
  }
  c.annotators = j.value("annotators", std::vector<std::string>{});
  c.alpha = j.value("alpha", c.alpha);
  if (j.contains("weights")) {
    c.weights.minor = j.at("weights").value("minor", c.weights.minor);
    c.weights.major = j.at("weights").value("major", c.weights.major);
  }
  c.taxonomy = j.value("taxonomy", std::vector<std::string>{});
  c.tutorial = j.value("tutorial", std::vector<TutorialItem>{});
  return c;
}

CampaignConfig read_campaign_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument(fmt::format("cannot open {}", path.string()));
  try {
    return parse_campaign_config(json::parse(in));
  } catch (const std::exception& e) {
    throw std::invalid_argument(fmt::format("{}: {}", path.string(), e.what()));
  }
}

int Task::regular_unit_count() const {
  return static_cast<int>(std::count_if(units.begin(), units.end(),
                                        [](const Unit& u) { return !u.is_perturbed; }));
}

std::vector<std::string> Campaign::annotators() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& t : tasks) {
    for (const auto& a : t.annotators) {
      if (seen.insert(a).second) out.push_back(a);
    }
  }
  return out;
}

int Campaign::regular_unit_count() const {
  int n = 0;
  for (const auto& t : tasks) n += t.regular_unit_count();
  return n;
}

const SystemOutput* Campaign::find_output(const Unit& unit) const {
  for (const auto& o : outputs) {
    if (o.system_id == unit.system_id && o.seg_id == unit.seg_id &&
        o.is_perturbed == unit.is_perturbed) {
      return &o;
    }
  }
  return nullptr;
}

const Document* Campaign::find_document(const std::string& doc_id) const {
  for (const auto& d : documents) {
    if (d.doc_id == doc_id) return &d;
  }
  return nullptr;
}

namespace {

struct Block {
  std::size_t doc = 0;
  std::string system_id;
  int size = 0;
  bool perturbed = false;
};

void check_config(const CampaignConfig& c) {
  if (c.campaign_id.empty()) throw CampaignError("campaign_id must not be empty");
  if (c.batch_size <= 0) throw CampaignError("batch_size must be positive");
  if (c.redundancy < 1) throw CampaignError("redundancy must be at least 1");
  if (!(c.qc_rate >= 0.0)) throw CampaignError("qc_rate must be >= 0");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw CampaignError("alpha must lie in (0, 1)");
  check_weights(c.weights);
  if (!c.annotators.empty() &&
      static_cast<int>(c.annotators.size()) < c.redundancy) {
    throw CampaignError(fmt::format("redundancy {} needs at least {} annotators",
                                    c.redundancy, c.redundancy));
  }
  if (std::set<std::string>(c.annotators.begin(), c.annotators.end()).size() !=
      c.annotators.size()) {
    throw CampaignError("duplicate annotator token");
  }
  std::set<std::string> ids;
  for (const auto& item : c.tutorial) {
    if (!ids.insert(item.item_id).second) {
      throw CampaignError(fmt::format("duplicate tutorial item '{}'", item.item_id));
    }
  }
}

}  // namespace

Campaign build_campaign(const std::vector<Document>& documents,
                        const std::vector<SystemOutput>& outputs,
                        const CampaignConfig& config) {
  check_config(config);
  std::vector<SystemOutput> regular;
  for (const auto& o : outputs) {
    if (!o.is_perturbed) regular.push_back(o);
  }
  ingest::check_coverage(documents, regular);

  Campaign c;
  c.campaign_id = config.campaign_id;
  c.protocol = config.protocol;
  c.qc_rate = config.qc_rate;
  c.batch_size = config.batch_size;
  c.redundancy = config.redundancy;
  c.seed = config.seed;
  c.alpha = config.alpha;
  c.weights = config.weights;
  c.taxonomy = config.taxonomy;
  c.tutorial = config.tutorial;
  c.documents = config.target_segments
                    ? ingest::subsample_documents(documents, *config.target_segments,
                                                  config.seed)
                    : documents;
  if (c.documents.empty()) throw CampaignError("no documents");

  std::set<std::string> kept_segments;
  for (const auto& d : c.documents) {
    for (const auto& s : d.segments) kept_segments.insert(s.seg_id);
  }
  std::map<std::pair<std::string, std::string>, const SystemOutput*> by_cell;
  std::set<std::string> systems;
  for (const auto& o : regular) {
    systems.insert(o.system_id);
    by_cell[{o.system_id, o.seg_id}] = &o;
  }
  if (systems.empty()) throw CampaignError("no system outputs");
  c.system_ids.assign(systems.begin(), systems.end());
  for (const auto& sys : c.system_ids) {
    for (const auto& d : c.documents) {
      for (const auto& s : d.segments) c.outputs.push_back(*by_cell.at({sys, s.seg_id}));
    }
  }

  Rng rng(config.seed);

  // Largest-first packing into the least loaded task; ties follow a seeded
  // shuffle so equal-sized documents are spread randomly.
  std::vector<Block> blocks;
  int total = 0;
  for (const auto& sys : c.system_ids) {
    for (std::size_t d = 0; d < c.documents.size(); ++d) {
      blocks.push_back({d, sys, c.documents[d].segment_count(), false});
      total += c.documents[d].segment_count();
    }
  }
  rng.shuffle(blocks);
  std::stable_sort(blocks.begin(), blocks.end(),
                   [](const Block& a, const Block& b) { return a.size > b.size; });
  const int task_count = std::max(
      1, static_cast<int>(std::lround(static_cast<double>(total) / config.batch_size)));
  std::vector<std::vector<Block>> packed(task_count);
  std::vector<int> load(task_count, 0);
  for (const auto& b : blocks) {
    const auto t = std::min_element(load.begin(), load.end()) - load.begin();
    packed[t].push_back(b);
    load[t] += b.size;
  }

  const std::vector<std::string> vocabulary = build_vocabulary(c.outputs);
  std::vector<SystemOutput> perturbed_copies;

  std::vector<std::string> annotators = config.annotators;
  if (annotators.empty()) {
    for (int i = 0; i < task_count * config.redundancy; ++i) {
      annotators.push_back(fmt::format("ann-{:03}", i + 1));
    }
  } else {
    rng.shuffle(annotators);
  }

  for (int t = 0; t < task_count; ++t) {
    std::vector<Block>& order = packed[t];
    rng.shuffle(order);

    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto& doc = c.documents[order[i].doc];
      const bool perturbable = std::any_of(
          doc.segments.begin(), doc.segments.end(), [&](const SourceSegment& s) {
            return count_tokens(by_cell.at({order[i].system_id, s.seg_id})->target_text) >=
                   kMinPerturbableTokens;
          });
      if (perturbable) candidates.push_back(i);
    }
    std::size_t checks = 0;
    if (config.qc_rate > 0.0) {
      checks = static_cast<std::size_t>(
          std::max(1L, std::lround(config.qc_rate * load[t] / 100.0)));
    }
    checks = std::min(checks, candidates.size());
    std::vector<std::size_t> picked;
    for (std::size_t k : rng.sample_indices(candidates.size(), checks)) {
      picked.push_back(candidates[k]);
    }

    // Insert each check after its original, at a seeded position.
    for (auto it = picked.rbegin(); it != picked.rend(); ++it) {
      const Block original = order[*it];
      const auto pos = static_cast<std::size_t>(
          rng.between(static_cast<std::int64_t>(*it) + 1,
                      static_cast<std::int64_t>(order.size())));
      Block copy = original;
      copy.perturbed = true;
      order.insert(order.begin() + static_cast<std::ptrdiff_t>(pos), copy);
    }

    Task task;
    task.task_id = fmt::format("t{:03}", t + 1);
    for (int j = 0; j < config.redundancy; ++j) {
      task.annotators.push_back(
          annotators[(static_cast<std::size_t>(t) * config.redundancy + j) %
                     annotators.size()]);
    }
    for (const auto& b : order) {
      const Document& doc = c.documents[b.doc];
      for (const auto& s : doc.segments) {
        const SystemOutput& out = *by_cell.at({b.system_id, s.seg_id});
        if (b.perturbed) {
          if (count_tokens(out.target_text) < kMinPerturbableTokens) continue;
          const Perturbation p = perturb(out, rng.next(), vocabulary);
          c.perturbations.push_back(p);
          perturbed_copies.push_back(perturbed_output(p));
        }
        task.units.push_back({doc.doc_id, b.system_id, s.seg_id, b.perturbed});
      }
    }
    c.tasks.push_back(std::move(task));
  }
  c.outputs.insert(c.outputs.end(), perturbed_copies.begin(), perturbed_copies.end());
  return c;
}

Campaign repeat_campaign(const Campaign& prior, const std::string& campaign_id) {
  if (campaign_id.empty()) throw CampaignError("campaign_id must not be empty");
  Campaign c = prior;
  c.campaign_id = campaign_id;
  return c;
}

json campaign_to_json(const Campaign& c) {
  json docs = json::array();
  for (const auto& d : c.documents) {
    json segs = json::array();
    for (const auto& s : d.segments) {
      segs.push_back({{"seg_id", s.seg_id}, {"text", s.source_text}});
    }
    docs.push_back({{"doc_id", d.doc_id}, {"domain", d.domain_tag}, {"segments", segs}});
  }
  json tasks = json::array();
  for (const auto& t : c.tasks) {
    json units = json::array();
    for (const auto& u : t.units) {
      units.push_back({{"doc_id", u.doc_id},
                       {"system_id", u.system_id},
                       {"seg_id", u.seg_id},
                       {"is_perturbed", u.is_perturbed}});
    }
    tasks.push_back({{"task_id", t.task_id}, {"annotators", t.annotators}, {"units", units}});
  }
  return json{{"schema_version", kSchemaVersion},
              {"campaign_id", c.campaign_id},
              {"protocol", to_string(c.protocol)},
              {"qc_rate", c.qc_rate},
              {"batch_size", c.batch_size},
              {"redundancy", c.redundancy},
              {"seed", c.seed},
              {"alpha", c.alpha},
              {"weights", {{"minor", c.weights.minor}, {"major", c.weights.major}}},
              {"taxonomy", c.taxonomy},
              {"system_ids", c.system_ids},
              {"documents", docs},
              {"outputs", c.outputs},
              {"perturbations", c.perturbations},
              {"tasks", tasks},
              {"tutorial", c.tutorial}};
}

Campaign campaign_from_json(const json& j) {
  require_schema_version(j);
  Campaign c;
  j.at("campaign_id").get_to(c.campaign_id);
  c.protocol = parse_protocol(j.at("protocol").get<std::string>());
  j.at("qc_rate").get_to(c.qc_rate);
  j.at("batch_size").get_to(c.batch_size);
  j.at("redundancy").get_to(c.redundancy);
  j.at("seed").get_to(c.seed);
  j.at("alpha").get_to(c.alpha);
  j.at("weights").at("minor").get_to(c.weights.minor);
  j.at("weights").at("major").get_to(c.weights.major);
  j.at("taxonomy").get_to(c.taxonomy);
  j.at("system_ids").get_to(c.system_ids);
  for (const auto& d : j.at("documents")) {
    Document doc{d.at("doc_id").get<std::string>(), d.value("domain", std::string{}), {}};
    for (const auto& s : d.at("segments")) {
      doc.segments.push_back(
          make_segment(s.at("seg_id").get<std::string>(), s.at("text").get<std::string>()));
    }
    c.documents.push_back(std::move(doc));
  }
  j.at("outputs").get_to(c.outputs);
  j.at("perturbations").get_to(c.perturbations);
  for (const auto& t : j.at("tasks")) {
    Task task;
    t.at("task_id").get_to(task.task_id);
    t.at("annotators").get_to(task.annotators);
    for (const auto& u : t.at("units")) {
      task.units.push_back({u.at("doc_id").get<std::string>(),
                            u.at("system_id").get<std::string>(),
                            u.at("seg_id").get<std::string>(),
                            u.at("is_perturbed").get<bool>()});
    }
    c.tasks.push_back(std::move(task));
  }
  j.at("tutorial").get_to(c.tutorial);
  return c;
}

std::string campaign_manifest(const Campaign& c) {
  return campaign_to_json(c).dump(2) + "\n";
}

}  // namespace esa
