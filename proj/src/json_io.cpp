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

#include "esa/json_io.hpp"

#include <fmt/format.h>

namespace esa {

using nlohmann::json;

void require_schema_version(const json& j) {
  if (!j.is_object() || !j.contains("schema_version")) {
    throw std::invalid_argument("record lacks schema_version");
  }
  if (j.at("schema_version").get<int>() != kSchemaVersion) {
    throw std::invalid_argument(
        fmt::format("unsupported schema_version {} (expected {})",
                    j.at("schema_version").dump(), kSchemaVersion));
  }
}

void to_json(json& j, const CharInterval& v) {
  j = json{{"start", v.start}, {"end", v.end}};
}

void from_json(const json& j, CharInterval& v) {
  j.at("start").get_to(v.start);
  j.at("end").get_to(v.end);
}

void to_json(json& j, const ErrorSpan& v) {
  j = json{{"start", v.start},
           {"end", v.end},
           {"severity", to_string(v.severity)},
           {"is_missing", v.is_missing}};
  if (v.category) j["category"] = *v.category;
}

void from_json(const json& j, ErrorSpan& v) {
  // Spans are marked in the translation only.
  if (j.contains("side") && j.at("side").get<std::string>() != "target") {
    throw std::invalid_argument("source-side spans are not supported");
  }
  j.at("start").get_to(v.start);
  j.at("end").get_to(v.end);
  v.severity = parse_severity(j.at("severity").get<std::string>());
  v.is_missing = j.value("is_missing", false);
  if (j.contains("category") && !j.at("category").is_null()) {
    v.category = j.at("category").get<std::string>();
  } else {
    v.category.reset();
  }
}

void to_json(json& j, const SegmentAnnotation& v) {
  j = json{{"annotator_id", v.annotator_id},
           {"system_id", v.system_id},
           {"seg_id", v.seg_id},
           {"protocol", to_string(v.protocol)},
           {"is_perturbed", v.is_perturbed},
           {"spans", v.spans},
           {"started_at_ms", v.started_at_ms},
           {"submitted_at_ms", v.submitted_at_ms},
           {"duration_s", v.duration_s}};
  j["direct_score"] = v.direct_score ? json(*v.direct_score) : json(nullptr);
}

void from_json(const json& j, SegmentAnnotation& v) {
  j.at("annotator_id").get_to(v.annotator_id);
  j.at("system_id").get_to(v.system_id);
  j.at("seg_id").get_to(v.seg_id);
  v.protocol = parse_protocol(j.at("protocol").get<std::string>());
  v.is_perturbed = j.value("is_perturbed", false);
  v.spans = j.value("spans", std::vector<ErrorSpan>{});
  if (j.contains("direct_score") && !j.at("direct_score").is_null()) {
    v.direct_score = j.at("direct_score").get<double>();
  } else {
    v.direct_score.reset();
  }
  v.started_at_ms = j.value("started_at_ms", std::int64_t{0});
  v.submitted_at_ms = j.value("submitted_at_ms", std::int64_t{0});
  v.duration_s = j.value("duration_s", 0.0);
}

void to_json(json& j, const SystemOutput& v) {
  j = json{{"system_id", v.system_id},
           {"seg_id", v.seg_id},
           {"text", v.target_text},
           {"is_perturbed", v.is_perturbed}};
  if (v.perturbed_range) j["perturbed_range"] = *v.perturbed_range;
}

void from_json(const json& j, SystemOutput& v) {
  j.at("system_id").get_to(v.system_id);
  j.at("seg_id").get_to(v.seg_id);
  j.at("text").get_to(v.target_text);
  v.is_perturbed = j.value("is_perturbed", false);
  if (j.contains("perturbed_range") && !j.at("perturbed_range").is_null()) {
    v.perturbed_range = j.at("perturbed_range").get<CharInterval>();
  } else {
    v.perturbed_range.reset();
  }
}

void to_json(json& j, const Violation& v) {
  j = json{{"code", v.code}, {"message", v.message}};
}

void to_json(json& j, const Perturbation& v) {
  j = json{{"seg_id", v.seg_id},
           {"system_id", v.system_id},
           {"original_text", v.original_text},
           {"perturbed_text", v.perturbed_text},
           {"replaced_range", v.replaced_range},
           {"original_range", v.original_range},
           {"word_count_replaced", v.word_count_replaced},
           {"seed", v.seed}};
}

void from_json(const json& j, Perturbation& v) {
  j.at("seg_id").get_to(v.seg_id);
  j.at("system_id").get_to(v.system_id);
  j.at("original_text").get_to(v.original_text);
  j.at("perturbed_text").get_to(v.perturbed_text);
  j.at("replaced_range").get_to(v.replaced_range);
  j.at("original_range").get_to(v.original_range);
  j.at("word_count_replaced").get_to(v.word_count_replaced);
  j.at("seed").get_to(v.seed);
}

std::string annotation_to_line(const SegmentAnnotation& a) {
  json j = a;
  j["schema_version"] = kSchemaVersion;
  return j.dump();
}

SegmentAnnotation annotation_from_line(const std::string& line) {
  const json j = json::parse(line);
  require_schema_version(j);
  return j.get<SegmentAnnotation>();
}

}  // namespace esa
