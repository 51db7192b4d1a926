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

// JSON mappings of the canonical model. Every JSONL record carries
// "schema_version": kSchemaVersion; parsing rejects records without it.

#ifndef ESA_JSON_IO_HPP_
#define ESA_JSON_IO_HPP_

#include <string>

#include "esa/model.hpp"
#include "esa/qc.hpp"
#include "json.hpp"

namespace esa {

inline constexpr int kSchemaVersion = 1;

void to_json(nlohmann::json& j, const CharInterval& v);
void from_json(const nlohmann::json& j, CharInterval& v);
void to_json(nlohmann::json& j, const ErrorSpan& v);
void from_json(const nlohmann::json& j, ErrorSpan& v);
void to_json(nlohmann::json& j, const SegmentAnnotation& v);
void from_json(const nlohmann::json& j, SegmentAnnotation& v);
void to_json(nlohmann::json& j, const SystemOutput& v);
void from_json(const nlohmann::json& j, SystemOutput& v);
void to_json(nlohmann::json& j, const Violation& v);
void to_json(nlohmann::json& j, const Perturbation& v);
void from_json(const nlohmann::json& j, Perturbation& v);

// One JSONL line (no trailing newline) including the schema version.
std::string annotation_to_line(const SegmentAnnotation& a);
SegmentAnnotation annotation_from_line(const std::string& line);

// Throws std::invalid_argument unless j["schema_version"] == kSchemaVersion.
void require_schema_version(const nlohmann::json& j);

}  // namespace esa

#endif  // ESA_JSON_IO_HPP_
