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

// Canonical data model shared by every module: documents, system outputs,
// error spans and segment annotations.
//
// All character offsets are counted in Unicode scalar values of the
// *displayed* target, which is the target text followed by the sentinel
// " [MISSING]". Omission errors are spans over that sentinel.

#ifndef ESA_MODEL_HPP_
#define ESA_MODEL_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace esa {

enum class Protocol { kEsa, kMqm, kDa };
enum class Severity { kMinor, kMajor };

std::string_view to_string(Protocol p);
std::string_view to_string(Severity s);
Protocol parse_protocol(std::string_view s);
Severity parse_severity(std::string_view s);

// ESA and DA collect a 0-100 score; ESA and MQM collect spans.
constexpr bool protocol_has_score(Protocol p) { return p != Protocol::kMqm; }
constexpr bool protocol_has_spans(Protocol p) { return p != Protocol::kDa; }

inline constexpr std::string_view kMissingToken = "[MISSING]";
// Separator + token, appended to every displayed target.
inline constexpr std::string_view kMissingSuffix = " [MISSING]";

// Half-open interval [start, end) of Unicode scalar values.
struct CharInterval {
  std::int64_t start = 0;
  std::int64_t end = 0;

  std::int64_t length() const { return end - start; }
  bool operator==(const CharInterval&) const = default;
};

struct SourceSegment {
  std::string seg_id;
  std::string source_text;
  int token_count = 0;

  bool operator==(const SourceSegment&) const = default;
};

struct Document {
  std::string doc_id;
  std::string domain_tag;
  std::vector<SourceSegment> segments;

  int segment_count() const { return static_cast<int>(segments.size()); }
  bool operator==(const Document&) const = default;
};

struct SystemOutput {
  std::string system_id;
  std::string seg_id;
  std::string target_text;
  bool is_perturbed = false;
  std::optional<CharInterval> perturbed_range;

  bool operator==(const SystemOutput&) const = default;
};

struct ErrorSpan {
  std::int64_t start = 0;
  std::int64_t end = 0;
  Severity severity = Severity::kMinor;
  std::optional<std::string> category;
  bool is_missing = false;

  CharInterval interval() const { return {start, end}; }
  bool operator==(const ErrorSpan&) const = default;
};

struct SegmentAnnotation {
  std::string annotator_id;
  std::string system_id;
  std::string seg_id;
  Protocol protocol = Protocol::kEsa;
  // Marks annotations of attention-check (perturbed) copies. Such
  // annotations share system_id/seg_id with the original unit.
  bool is_perturbed = false;
  std::vector<ErrorSpan> spans;
  std::optional<double> direct_score;
  std::int64_t started_at_ms = 0;
  std::int64_t submitted_at_ms = 0;
  double duration_s = 0.0;

  bool operator==(const SegmentAnnotation&) const = default;
};

struct SeverityCounts {
  int minor = 0;
  int major = 0;
  int missing = 0;
};

// Missing spans are also counted under their own severity.
SeverityCounts count_severities(const std::vector<ErrorSpan>& spans);

// --- Text utilities -------------------------------------------------------

// Number of Unicode scalar values in a UTF-8 string. Throws
// std::invalid_argument on malformed UTF-8.
std::int64_t utf8_length(std::string_view text);

// Byte offset of the code point with index `cp_index` (may equal length).
std::size_t utf8_byte_offset(std::string_view text, std::int64_t cp_index);

// Substring by code-point interval.
std::string utf8_substr(std::string_view text, CharInterval range);

int count_tokens(std::string_view text);

// target_text + " [MISSING]".
std::string displayed_target(std::string_view target_text);

// Code-point interval of the sentinel token within the displayed target.
CharInterval sentinel_interval(std::int64_t target_length);

SourceSegment make_segment(std::string seg_id, std::string source_text);

// --- Validation -----------------------------------------------------------

struct Violation {
  std::string code;
  std::string message;

  bool operator==(const Violation&) const = default;
};

// Raised when an annotation is checked against the output of a different
// (system, segment) unit.
class IdentityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Returns every invariant violation of `a` shown against `t`; empty means
// valid. Throws IdentityError when `t` is not the unit `a` refers to.
std::vector<Violation> validate_annotation(const SegmentAnnotation& a,
                                           const SystemOutput& t);

// Invariants of a system output on its own (perturbation bookkeeping).
std::vector<Violation> validate_output(const SystemOutput& t);

std::string format_violations(const std::vector<Violation>& violations);

}  // namespace esa

#endif  // ESA_MODEL_HPP_
