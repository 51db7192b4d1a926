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

#include "esa/model.hpp"

#include <cmath>

#include <fmt/format.h>

namespace esa {

std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::kEsa:
      return "esa";
    case Protocol::kMqm:
      return "mqm";
    case Protocol::kDa:
      return "da";
  }
  return "unknown";
}

std::string_view to_string(Severity s) {
  return s == Severity::kMajor ? "major" : "minor";
}

Protocol parse_protocol(std::string_view s) {
  if (s == "esa" || s == "ESA") return Protocol::kEsa;
  if (s == "mqm" || s == "MQM") return Protocol::kMqm;
  if (s == "da" || s == "DA") return Protocol::kDa;
  throw std::invalid_argument(fmt::format("unknown protocol '{}'", s));
}

Severity parse_severity(std::string_view s) {
  if (s == "minor" || s == "Minor") return Severity::kMinor;
  if (s == "major" || s == "Major") return Severity::kMajor;
  throw std::invalid_argument(fmt::format("unknown severity '{}'", s));
}

SeverityCounts count_severities(const std::vector<ErrorSpan>& spans) {
  SeverityCounts c;
  for (const auto& s : spans) {
    if (s.severity == Severity::kMajor) {
      ++c.major;
    } else {
      ++c.minor;
    }
    if (s.is_missing) ++c.missing;
  }
  return c;
}

namespace {

// Length of the UTF-8 sequence introduced by `lead`, or 0 if invalid.
int sequence_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 0;
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

}  // namespace

std::int64_t utf8_length(std::string_view text) {
  std::int64_t count = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const int len = sequence_length(static_cast<unsigned char>(text[i]));
    if (len == 0 || i + len > text.size()) {
      throw std::invalid_argument(
          fmt::format("malformed UTF-8 at byte {}", i));
    }
    for (int k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) >> 6) != 0x2) {
        throw std::invalid_argument(
            fmt::format("malformed UTF-8 at byte {}", i + k));
      }
    }
    i += len;
    ++count;
  }
  return count;
}

std::size_t utf8_byte_offset(std::string_view text, std::int64_t cp_index) {
  std::size_t i = 0;
  for (std::int64_t cp = 0; cp < cp_index; ++cp) {
    if (i >= text.size()) {
      throw std::out_of_range("code point index past end of text");
    }
    const int len = sequence_length(static_cast<unsigned char>(text[i]));
    i += len == 0 ? 1 : len;
  }
  return i;
}

std::string utf8_substr(std::string_view text, CharInterval range) {
  const std::size_t b = utf8_byte_offset(text, range.start);
  const std::size_t e = utf8_byte_offset(text, range.end);
  return std::string(text.substr(b, e - b));
}

int count_tokens(std::string_view text) {
  int tokens = 0;
  bool in_token = false;
  for (char c : text) {
    if (is_space(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++tokens;
    }
  }
  return tokens;
}

std::string displayed_target(std::string_view target_text) {
  std::string out(target_text);
  out += kMissingSuffix;
  return out;
}

CharInterval sentinel_interval(std::int64_t target_length) {
  return {target_length + 1,
          target_length + static_cast<std::int64_t>(kMissingSuffix.size())};
}

SourceSegment make_segment(std::string seg_id, std::string source_text) {
  SourceSegment s;
  s.seg_id = std::move(seg_id);
  s.token_count = count_tokens(source_text);
  s.source_text = std::move(source_text);
  return s;
}

std::vector<Violation> validate_output(const SystemOutput& t) {
  std::vector<Violation> out;
  if (t.is_perturbed) {
    if (!t.perturbed_range) {
      out.push_back({"perturbed_range_missing",
                     "perturbed output without perturbed_range"});
    } else {
      const std::int64_t len = utf8_length(t.target_text);
      const auto& r = *t.perturbed_range;
      if (r.start < 0 || r.start > r.end || r.end > len) {
        out.push_back({"perturbed_range_out_of_bounds",
                       fmt::format("perturbed_range [{}, {}) outside [0, {}]",
                                   r.start, r.end, len)});
      }
    }
  }
  return out;
}

std::vector<Violation> validate_annotation(const SegmentAnnotation& a,
                                           const SystemOutput& t) {
  if (a.system_id != t.system_id || a.seg_id != t.seg_id ||
      a.is_perturbed != t.is_perturbed) {
    throw IdentityError(fmt::format(
        "annotation for ({}, {}{}) checked against output ({}, {}{})",
        a.system_id, a.seg_id, a.is_perturbed ? ", perturbed" : "",
        t.system_id, t.seg_id, t.is_perturbed ? ", perturbed" : ""));
  }

  std::vector<Violation> out;
  const std::string_view proto = to_string(a.protocol);

  if (protocol_has_score(a.protocol)) {
    if (!a.direct_score) {
      out.push_back({"score_required",
                     fmt::format("score required for {}", proto)});
    } else if (!std::isfinite(*a.direct_score) || *a.direct_score < 0.0 ||
               *a.direct_score > 100.0) {
      out.push_back({"score_out_of_range",
                     fmt::format("score {} outside [0, 100]", *a.direct_score)});
    }
  } else if (a.direct_score) {
    out.push_back({"score_forbidden", "score forbidden for MQM"});
  }

  if (!protocol_has_spans(a.protocol) && !a.spans.empty()) {
    out.push_back({"spans_forbidden", "spans forbidden for DA"});
  }

  const std::int64_t target_len = utf8_length(t.target_text);
  const std::int64_t displayed_len =
      target_len + static_cast<std::int64_t>(kMissingSuffix.size());

  for (std::size_t i = 0; i < a.spans.size(); ++i) {
    const ErrorSpan& s = a.spans[i];
    if (s.start < 0 || s.end > displayed_len || s.start > s.end) {
      out.push_back({"span_out_of_bounds",
                     fmt::format("span {} [{}, {}) out of bounds [0, {}]", i,
                                 s.start, s.end, displayed_len)});
      continue;
    }
    if (s.is_missing) {
      if (s.start < target_len) {
        out.push_back({"missing_off_sentinel",
                       fmt::format("missing span {} [{}, {}) does not anchor "
                                   "to the [MISSING] token",
                                   i, s.start, s.end)});
      }
    } else {
      if (s.start >= s.end) {
        out.push_back({"span_empty", fmt::format("span {} is empty", i)});
      } else if (s.end > target_len) {
        out.push_back({"span_on_sentinel",
                       fmt::format("span {} covers the [MISSING] token but "
                                   "is not flagged as missing",
                                   i)});
      }
    }
    if (a.protocol == Protocol::kMqm) {
      if (!s.category || s.category->empty()) {
        out.push_back({"category_required",
                       fmt::format("span {} has no category (MQM)", i)});
      }
    } else if (s.category) {
      out.push_back({"category_forbidden",
                     fmt::format("span {} has a category under {}", i, proto)});
    }
  }

  if (a.submitted_at_ms < a.started_at_ms) {
    out.push_back({"timestamps_inverted", "submitted_at precedes started_at"});
  }
  const double elapsed_s =
      static_cast<double>(a.submitted_at_ms - a.started_at_ms) / 1000.0;
  if (!std::isfinite(a.duration_s) || a.duration_s < 0.0) {
    out.push_back({"duration_negative", "duration_s must be >= 0"});
  } else if (a.duration_s > elapsed_s + 1e-3) {
    out.push_back({"duration_mismatch",
                   fmt::format("duration_s {} exceeds submitted_at - "
                               "started_at = {}",
                               a.duration_s, elapsed_s)});
  }
  return out;
}

std::string format_violations(const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.code;
    out += ": ";
    out += v.message;
  }
  return out;
}

}  // namespace esa
