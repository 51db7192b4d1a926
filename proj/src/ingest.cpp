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

#include "esa/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <istream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "esa/json_io.hpp"
#include "esa/rng.hpp"

namespace esa::ingest {

using nlohmann::json;

IngestError::IngestError(std::string source, int line, const std::string& message)
    : std::runtime_error(line > 0 ? fmt::format("{}:{}: {}", source, line, message)
                                  : fmt::format("{}: {}", source, message)),
      source_(std::move(source)),
      line_(line) {}

namespace {

std::string describe_cells(const char* what, const std::vector<Cell>& cells) {
  std::string out;
  if (cells.empty()) return out;
  out = fmt::format("{} {}:", cells.size(), what);
  for (const auto& [sys, seg] : cells) out += fmt::format(" ({}, {})", sys, seg);
  return out;
}

}  // namespace

CoverageError::CoverageError(std::vector<Cell> missing, std::vector<Cell> unknown)
    : std::runtime_error([&] {
        std::string msg = "coverage error: " +
                          describe_cells("missing (system, segment) outputs", missing);
        if (!unknown.empty()) {
          msg += (missing.empty() ? "" : "; ") +
                 describe_cells("outputs for unknown segments", unknown);
        }
        return msg;
      }()),
      missing_(std::move(missing)),
      unknown_(std::move(unknown)) {}

namespace {

// Calls `fn(json, line_number)` for every non-blank line; wraps parse and
// schema failures into IngestError with the line number.
void for_each_record(std::istream& in, const std::string& source,
                     const std::function<void(const json&, int)>& fn) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      require_schema_version(j);
      fn(j, number);
    } catch (const IngestError&) {
      throw;
    } catch (const std::exception& e) {
      throw IngestError(source, number, e.what());
    }
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError(path.string(), 0, "cannot open file");
  return in;
}

}  // namespace

std::vector<Document> parse_documents(std::istream& in, const std::string& source) {
  std::vector<Document> docs;
  std::set<std::string> seg_ids;
  std::set<std::string> closed_docs;
  for_each_record(in, source, [&](const json& j, int line) {
    const auto doc_id = j.at("doc_id").get<std::string>();
    auto seg = make_segment(j.at("seg_id").get<std::string>(),
                            j.at("text").get<std::string>());
    utf8_length(seg.source_text);
    if (!seg_ids.insert(seg.seg_id).second) {
      throw IngestError(source, line, fmt::format("duplicate seg_id '{}'", seg.seg_id));
    }
    if (docs.empty() || docs.back().doc_id != doc_id) {
      if (!closed_docs.insert(doc_id).second) {
        throw IngestError(source, line,
                          fmt::format("segments of document '{}' are not contiguous",
                                      doc_id));
      }
      docs.push_back({doc_id, j.value("domain", std::string{}), {}});
    }
    docs.back().segments.push_back(std::move(seg));
  });
  return docs;
}

std::vector<SystemOutput> parse_outputs(std::istream& in, const std::string& source) {
  std::vector<SystemOutput> outputs;
  std::set<std::tuple<std::string, std::string, bool>> seen;
  for_each_record(in, source, [&](const json& j, int line) {
    auto o = j.get<SystemOutput>();
    utf8_length(o.target_text);
    if (auto v = validate_output(o); !v.empty()) {
      throw IngestError(source, line, format_violations(v));
    }
    if (!seen.emplace(o.system_id, o.seg_id, o.is_perturbed).second) {
      throw IngestError(source, line,
                        fmt::format("duplicate output ({}, {})", o.system_id, o.seg_id));
    }
    outputs.push_back(std::move(o));
  });
  return outputs;
}

std::vector<SegmentAnnotation> parse_annotations(std::istream& in,
                                                 const std::string& source) {
  std::vector<SegmentAnnotation> out;
  for_each_record(in, source,
                  [&](const json& j, int) { out.push_back(j.get<SegmentAnnotation>()); });
  return out;
}

std::vector<Perturbation> parse_perturbations(std::istream& in,
                                              const std::string& source) {
  std::vector<Perturbation> out;
  for_each_record(in, source,
                  [&](const json& j, int) { out.push_back(j.get<Perturbation>()); });
  return out;
}

std::vector<Document> read_documents(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_documents(in, path.string());
}

std::vector<SystemOutput> read_outputs(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_outputs(in, path.string());
}

std::vector<SegmentAnnotation> read_annotations(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_annotations(in, path.string());
}

std::vector<Perturbation> read_perturbations(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_perturbations(in, path.string());
}

std::string write_documents(const std::vector<Document>& documents) {
  std::string out;
  for (const auto& d : documents) {
    for (const auto& s : d.segments) {
      json j{{"schema_version", kSchemaVersion},
             {"doc_id", d.doc_id},
             {"seg_id", s.seg_id},
             {"text", s.source_text}};
      if (!d.domain_tag.empty()) j["domain"] = d.domain_tag;
      out += j.dump();
      out += '\n';
    }
  }
  return out;
}

std::string write_outputs(const std::vector<SystemOutput>& outputs) {
  std::string out;
  for (const auto& o : outputs) {
    json j = o;
    j["schema_version"] = kSchemaVersion;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string write_annotations(const std::vector<SegmentAnnotation>& annotations) {
  std::string out;
  for (const auto& a : annotations) {
    out += annotation_to_line(a);
    out += '\n';
  }
  return out;
}

std::string write_perturbations(const std::vector<Perturbation>& perturbations) {
  std::string out;
  for (const auto& p : perturbations) {
    json j = p;
    j["schema_version"] = kSchemaVersion;
    out += j.dump();
    out += '\n';
  }
  return out;
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  auto in = open_input(path);
  DatasetManifest m;
  try {
    const json j = json::parse(in);
    require_schema_version(j);
    const auto base = path.parent_path();
    auto resolve = [&](const std::string& p) {
      const std::filesystem::path fp(p);
      return fp.is_absolute() ? fp : base / fp;
    };
    m.language_pair = j.value("language_pair", std::string{});
    m.documents = resolve(j.at("documents").get<std::string>());
    for (const auto& f : j.at("system_outputs")) {
      m.system_outputs.push_back(resolve(f.get<std::string>()));
    }
    for (const auto& a : j.value("annotations", json::array())) {
      m.annotations.push_back({a.at("name").get<std::string>(),
                               parse_protocol(a.at("protocol").get<std::string>()),
                               resolve(a.at("path").get<std::string>())});
    }
  } catch (const IngestError&) {
    throw;
  } catch (const std::exception& e) {
    throw IngestError(path.string(), 0, e.what());
  }
  return m;
}

std::vector<std::string> Dataset::system_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, count] : coverage) ids.push_back(id);
  return ids;
}

const SystemOutput* Dataset::find_output(const std::string& system_id,
                                         const std::string& seg_id,
                                         bool perturbed) const {
  for (const auto& o : outputs) {
    if (o.system_id == system_id && o.seg_id == seg_id && o.is_perturbed == perturbed) {
      return &o;
    }
  }
  return nullptr;
}

void check_coverage(const std::vector<Document>& documents,
                    const std::vector<SystemOutput>& outputs) {
  std::vector<std::string> segs;
  std::set<std::string> known;
  for (const auto& d : documents) {
    for (const auto& s : d.segments) {
      segs.push_back(s.seg_id);
      known.insert(s.seg_id);
    }
  }
  std::set<Cell> have;
  std::set<std::string> systems;
  std::vector<Cell> unknown;
  for (const auto& o : outputs) {
    if (o.is_perturbed) continue;
    systems.insert(o.system_id);
    have.emplace(o.system_id, o.seg_id);
    if (!known.contains(o.seg_id)) unknown.emplace_back(o.system_id, o.seg_id);
  }
  std::vector<Cell> missing;
  for (const auto& sys : systems) {
    for (const auto& seg : segs) {
      if (!have.contains({sys, seg})) missing.emplace_back(sys, seg);
    }
  }
  if (!missing.empty() || !unknown.empty()) {
    throw CoverageError(std::move(missing), std::move(unknown));
  }
}

Dataset load_dataset(const DatasetManifest& manifest) {
  Dataset d;
  d.language_pair = manifest.language_pair;
  d.documents = read_documents(manifest.documents);
  std::set<std::tuple<std::string, std::string, bool>> seen;
  for (const auto& path : manifest.system_outputs) {
    for (auto& o : read_outputs(path)) {
      if (!seen.emplace(o.system_id, o.seg_id, o.is_perturbed).second) {
        throw IngestError(path.string(), 0,
                          fmt::format("duplicate output ({}, {})", o.system_id, o.seg_id));
      }
      d.outputs.push_back(std::move(o));
    }
  }
  check_coverage(d.documents, d.outputs);
  for (const auto& o : d.outputs) {
    if (!o.is_perturbed) ++d.coverage[o.system_id];
  }
  return d;
}

Dataset load_dataset(const std::filesystem::path& manifest_path) {
  return load_dataset(read_manifest(manifest_path));
}

std::vector<Document> subsample_documents(const std::vector<Document>& documents,
                                          int target_segments, std::uint64_t seed) {
  int total = 0;
  for (const auto& d : documents) total += d.segment_count();
  if (target_segments > total) {
    throw std::invalid_argument(fmt::format(
        "target of {} segments unreachable ({} available)", target_segments, total));
  }
  std::vector<std::size_t> order(documents.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<bool> chosen(documents.size(), false);
  int covered = 0;
  for (std::size_t idx : order) {
    if (covered >= target_segments) break;
    chosen[idx] = true;
    covered += documents[idx].segment_count();
  }
  std::vector<Document> out;
  for (std::size_t i = 0; i < documents.size(); ++i) {
    if (chosen[i]) out.push_back(documents[i]);
  }
  return out;
}

std::vector<Cell> intersect_segments(
    const std::vector<std::vector<SegmentAnnotation>>& sets) {
  if (sets.size() < 2) {
    throw std::invalid_argument("intersect_segments needs at least two sets");
  }
  auto cells_of = [](const std::vector<SegmentAnnotation>& set) {
    std::set<Cell> cells;
    for (const auto& a : set) {
      if (!a.is_perturbed) cells.emplace(a.system_id, a.seg_id);
    }
    return cells;
  };
  std::set<Cell> common = cells_of(sets[0]);
  for (std::size_t i = 1; i < sets.size(); ++i) {
    const std::set<Cell> next = cells_of(sets[i]);
    std::set<Cell> kept;
    std::set_intersection(common.begin(), common.end(), next.begin(), next.end(),
                          std::inserter(kept, kept.begin()));
    common = std::move(kept);
  }
  if (common.empty()) {
    throw std::invalid_argument("annotation sets share no (system, segment) cell");
  }
  return {common.begin(), common.end()};
}

std::vector<SegmentAnnotation> restrict_to_cells(
    const std::vector<SegmentAnnotation>& annotations, const std::vector<Cell>& cells) {
  const std::set<Cell> keep(cells.begin(), cells.end());
  std::vector<SegmentAnnotation> out;
  for (const auto& a : annotations) {
    if (!a.is_perturbed && keep.contains({a.system_id, a.seg_id})) out.push_back(a);
  }
  return out;
}

std::vector<std::string> complete_segments(const std::vector<Cell>& cells) {
  std::set<std::string> systems;
  std::map<std::string, std::set<std::string>> by_seg;
  for (const auto& [sys, seg] : cells) {
    systems.insert(sys);
    by_seg[seg].insert(sys);
  }
  std::vector<std::string> out;
  for (const auto& [seg, sys] : by_seg) {
    if (sys.size() == systems.size()) out.push_back(seg);
  }
  return out;
}

// --- WMT MQM TSV -----------------------------------------------------------

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

struct Marked {
  std::string text;                  // markup removed
  std::optional<CharInterval> span;  // code points in `text`
};

Marked strip_markup(const std::string& raw) {
  static constexpr std::string_view kOpen = "<v>", kClose = "</v>";
  Marked m;
  const std::size_t open = raw.find(kOpen);
  if (open == std::string::npos) {
    m.text = raw;
    return m;
  }
  const std::size_t close = raw.find(kClose, open + kOpen.size());
  const std::string before = raw.substr(0, open);
  const std::string inside =
      raw.substr(open + kOpen.size(),
                 close == std::string::npos ? std::string::npos
                                            : close - open - kOpen.size());
  const std::string after =
      close == std::string::npos ? "" : raw.substr(close + kClose.size());
  m.text = before + inside + after;
  const std::int64_t s = utf8_length(before);
  m.span = CharInterval{s, s + utf8_length(inside)};
  return m;
}

}  // namespace

ExternalAnnotations parse_wmt_mqm_tsv(std::istream& in, const std::string& source) {
  ExternalAnnotations out;
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> index;
  std::set<Cell> output_seen;
  std::string line;
  int number = 0;
  int neutral = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = split_tabs(line);
    if (number == 1 && !cols.empty() && cols[0] == "system") continue;
    if (cols.size() < 9) {
      throw IngestError(source, number,
                        fmt::format("expected 9 tab-separated columns, got {}", cols.size()));
    }
    const std::string& system = cols[0];
    const std::string& seg_id = cols[3];
    const std::string& rater = cols[4];
    const std::string& category = cols[7];
    const std::string& severity = cols[8];

    Marked target;
    Marked src;
    try {
      target = strip_markup(cols[6]);
      src = strip_markup(cols[5]);
    } catch (const std::exception& e) {
      throw IngestError(source, number, e.what());
    }
    if (output_seen.emplace(system, seg_id).second) {
      out.outputs.push_back({system, seg_id, target.text, false, std::nullopt});
    }

    const auto key = std::make_tuple(rater, system, seg_id);
    auto [it, inserted] = index.try_emplace(key, out.annotations.size());
    if (inserted) {
      SegmentAnnotation a;
      a.annotator_id = rater;
      a.system_id = system;
      a.seg_id = seg_id;
      a.protocol = Protocol::kMqm;
      out.annotations.push_back(std::move(a));
    }
    SegmentAnnotation& a = out.annotations[it->second];

    std::string sev_lower = severity;
    std::transform(sev_lower.begin(), sev_lower.end(), sev_lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (sev_lower == "no-error" || category == "No-error") continue;
    if (sev_lower == "neutral") {
      ++neutral;
      continue;
    }
    if (sev_lower != "major" && sev_lower != "minor") {
      out.warnings.push_back(
          fmt::format("{}:{}: unknown severity '{}' skipped", source, number, severity));
      continue;
    }
    ErrorSpan span;
    span.severity = parse_severity(sev_lower);
    span.category = category;
    if (target.span && target.span->length() > 0) {
      span.start = target.span->start;
      span.end = target.span->end;
    } else if (src.span) {
      const CharInterval sentinel = sentinel_interval(utf8_length(target.text));
      span.start = sentinel.start;
      span.end = sentinel.end;
      span.is_missing = true;
    } else {
      out.warnings.push_back(
          fmt::format("{}:{}: error row without a marked span skipped", source, number));
      continue;
    }
    a.spans.push_back(std::move(span));
  }
  if (neutral > 0) {
    out.warnings.push_back(fmt::format("{} neutral-severity rows dropped", neutral));
  }
  return out;
}

}  // namespace esa::ingest
