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

// Readers and writers for the canonical JSONL files (see docs/formats.md)
// and adapters for externally collected annotations.

#ifndef ESA_INGEST_HPP_
#define ESA_INGEST_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "esa/model.hpp"
#include "esa/qc.hpp"

namespace esa::ingest {

class IngestError : public std::runtime_error {
 public:
  IngestError(std::string source, int line, const std::string& message);
  const std::string& source() const { return source_; }
  int line() const { return line_; }

 private:
  std::string source_;
  int line_;
};

using Cell = std::pair<std::string, std::string>;  // (system_id, seg_id)

class CoverageError : public std::runtime_error {
 public:
  explicit CoverageError(std::vector<Cell> missing,
                         std::vector<Cell> unknown = {});
  const std::vector<Cell>& missing() const { return missing_; }
  const std::vector<Cell>& unknown() const { return unknown_; }

 private:
  std::vector<Cell> missing_;
  std::vector<Cell> unknown_;
};

// `source` names the stream in error messages.
std::vector<Document> parse_documents(std::istream& in, const std::string& source);
std::vector<SystemOutput> parse_outputs(std::istream& in, const std::string& source);
std::vector<SegmentAnnotation> parse_annotations(std::istream& in,
                                                 const std::string& source);
std::vector<Perturbation> parse_perturbations(std::istream& in,
                                              const std::string& source);

std::vector<Document> read_documents(const std::filesystem::path& path);
std::vector<SystemOutput> read_outputs(const std::filesystem::path& path);
std::vector<SegmentAnnotation> read_annotations(const std::filesystem::path& path);
std::vector<Perturbation> read_perturbations(const std::filesystem::path& path);

std::string write_documents(const std::vector<Document>& documents);
std::string write_outputs(const std::vector<SystemOutput>& outputs);
std::string write_annotations(const std::vector<SegmentAnnotation>& annotations);
std::string write_perturbations(const std::vector<Perturbation>& perturbations);

struct AnnotationFile {
  std::string name;
  Protocol protocol = Protocol::kEsa;
  std::filesystem::path path;
};

struct DatasetManifest {
  std::string language_pair;
  std::filesystem::path documents;
  std::vector<std::filesystem::path> system_outputs;
  std::vector<AnnotationFile> annotations;
};

// Relative paths are resolved against the manifest's directory.
DatasetManifest read_manifest(const std::filesystem::path& path);

struct Dataset {
  std::string language_pair;
  std::vector<Document> documents;
  std::vector<SystemOutput> outputs;
  // system_id -> number of segments covered
  std::map<std::string, int> coverage;

  std::vector<std::string> system_ids() const;
  const SystemOutput* find_output(const std::string& system_id,
                                  const std::string& seg_id,
                                  bool perturbed = false) const;
};

// Throws CoverageError when some system lacks a segment or has outputs for
// unknown segments.
void check_coverage(const std::vector<Document>& documents,
                    const std::vector<SystemOutput>& outputs);

Dataset load_dataset(const DatasetManifest& manifest);
Dataset load_dataset(const std::filesystem::path& manifest_path);

// Whole documents in seeded random order, taken until at least
// `target_segments` are covered; returned in input order.
std::vector<Document> subsample_documents(const std::vector<Document>& documents,
                                          int target_segments, std::uint64_t seed);

// (system, segment) cells annotated in every set, sorted. Needs at least two
// sets; throws std::invalid_argument on an empty intersection.
std::vector<Cell> intersect_segments(
    const std::vector<std::vector<SegmentAnnotation>>& sets);

std::vector<SegmentAnnotation> restrict_to_cells(
    const std::vector<SegmentAnnotation>& annotations, const std::vector<Cell>& cells);

// Segments that every system in `cells` has.
std::vector<std::string> complete_segments(const std::vector<Cell>& cells);

// --- External formats -------------------------------------------------------

struct ExternalAnnotations {
  std::vector<SegmentAnnotation> annotations;
  std::vector<SystemOutput> outputs;
  std::vector<std::string> warnings;
};

// Tab-separated MQM rating files as published for the WMT general task
// (columns: system, doc, doc_id, seg_id, rater, source, target, category,
// severity; one row per error, spans delimited by <v>...</v>). Errors marked
// in the source become MISSING spans. Neutral-severity rows are dropped.
ExternalAnnotations parse_wmt_mqm_tsv(std::istream& in, const std::string& source);

}  // namespace esa::ingest

#endif  // ESA_INGEST_HPP_
