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

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <sstream>

#include "esa/json_io.hpp"
#include "test_util.hpp"

namespace esa::ingest {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;
using ::testing::Pair;
using testing::ann;
using testing::major;
using testing::TempDir;
using testing::write_text;

const char* kDocs =
    R"({"schema_version":1,"doc_id":"d1","seg_id":"a","text":"Eins zwei.","domain":"news"}
{"schema_version":1,"doc_id":"d1","seg_id":"b","text":"Drei."}
{"schema_version":1,"doc_id":"d2","seg_id":"c","text":"Vier fünf sechs."}
)";

std::string output_line(const std::string& sys, const std::string& seg, const std::string& text) {
  return nlohmann::json{{"schema_version", 1}, {"system_id", sys}, {"seg_id", seg}, {"text", text}}
             .dump() +
         "\n";
}

template <typename F>
std::string error_of(F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

TEST(Documents, GroupsSegmentsAndCountsTokens) {
  std::istringstream in(kDocs);
  const auto docs = parse_documents(in, "docs.jsonl");
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[0].doc_id, "d1");
  EXPECT_EQ(docs[0].domain_tag, "news");
  EXPECT_EQ(docs[0].segment_count(), 2);
  EXPECT_EQ(docs[1].segments[0].token_count, 3);
  std::istringstream again(write_documents(docs));
  EXPECT_EQ(parse_documents(again, "x"), docs);
}

TEST(Documents, RejectsDuplicatesAndSplitDocuments) {
  std::istringstream dup(std::string(kDocs) +
                         R"({"schema_version":1,"doc_id":"d2","seg_id":"a","text":"x"})");
  EXPECT_THAT(error_of([&] { parse_documents(dup, "docs.jsonl"); }),
              HasSubstr("docs.jsonl:4: duplicate seg_id 'a'"));
  std::istringstream split(std::string(kDocs) +
                           R"({"schema_version":1,"doc_id":"d1","seg_id":"z","text":"x"})");
  EXPECT_THROW(parse_documents(split, "docs.jsonl"), IngestError);
}

TEST(Records, SchemaVersionAndSyntaxErrorsCarryLineNumbers) {
  std::istringstream missing(R"({"doc_id":"d","seg_id":"a","text":"x"})");
  try {
    parse_documents(missing, "f.jsonl");
    FAIL();
  } catch (const IngestError& e) {
    EXPECT_EQ(e.source(), "f.jsonl");
    EXPECT_EQ(e.line(), 1);
  }
  std::istringstream wrong(output_line("m", "a", "x") +
                           R"({"schema_version":2,"system_id":"m","seg_id":"b","text":"y"})");
  EXPECT_THAT(error_of([&] { parse_outputs(wrong, "o.jsonl"); }), HasSubstr("o.jsonl:2"));
  std::istringstream broken("{not json\n");
  EXPECT_THROW(parse_outputs(broken, "o.jsonl"), IngestError);
}

TEST(Outputs, RejectsDuplicateCells) {
  std::istringstream in(output_line("m", "a", "x") + output_line("m", "a", "y"));
  EXPECT_THAT(error_of([&] { parse_outputs(in, "o"); }), HasSubstr("duplicate output (m, a)"));
}

TEST(Annotations, RoundTrip) {
  SegmentAnnotation a = ann("r", "m", "a", 55.5, {major(0, 3)});
  a.started_at_ms = 10;
  a.submitted_at_ms = 20;
  a.duration_s = 0.01;
  const SegmentAnnotation b = ann("q", "m", "b", std::nullopt, {}, Protocol::kMqm);
  std::istringstream in(write_annotations({a, b}));
  EXPECT_THAT(parse_annotations(in, "a"), ElementsAre(a, b));
}

TEST(Perturbations, RoundTrip) {
  Perturbation p{"a", "m", "a b c", "a w c", {2, 3}, {2, 3}, 1, 99};
  std::istringstream in(write_perturbations({p}));
  EXPECT_THAT(parse_perturbations(in, "p"), ElementsAre(p));
}

class DatasetFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    write_text(dir.path() / "docs.jsonl", kDocs);
    write_text(dir.path() / "out" / "m1.jsonl",
               output_line("m1", "a", "One two.") + output_line("m1", "b", "Three.") +
                   output_line("m1", "c", "Four five six."));
    write_text(dir.path() / "out" / "m2.jsonl",
               output_line("m2", "a", "One 2.") + output_line("m2", "b", "3.") +
                   output_line("m2", "c", "Four, five, six."));
    write_manifest(R"(["out/m1.jsonl", "out/m2.jsonl"])");
  }
  void write_manifest(const std::string& outputs) {
    write_text(dir.path() / "manifest.json",
               R"({"schema_version":1,"language_pair":"de-en","documents":"docs.jsonl",)"
               R"("system_outputs":)" + outputs +
                   R"(,"annotations":[{"name":"esa","protocol":"esa","path":"esa.jsonl"}]})");
  }
  TempDir dir;
};

TEST_F(DatasetFiles, LoadsWithCoverage) {
  const DatasetManifest m = read_manifest(dir.path() / "manifest.json");
  EXPECT_EQ(m.language_pair, "de-en");
  ASSERT_EQ(m.annotations.size(), 1u);
  EXPECT_EQ(m.annotations[0].path, dir.path() / "esa.jsonl");
  const Dataset d = load_dataset(dir.path() / "manifest.json");
  EXPECT_THAT(d.system_ids(), ElementsAre("m1", "m2"));
  EXPECT_THAT(d.coverage, ElementsAre(Pair("m1", 3), Pair("m2", 3)));
  ASSERT_NE(d.find_output("m2", "b"), nullptr);
  EXPECT_EQ(d.find_output("m2", "b")->target_text, "3.");
  EXPECT_EQ(d.find_output("m2", "b", true), nullptr);
}

TEST_F(DatasetFiles, MissingSegmentIsReported) {
  write_text(dir.path() / "out" / "m2.jsonl",
             output_line("m2", "a", "One 2.") + output_line("m2", "zz", "3."));
  try {
    load_dataset(dir.path() / "manifest.json");
    FAIL();
  } catch (const CoverageError& e) {
    EXPECT_THAT(e.missing(), ElementsAre(Pair("m2", "b"), Pair("m2", "c")));
    EXPECT_THAT(e.unknown(), ElementsAre(Pair("m2", "zz")));
  }
}

TEST_F(DatasetFiles, DuplicateAcrossFilesIsRejected) {
  write_manifest(R"(["out/m1.jsonl", "out/m1.jsonl"])");
  EXPECT_THROW(load_dataset(dir.path() / "manifest.json"), IngestError);
}

TEST(Files, UnreadableFileNamesThePath) {
  EXPECT_THAT(error_of([] { read_documents("/nonexistent/docs.jsonl"); }),
              HasSubstr("/nonexistent/docs.jsonl"));
}

std::vector<Document> sized_docs(const std::vector<int>& sizes) {
  std::vector<Document> docs;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    Document d{"d" + std::to_string(i), "", {}};
    for (int k = 0; k < sizes[i]; ++k) {
      d.segments.push_back(make_segment("d" + std::to_string(i) + "s" + std::to_string(k), "x"));
    }
    docs.push_back(d);
  }
  return docs;
}

TEST(Subsample, WholeDocumentsUntilTarget) {
  const auto docs = sized_docs({5, 3, 8, 2, 6, 4});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto picked = subsample_documents(docs, 10, seed);
    int total = 0;
    for (const auto& d : picked) total += d.segment_count();
    EXPECT_GE(total, 10);
    // Dropping the last document taken would fall short of the target.
    int smallest = 100;
    for (const auto& d : picked) smallest = std::min(smallest, d.segment_count());
    EXPECT_LT(total - smallest, 10 + 8);
    for (std::size_t i = 1; i < picked.size(); ++i) EXPECT_LT(picked[i - 1].doc_id, picked[i].doc_id);
    EXPECT_EQ(picked, subsample_documents(docs, 10, seed));
  }
  EXPECT_EQ(subsample_documents(docs, 28, 1).size(), 6u);
  EXPECT_THROW(subsample_documents(docs, 29, 1), std::invalid_argument);
}

TEST(Intersect, CommonCellsOnly) {
  const std::vector<SegmentAnnotation> esa = {ann("r", "m", "a", 1), ann("r", "m", "b", 1),
                                             ann("r", "n", "a", 1)};
  SegmentAnnotation check = ann("r", "n", "b", 1);
  check.is_perturbed = true;
  const std::vector<SegmentAnnotation> mqm = {
      ann("q", "m", "a", std::nullopt, {}, Protocol::kMqm),
      ann("q", "n", "a", std::nullopt, {}, Protocol::kMqm),
      ann("q", "n", "b", std::nullopt, {}, Protocol::kMqm)};
  auto with_check = esa;
  with_check.push_back(check);
  const auto cells = intersect_segments({with_check, mqm});
  EXPECT_THAT(cells, ElementsAre(Pair("m", "a"), Pair("n", "a")));
  EXPECT_EQ(restrict_to_cells(esa, cells).size(), 2u);
  EXPECT_THAT(complete_segments({{"m", "a"}, {"m", "b"}, {"n", "a"}}), ElementsAre("a"));
  EXPECT_THROW(intersect_segments({esa}), std::invalid_argument);
  EXPECT_THROW(intersect_segments({{ann("r", "m", "a", 1)}, {ann("r", "m", "z", 1)}}),
               std::invalid_argument);
}

TEST(WmtMqm, ParsesSpansMissingAndNoError) {
  const std::string tsv =
      "system\tdoc\tdoc_id\tseg_id\trater\tsource\ttarget\tcategory\tseverity\n"
      "sysA\tdoc1\t1\t1\trater1\tDer Hund bellt.\tThe <v>dog</v> barks.\tAccuracy/Mistranslation\tMajor\n"
      "sysA\tdoc1\t1\t1\trater1\tDer Hund bellt.\tThe dog <v>barks</v>.\tFluency/Grammar\tMinor\n"
      "sysA\tdoc1\t1\t2\trater1\tDer <v>kleine</v> Hund.\tThe dog.\tAccuracy/Omission\tMajor\n"
      "sysA\tdoc1\t1\t3\trater1\tGut.\tGood.\tNo-error\tno-error\n"
      "sysA\tdoc1\t1\t3\trater2\tGut.\tGood.\tStyle/Awkward\tNeutral\n"
      "sysA\tdoc1\t1\t3\trater2\tGut.\t<v>Good</v>.\tStyle/Awkward\tMinor\n"
      "sysA\tdoc1\t1\t3\trater2\tGut.\tGood.\tStyle/Awkward\tMinor\n";
  std::istringstream in(tsv);
  const ExternalAnnotations x = parse_wmt_mqm_tsv(in, "mqm.tsv");
  ASSERT_EQ(x.annotations.size(), 4u);
  const auto& first = x.annotations[0];
  EXPECT_EQ(first.protocol, Protocol::kMqm);
  ASSERT_EQ(first.spans.size(), 2u);
  EXPECT_EQ(first.spans[0].interval(), (CharInterval{4, 7}));
  EXPECT_EQ(first.spans[0].severity, Severity::kMajor);
  EXPECT_EQ(first.spans[0].category, "Accuracy/Mistranslation");
  EXPECT_EQ(first.spans[1].interval(), (CharInterval{8, 13}));
  const auto& omission = x.annotations[1];
  ASSERT_EQ(omission.spans.size(), 1u);
  EXPECT_TRUE(omission.spans[0].is_missing);
  EXPECT_EQ(omission.spans[0].interval(), sentinel_interval(8));
  EXPECT_TRUE(x.annotations[2].spans.empty());
  EXPECT_EQ(x.annotations[3].annotator_id, "rater2");
  ASSERT_EQ(x.annotations[3].spans.size(), 1u);
  EXPECT_EQ(x.annotations[3].spans[0].interval(), (CharInterval{0, 4}));
  ASSERT_EQ(x.outputs.size(), 3u);
  EXPECT_EQ(x.outputs[0].target_text, "The dog barks.");
  EXPECT_THAT(x.warnings, ElementsAre(HasSubstr("mqm.tsv:8: error row without a marked span"),
                                      HasSubstr("1 neutral")));
  for (std::size_t i = 0; i < 3; ++i) {
    const SystemOutput* o = &x.outputs[i < 2 ? i : 2];
    EXPECT_TRUE(validate_annotation(x.annotations[i], *o).empty());
  }
}

TEST(WmtMqm, ShortRowIsAnError) {
  std::istringstream in("a\tb\tc\n");
  EXPECT_THAT(error_of([&] { parse_wmt_mqm_tsv(in, "mqm.tsv"); }), HasSubstr("mqm.tsv:1"));
}

}  // namespace
}  // namespace esa::ingest
