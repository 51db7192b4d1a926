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

#include "esa/report.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "esa/correlation.hpp"
#include "esa/csv.hpp"
#include "esa/features.hpp"
#include "esa/json_io.hpp"

namespace esa::report {

using nlohmann::json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path fp(p);
  return fp.is_absolute() || base.empty() ? fp : base / fp;
}

}  // namespace

ReportConfig apply_config(ReportConfig c, const json& j, const std::filesystem::path& dir) {
  static const std::set<std::string> kKeys = {
      "dataset",  "annotations", "reference", "perturbations", "protocol",
      "kind",     "reference_kind", "weights", "alpha",      "test",
      "seed",     "clip",        "bin_width", "subset_sizes",  "resamples",
      "cap_s",    "window",      "pairing",   "direction",     "minor_weight",
      "grid",     "out"};
  if (!j.is_object()) throw ReportError("config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.contains(key)) throw ReportError(fmt::format("unknown config key '{}'", key));
  }
  if (j.contains("dataset")) c.dataset = resolve(dir, j.at("dataset").get<std::string>());
  if (j.contains("annotations")) {
    c.annotations.clear();
    const auto& a = j.at("annotations");
    if (a.is_string()) {
      c.annotations.push_back(resolve(dir, a.get<std::string>()));
    } else {
      for (const auto& p : a) c.annotations.push_back(resolve(dir, p.get<std::string>()));
    }
  }
  if (j.contains("reference")) c.reference = resolve(dir, j.at("reference").get<std::string>());
  if (j.contains("perturbations")) {
    c.perturbations = resolve(dir, j.at("perturbations").get<std::string>());
  }
  if (j.contains("protocol")) c.protocol = parse_protocol(j.at("protocol").get<std::string>());
  if (j.contains("kind")) c.kind = parse_score_kind(j.at("kind").get<std::string>());
  if (j.contains("reference_kind")) {
    c.reference_kind = parse_score_kind(j.at("reference_kind").get<std::string>());
  }
  if (j.contains("weights")) {
    c.weights.minor = j.at("weights").value("minor", c.weights.minor);
    c.weights.major = j.at("weights").value("major", c.weights.major);
  }
  c.alpha = j.value("alpha", c.alpha);
  if (j.contains("test")) c.test = stats::parse_cluster_test(j.at("test").get<std::string>());
  c.seed = j.value("seed", c.seed);
  if (j.contains("clip")) c.clip = j.at("clip").get<double>();
  if (j.contains("bin_width")) c.bin_width = j.at("bin_width").get<double>();
  if (j.contains("subset_sizes")) {
    c.subset_sizes = j.at("subset_sizes").get<std::vector<std::size_t>>();
  }
  c.resamples = j.value("resamples", c.resamples);
  c.cap_s = j.value("cap_s", c.cap_s);
  c.window = j.value("window", c.window);
  if (j.contains("pairing")) {
    const auto p = j.at("pairing").get<std::string>();
    if (p == "same-annotator") {
      c.pairing = CellPairing::kSameAnnotator;
    } else if (p == "any") {
      c.pairing = CellPairing::kAnyAnnotator;
    } else {
      throw ReportError(fmt::format("unknown pairing '{}'", p));
    }
  }
  if (j.contains("direction")) {
    const auto d = j.at("direction").get<std::string>();
    if (d == "first") {
      c.direction = RecallDirection::kGivenFirst;
    } else if (d == "second") {
      c.direction = RecallDirection::kGivenSecond;
    } else {
      throw ReportError(fmt::format("unknown recall direction '{}'", d));
    }
  }
  c.minor_weight = j.value("minor_weight", c.minor_weight);
  if (j.contains("grid")) {
    c.grid.lo = j.at("grid").value("lo", c.grid.lo);
    c.grid.hi = j.at("grid").value("hi", c.grid.hi);
    c.grid.step = j.at("grid").value("step", c.grid.step);
  }
  if (j.contains("out")) c.out = resolve(dir, j.at("out").get<std::string>());
  return c;
}

namespace {

AnnotationSet read_set(const std::filesystem::path& path,
                       const std::optional<Protocol>& protocol) {
  AnnotationSet s{path.stem().string(), ingest::read_annotations(path)};
  if (protocol) {
    std::erase_if(s.annotations,
                  [&](const SegmentAnnotation& a) { return a.protocol != *protocol; });
  }
  return s;
}

}  // namespace

Inputs load_inputs(const ReportConfig& c) {
  Inputs in;
  if (c.dataset) in.dataset = ingest::load_dataset(*c.dataset);
  for (const auto& p : c.annotations) in.sets.push_back(read_set(p, c.protocol));
  if (c.reference) in.reference = read_set(*c.reference, std::nullopt);
  if (c.perturbations) in.perturbations = ingest::read_perturbations(*c.perturbations);
  return in;
}

namespace {

std::vector<SegmentAnnotation> regular(const std::vector<SegmentAnnotation>& all) {
  std::vector<SegmentAnnotation> out;
  for (const auto& a : all) {
    if (!a.is_perturbed) out.push_back(a);
  }
  return out;
}

ScoreKind infer_kind(const std::vector<SegmentAnnotation>& anns,
                     const std::optional<ScoreKind>& requested) {
  if (requested) return *requested;
  const bool all_scored = !anns.empty() && std::all_of(anns.begin(), anns.end(),
                                                       [](const SegmentAnnotation& a) {
                                                         return a.direct_score.has_value();
                                                       });
  return all_scored ? ScoreKind::kDirect : ScoreKind::kSpanBased;
}

const AnnotationSet& first_set(const Inputs& in, const char* command) {
  if (in.sets.empty()) {
    throw ReportError(fmt::format("{} needs at least one annotation file", command));
  }
  return in.sets.front();
}

struct Lengths {
  std::optional<TextLengths> value;
  const TextLengths* get() const { return value ? &*value : nullptr; }
};

Lengths lengths_of(const Inputs& in) {
  Lengths l;
  if (in.dataset) l.value = TextLengths::from(in.dataset->documents, in.dataset->outputs);
  return l;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json weights_json(const SeverityWeights& w) {
  return json{{"minor", w.minor}, {"major", w.major}};
}

}  // namespace

Artifacts cmd_rank(const Inputs& in, const ReportConfig& c) {
  const AnnotationSet& set = first_set(in, "rank");
  std::vector<SegmentAnnotation> cand = regular(set.annotations);
  std::optional<std::vector<SegmentAnnotation>> ref;
  if (in.reference) {
    ref = regular(in.reference->annotations);
    const auto cells = ingest::intersect_segments({cand, *ref});
    cand = ingest::restrict_to_cells(cand, cells);
    *ref = ingest::restrict_to_cells(*ref, cells);
  }
  if (cand.empty()) throw ReportError("rank: no annotations to score");
  const Lengths lengths = lengths_of(in);
  const ScoreKind kind = infer_kind(cand, c.kind);
  ScoreOptions opts{kind, c.weights, lengths.get(), std::nullopt};
  const SystemScoreTable table = system_scores(cand, opts);
  const stats::Ranking ranking =
      stats::cluster_systems(table.systems, {c.alpha, c.test});

  json systems = json::array();
  for (std::size_t i = 0; i < ranking.systems.size(); ++i) {
    const auto& s = ranking.systems[i];
    systems.push_back(
        {{"rank", i + 1}, {"system_id", s.system_id}, {"mean", s.mean}, {"cluster", s.cluster}});
  }
  json report{{"schema", "esa.rank.v1"},
              {"annotations", set.name},
              {"kind", to_string(kind)},
              {"weights", weights_json(c.weights)},
              {"alpha", c.alpha},
              {"test", to_string(c.test)},
              {"segment_count", table.segment_ids.size()},
              {"systems", systems},
              {"cluster_count", ranking.cluster_count()},
              {"reference", nullptr}};

  std::optional<SystemScoreTable> ref_table;
  if (ref) {
    const ScoreKind rkind = infer_kind(*ref, c.reference_kind);
    ref_table = system_scores(*ref, {rkind, c.weights, lengths.get(), std::nullopt});
    std::vector<double> x, y;
    for (const auto& s : table.systems) {
      x.push_back(s.mean);
      y.push_back(ref_table->find(s.system_id)->mean);
    }
    json r{{"annotations", in.reference->name}, {"kind", to_string(rkind)}};
    r["spearman"] = opt(stats::spearman(x, y));
    r["pearson"] = opt(stats::pearson(x, y));
    if (table.systems.size() >= 2) {
      const auto pa = stats::pairwise_agreement(table.systems, ref_table->systems);
      r["pairwise_accuracy"] = pa.accuracy();
      r["agreement_half_points"] = pa.half_points;
      r["pairs"] = pa.pairs;
    } else {
      r["pairwise_accuracy"] = nullptr;
      r["agreement_half_points"] = 0;
      r["pairs"] = 0;
    }
    report["reference"] = r;
  }

  CsvWriter rank_csv("rank", {"rank", "system_id", "mean", "cluster", "reference_mean"});
  for (std::size_t i = 0; i < ranking.systems.size(); ++i) {
    const auto& s = ranking.systems[i];
    rank_csv.row({std::to_string(i + 1), s.system_id, csv_number(s.mean),
                  std::to_string(s.cluster),
                  ref_table ? csv_number(ref_table->find(s.system_id)->mean) : ""});
  }
  CsvWriter scores_csv("scores", {"system_id", "seg_id", "annotator_id", "kind", "value"});
  std::vector<SegmentScore> seg_scores;
  for (const auto& a : cand) seg_scores.push_back(segment_score(a, kind, c.weights, lengths.get()));
  std::stable_sort(seg_scores.begin(), seg_scores.end(),
                   [](const SegmentScore& a, const SegmentScore& b) {
                     return std::tie(a.system_id, a.seg_id, a.annotator_id) <
                            std::tie(b.system_id, b.seg_id, b.annotator_id);
                   });
  for (const auto& s : seg_scores) {
    scores_csv.row({s.system_id, s.seg_id, s.annotator_id, std::string(to_string(s.kind)),
                    csv_number(s.value)});
  }
  return {{"report.json", dump(report)},
          {"ranking.csv", rank_csv.str()},
          {"segment_scores.csv", scores_csv.str()}};
}

Artifacts cmd_agreement(const Inputs& in, const ReportConfig& c) {
  std::vector<AnnotationSet> sets;
  for (const auto& s : in.sets) sets.push_back({s.name, regular(s.annotations)});
  if (in.reference) sets.push_back({in.reference->name, regular(in.reference->annotations)});
  if (sets.size() < 2) throw ReportError("agreement needs at least two annotation sets");
  {
    std::set<std::string> names;
    for (auto& s : sets) {
      std::string name = s.name;
      for (int k = 2; names.contains(name); ++k) name = fmt::format("{}-{}", s.name, k);
      s.name = name;
      names.insert(name);
    }
  }
  std::vector<std::vector<SegmentAnnotation>> raw;
  for (const auto& s : sets) raw.push_back(s.annotations);
  const auto cells = ingest::intersect_segments(raw);
  for (auto& s : sets) s.annotations = ingest::restrict_to_cells(s.annotations, cells);

  const Lengths lengths = lengths_of(in);
  const bool has_reference = in.reference.has_value();
  auto kind_of = [&](std::size_t i) {
    const bool is_ref = has_reference && i + 1 == sets.size();
    return infer_kind(sets[i].annotations, is_ref ? c.reference_kind : c.kind);
  };

  json names = json::array();
  for (const auto& s : sets) names.push_back(s.name);
  json pairs = json::array();
  CsvWriter seg_csv("agreement", {"a", "b", "kind_a", "kind_b", "cells", "kendall_tau_c",
                                  "pearson", "error_recall", "minor_recall", "major_recall"});
  CsvWriter span_csv("span_agreement",
                     {"a", "b", "b_spans", "any", "same_severity", "same_category",
                      "same_severity_and_category", "same_severity_and_subcategory"});
  for (std::size_t i = 1; i < sets.size(); ++i) {
    SegmentAgreementOptions o;
    o.kind = kind_of(0);
    o.second_kind = kind_of(i);
    o.weights = c.weights;
    o.lengths = lengths.get();
    o.pairing = c.pairing;
    o.direction = c.direction;
    const AgreementReport r = segment_agreement(sets[0].annotations, sets[i].annotations, o);

    const auto categorized = [](const std::vector<SegmentAnnotation>& anns) {
      return std::all_of(anns.begin(), anns.end(), [](const SegmentAnnotation& a) {
        return std::all_of(a.spans.begin(), a.spans.end(),
                           [](const ErrorSpan& s) { return s.category.has_value(); });
      });
    };
    const TaxonomyDepth depth =
        categorized(sets[0].annotations) && categorized(sets[i].annotations)
            ? TaxonomyDepth::kSubcategory
            : TaxonomyDepth::kNone;
    const SpanAgreement sa =
        span_agreement_frequencies(sets[0].annotations, sets[i].annotations, depth);

    pairs.push_back({{"a", sets[0].name},
                     {"b", sets[i].name},
                     {"kind_a", to_string(o.kind)},
                     {"kind_b", to_string(*o.second_kind)},
                     {"cells", r.cells},
                     {"kendall_tau_c", opt(r.kendall_tau_c)},
                     {"pearson", opt(r.pearson)},
                     {"error_recall", opt(r.error_recall)},
                     {"minor_recall", opt(r.minor_recall)},
                     {"major_recall", opt(r.major_recall)},
                     {"span_agreement",
                      {{"b_spans", sa.b_spans},
                       {"any", sa.any},
                       {"same_severity", sa.same_severity},
                       {"same_category", opt(sa.same_category)},
                       {"same_severity_and_category", opt(sa.same_severity_and_category)},
                       {"same_severity_and_subcategory",
                        opt(sa.same_severity_and_subcategory)}}}});
    seg_csv.row({sets[0].name, sets[i].name, std::string(to_string(o.kind)),
                 std::string(to_string(*o.second_kind)), std::to_string(r.cells),
                 csv_number(r.kendall_tau_c), csv_number(r.pearson),
                 csv_number(r.error_recall), csv_number(r.minor_recall),
                 csv_number(r.major_recall)});
    span_csv.row({sets[0].name, sets[i].name, std::to_string(sa.b_spans), csv_number(sa.any),
                  csv_number(sa.same_severity), csv_number(sa.same_category),
                  csv_number(sa.same_severity_and_category),
                  csv_number(sa.same_severity_and_subcategory)});
  }

  // coverage[row][col]: share of col's spans that row contains.
  std::vector<std::string> header = {"a_contains_b"};
  for (const auto& s : sets) header.push_back(s.name);
  CsvWriter cov_csv("coverage", header);
  json coverage = json::array();
  for (const auto& row : sets) {
    std::vector<std::string> fields = {row.name};
    json jrow = json::array();
    for (const auto& col : sets) {
      const double v = span_coverage(row.annotations, col.annotations);
      fields.push_back(csv_number(v));
      jrow.push_back(v);
    }
    cov_csv.row(fields);
    coverage.push_back(jrow);
  }

  json report{{"schema", "esa.agreement.v1"},
              {"sets", names},
              {"shared_cells", cells.size()},
              {"pairing", c.pairing == CellPairing::kSameAnnotator ? "same-annotator" : "any"},
              {"recall_given", c.direction == RecallDirection::kGivenFirst ? "first" : "second"},
              {"pairs", pairs},
              {"coverage", coverage}};
  return {{"report.json", dump(report)},
          {"agreement.csv", seg_csv.str()},
          {"span_agreement.csv", span_csv.str()},
          {"coverage.csv", cov_csv.str()}};
}

Artifacts cmd_qc(const Inputs& in, const ReportConfig& c) {
  const AnnotationSet& set = first_set(in, "qc");
  if (in.perturbations.empty()) throw ReportError("qc needs a perturbation manifest");
  const QCReport r = qc_evaluate(set.annotations, in.perturbations, c.weights);
  json report{{"schema", "esa.qc.v1"},
              {"annotations", set.name},
              {"perturbations", in.perturbations.size()},
              {"pairs", r.pairs},
              {"mean_score_original", opt(r.mean_score_original)},
              {"mean_score_perturbed", opt(r.mean_score_perturbed)},
              {"mean_spans_original", opt(r.mean_spans_original)},
              {"mean_spans_perturbed", opt(r.mean_spans_perturbed)},
              {"ok_score_pct", opt(r.ok_score_pct)},
              {"ok_spans_pct", opt(r.ok_spans_pct)},
              {"perturbation_marked_pct", opt(r.perturbation_marked_pct)},
              {"warnings", r.warnings}};
  CsvWriter csv("qc", {"annotations", "pairs", "mean_score_original", "mean_score_perturbed",
                       "mean_spans_original", "mean_spans_perturbed", "ok_score_pct",
                       "ok_spans_pct", "perturbation_marked_pct"});
  csv.row({set.name, std::to_string(r.pairs), csv_number(r.mean_score_original),
           csv_number(r.mean_score_perturbed), csv_number(r.mean_spans_original),
           csv_number(r.mean_spans_perturbed), csv_number(r.ok_score_pct),
           csv_number(r.ok_spans_pct), csv_number(r.perturbation_marked_pct)});
  return {{"report.json", dump(report)}, {"qc.csv", csv.str()}};
}

Artifacts cmd_time(const Inputs& in, const ReportConfig& c) {
  const AnnotationSet& set = first_set(in, "time");
  const stats::TimeStats ts = stats::time_stats(set.annotations, c.cap_s);
  std::vector<std::string> warnings = ts.warnings;

  CsvWriter med_csv("annotator_medians", {"annotator_id", "median_s"});
  json medians = json::object();
  for (const auto& [id, m] : ts.per_annotator_medians) {
    med_csv.row({id, csv_number(m)});
    medians[id] = m;
  }

  CsvWriter slope_csv("speedup", {"annotator_id", "slope_s_per_segment"});
  CsvWriter series_csv("speedup_series", {"position", "mean_smoothed_s"});
  json speedup = nullptr;
  try {
    const stats::SpeedupResult sp = stats::learned_speedup(set.annotations, c.window, c.cap_s);
    json per = json::object();
    for (const auto& a : sp.annotators) {
      slope_csv.row({a.annotator_id, csv_number(a.slope_s_per_segment)});
      per[a.annotator_id] = a.slope_s_per_segment;
    }
    for (std::size_t i = 0; i < sp.mean_series.size(); ++i) {
      series_csv.row({std::to_string(i), csv_number(sp.mean_series[i])});
    }
    speedup = json{{"window", c.window}, {"mean_slope_s_per_segment", sp.mean_slope},
                   {"per_annotator", per}};
    warnings.insert(warnings.end(), sp.warnings.begin(), sp.warnings.end());
  } catch (const std::invalid_argument& e) {
    warnings.push_back(fmt::format("speedup not computed: {}", e.what()));
  }

  json report{{"schema", "esa.time.v1"},
              {"annotations", set.name},
              {"cap_s", c.cap_s},
              {"pooled_median_s", ts.pooled_median_s},
              {"mean_of_annotator_medians_s", ts.mean_of_annotator_medians_s},
              {"per_annotator_medians_s", medians},
              {"kept", ts.kept},
              {"excluded_over_cap", ts.excluded_over_cap},
              {"speedup", speedup},
              {"warnings", warnings}};
  return {{"report.json", dump(report)},
          {"annotator_medians.csv", med_csv.str()},
          {"speedup.csv", slope_csv.str()},
          {"speedup_series.csv", series_csv.str()}};
}

Artifacts cmd_weightscan(const Inputs& in, const ReportConfig& c) {
  const AnnotationSet& set = first_set(in, "weightscan");
  const auto anns = regular(set.annotations);
  const WeightScanResult r = scan_major_weight(anns, c.minor_weight, c.grid);
  CsvWriter curve("weightscan", {"major_weight", "pearson"});
  json jcurve = json::array();
  for (const auto& p : r.curve) {
    curve.row({csv_number(p.major_weight), csv_number(p.correlation)});
    jcurve.push_back({{"major_weight", p.major_weight}, {"pearson", opt(p.correlation)}});
  }
  json report{{"schema", "esa.weightscan.v1"},
              {"annotations", set.name},
              {"minor_weight", c.minor_weight},
              {"grid", {{"lo", c.grid.lo}, {"hi", c.grid.hi}, {"step", c.grid.step}}},
              {"best_major_weight", r.best_major_weight},
              {"best_pearson", r.best_correlation},
              {"curve", jcurve},
              {"features", nullptr}};
  Artifacts out{{"weightscan.csv", curve.str()}};
  if (in.dataset) {
    const Lengths lengths = lengths_of(in);
    CsvWriter feat("features", {"feature", "pearson"});
    json jf = json::array();
    for (const auto& f : stats::feature_correlations(anns, *lengths.get())) {
      feat.row({f.feature, csv_number(f.pearson)});
      jf.push_back({{"feature", f.feature}, {"pearson", opt(f.pearson)}});
    }
    report["features"] = jf;
    out["features.csv"] = feat.str();
  }
  out["report.json"] = dump(report);
  return out;
}

Artifacts cmd_consistency(const Inputs& in, const ReportConfig& c) {
  first_set(in, "consistency");
  const Lengths lengths = lengths_of(in);
  CsvWriter csv("consistency", {"annotations", "subset_size", "mean_accuracy"});
  json curves = json::array();
  for (const auto& set : in.sets) {
    const auto anns = regular(set.annotations);
    const ScoreOptions so{infer_kind(anns, c.kind), c.weights, lengths.get(), std::nullopt};
    const stats::ConsistencyCurve curve =
        stats::subset_consistency(anns, so, {c.subset_sizes, c.resamples, c.seed});
    json points = json::array();
    for (const auto& p : curve.points) {
      csv.row({set.name, std::to_string(p.subset_size), csv_number(p.mean_accuracy)});
      points.push_back({{"subset_size", p.subset_size}, {"mean_accuracy", p.mean_accuracy}});
    }
    curves.push_back({{"annotations", set.name},
                      {"kind", to_string(so.kind)},
                      {"average", curve.average},
                      {"points", points}});
  }
  json report{{"schema", "esa.consistency.v1"},
              {"seed", c.seed},
              {"resamples", c.resamples},
              {"curves", curves}};
  return {{"report.json", dump(report)}, {"consistency.csv", csv.str()}};
}

Artifacts cmd_histogram(const Inputs& in, const ReportConfig& c) {
  first_set(in, "histogram");
  const Lengths lengths = lengths_of(in);
  CsvWriter csv("histogram", {"annotations", "lo", "hi", "count"});
  json hists = json::array();
  for (const auto& set : in.sets) {
    const auto anns = regular(set.annotations);
    const ScoreKind kind = infer_kind(anns, c.kind);
    std::vector<double> scores;
    for (const auto& a : anns) {
      scores.push_back(segment_score(a, kind, c.weights, lengths.get()).value);
    }
    const double width = c.bin_width.value_or(default_bin_width(kind));
    json bins = json::array();
    for (const auto& b : score_histogram(scores, width, c.clip)) {
      csv.row({set.name, csv_number(b.lo), csv_number(b.hi), std::to_string(b.count)});
      bins.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
    }
    hists.push_back({{"annotations", set.name},
                     {"kind", to_string(kind)},
                     {"bin_width", width},
                     {"clip", opt(c.clip)},
                     {"count", scores.size()},
                     {"bins", bins}});
  }
  json report{{"schema", "esa.histogram.v1"}, {"histograms", hists}};
  return {{"report.json", dump(report)}, {"histogram.csv", csv.str()}};
}

void write_artifacts(const Artifacts& artifacts, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : artifacts) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw ReportError(fmt::format("cannot write {}", (dir / name).string()));
    out << content;
  }
}

}  // namespace esa::report
