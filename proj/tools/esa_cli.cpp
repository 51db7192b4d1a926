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

// esa: campaign building, serving and analysis reports.
//
//   esa rank --annotations esa.jsonl --reference mqm.jsonl --out out
//   esa build-campaign --dataset data/manifest.json --config campaign.json
//   ESA_STORAGE=/var/esa esa serve --port 8080

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "esa/campaign.hpp"
#include "esa/http_api.hpp"
#include "esa/ingest.hpp"
#include "esa/report.hpp"
#include "esa/store.hpp"

namespace {

using esa::report::ReportConfig;

struct AnalysisFlags {
  std::string dataset;
  std::vector<std::string> annotations;
  std::string reference;
  std::string perturbations;
  std::string protocol;
  std::string kind;
  std::string reference_kind;
  std::string config;
  std::string test = "rank-sum";
  std::string pairing = "any";
  std::string direction = "first";
  double alpha = 0.05;
  std::uint64_t seed = 0;
  double minor = -1.0;
  double major = -5.0;
  std::optional<double> clip;
  std::optional<double> bin_width;
  std::vector<std::size_t> subset_sizes;
  int resamples = 100;
  double cap_s = 300.0;
  int window = 15;
  std::string out = "out";
};

void add_analysis_flags(CLI::App* cmd, AnalysisFlags& f) {
  cmd->add_option("--dataset", f.dataset, "dataset manifest (JSON)");
  cmd->add_option("--annotations", f.annotations, "annotation JSONL file(s)");
  cmd->add_option("--reference", f.reference, "reference annotation JSONL");
  cmd->add_option("--perturbations", f.perturbations, "perturbation manifest JSONL");
  cmd->add_option("--protocol", f.protocol, "keep only this protocol (esa|mqm|da)");
  cmd->add_option("--kind", f.kind, "score kind: direct|spans|spans-normalized");
  cmd->add_option("--reference-kind", f.reference_kind, "score kind of the reference");
  cmd->add_option("--alpha", f.alpha, "significance level for clustering");
  cmd->add_option("--test", f.test, "cluster test: rank-sum|signed-rank");
  cmd->add_option("--seed", f.seed, "seed for randomized commands");
  cmd->add_option("--minor-weight", f.minor, "weight of a minor span");
  cmd->add_option("--major-weight", f.major, "weight of a major span");
  cmd->add_option("--clip", f.clip, "histogram: merge values below this");
  cmd->add_option("--bin-width", f.bin_width, "histogram bin width");
  cmd->add_option("--subset-sizes", f.subset_sizes, "consistency: subset sizes");
  cmd->add_option("--resamples", f.resamples, "consistency: resamples per size");
  cmd->add_option("--cap", f.cap_s, "time: break cap in seconds");
  cmd->add_option("--window", f.window, "time: moving-average window");
  cmd->add_option("--pairing", f.pairing, "agreement: same-annotator|any");
  cmd->add_option("--direction", f.direction, "agreement: recall given first|second");
  cmd->add_option("--out", f.out, "output root; artifacts go to <out>/<command>/");
  cmd->add_option("--config", f.config, "JSON file whose keys override the flags");
}

ReportConfig to_config(const AnalysisFlags& f) {
  ReportConfig c;
  if (!f.dataset.empty()) c.dataset = f.dataset;
  for (const auto& a : f.annotations) c.annotations.emplace_back(a);
  if (!f.reference.empty()) c.reference = f.reference;
  if (!f.perturbations.empty()) c.perturbations = f.perturbations;
  if (!f.protocol.empty()) c.protocol = esa::parse_protocol(f.protocol);
  if (!f.kind.empty()) c.kind = esa::parse_score_kind(f.kind);
  if (!f.reference_kind.empty()) c.reference_kind = esa::parse_score_kind(f.reference_kind);
  c.alpha = f.alpha;
  c.test = esa::stats::parse_cluster_test(f.test);
  c.seed = f.seed;
  c.weights = {f.minor, f.major};
  c.minor_weight = f.minor;
  c.clip = f.clip;
  c.bin_width = f.bin_width;
  c.subset_sizes = f.subset_sizes;
  c.resamples = f.resamples;
  c.cap_s = f.cap_s;
  c.window = f.window;
  c.out = f.out;
  nlohmann::json overrides = {{"pairing", f.pairing}, {"direction", f.direction}};
  c = esa::report::apply_config(c, overrides, {});
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw esa::report::ReportError(fmt::format("cannot open {}", f.config));
    const std::filesystem::path path(f.config);
    c = esa::report::apply_config(c, nlohmann::json::parse(in), path.parent_path());
  }
  return c;
}

std::filesystem::path storage_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(esa::kStorageEnv)) return env;
  throw std::invalid_argument(
      fmt::format("no storage path: pass --storage or set {}", esa::kStorageEnv));
}

void print_error(const std::string& code, const std::string& message) {
  std::cerr << nlohmann::json{{"error", {{"code", code}, {"message", message}}}}.dump()
            << "\n";
}

esa::ApiServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Error span annotation: campaigns and analysis reports"};
  app.require_subcommand(1);

  using Command = esa::report::Artifacts (*)(const esa::report::Inputs&, const ReportConfig&);
  const std::map<std::string, std::pair<Command, std::string>> analyses = {
      {"rank", {esa::report::cmd_rank, "system means, clusters, agreement with a reference"}},
      {"agreement", {esa::report::cmd_agreement, "segment and span agreement between sets"}},
      {"qc", {esa::report::cmd_qc, "attention-check evaluation"}},
      {"time", {esa::report::cmd_time, "annotation time medians and learned speedup"}},
      {"weightscan", {esa::report::cmd_weightscan, "major-weight scan and feature correlations"}},
      {"consistency", {esa::report::cmd_consistency, "subset consistency curves"}},
      {"histogram", {esa::report::cmd_histogram, "segment score histograms"}},
  };
  std::map<std::string, AnalysisFlags> flags;
  std::map<std::string, CLI::App*> commands;
  for (const auto& [name, entry] : analyses) {
    CLI::App* cmd = app.add_subcommand(name, entry.second);
    add_analysis_flags(cmd, flags[name]);
    commands[name] = cmd;
  }

  std::string dataset, campaign_config, storage, manifest_out;
  CLI::App* build = app.add_subcommand("build-campaign", "build a campaign into the store");
  build->add_option("--dataset", dataset, "dataset manifest (JSON)")->required();
  build->add_option("--config", campaign_config, "campaign config (JSON)")->required();
  build->add_option("--storage", storage, "storage root (default $ESA_STORAGE)");
  build->add_option("--manifest-out", manifest_out, "also write the manifest here");

  std::string from_id, new_id;
  CLI::App* repeat = app.add_subcommand("repeat-campaign", "clone a campaign under a new id");
  repeat->add_option("--from", from_id, "existing campaign id")->required();
  repeat->add_option("--id", new_id, "new campaign id")->required();
  repeat->add_option("--storage", storage, "storage root (default $ESA_STORAGE)");

  std::string export_id, export_out;
  CLI::App* exp = app.add_subcommand("export", "write a campaign's export files");
  exp->add_option("--campaign", export_id, "campaign id")->required();
  exp->add_option("--storage", storage, "storage root (default $ESA_STORAGE)");
  exp->add_option("--out", export_out, "output directory")->required();

  std::string host = "127.0.0.1";
  int port = 8080;
  CLI::App* serve = app.add_subcommand("serve", "run the annotation HTTP API");
  serve->add_option("--storage", storage, "storage root (default $ESA_STORAGE)");
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port (0 picks one)");

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [name, cmd] : commands) {
      if (!cmd->parsed()) continue;
      const ReportConfig config = to_config(flags[name]);
      const auto inputs = esa::report::load_inputs(config);
      const auto artifacts = analyses.at(name).first(inputs, config);
      esa::report::write_artifacts(artifacts, config.out / name);
      std::cout << (config.out / name).string() << "\n";
      return 0;
    }
    if (build->parsed()) {
      const auto cfg = esa::read_campaign_config(campaign_config);
      const auto ds = esa::ingest::load_dataset(std::filesystem::path(dataset));
      const esa::Campaign c = esa::build_campaign(ds.documents, ds.outputs, cfg);
      esa::CampaignStore store(storage_root(storage));
      store.create(c);
      if (!manifest_out.empty()) {
        std::ofstream(manifest_out, std::ios::binary) << esa::campaign_manifest(c);
      }
      nlohmann::json summary{{"campaign_id", c.campaign_id},
                             {"tasks", c.tasks.size()},
                             {"units", c.regular_unit_count()},
                             {"attention_checks", c.perturbations.size()},
                             {"annotators", c.annotators()}};
      std::cout << summary.dump(2) << "\n";
      return 0;
    }
    if (repeat->parsed()) {
      esa::CampaignStore store(storage_root(storage));
      store.create(esa::repeat_campaign(store.campaign(from_id), new_id));
      std::cout << new_id << "\n";
      return 0;
    }
    if (exp->parsed()) {
      esa::CampaignStore store(storage_root(storage));
      const auto b = store.export_campaign(export_id);
      esa::report::write_artifacts({{"annotations.jsonl", b.annotations_jsonl},
                                    {"revisions.jsonl", b.revisions_jsonl},
                                    {"perturbations.jsonl", b.perturbations_jsonl},
                                    {"timing.csv", b.timing_csv}},
                                   export_out);
      std::cout << export_out << "\n";
      return 0;
    }
    if (serve->parsed()) {
      esa::CampaignStore store(storage_root(storage));
      esa::ApiServer server(store);
      const int bound = server.bind(host, port);
      g_server = &server;
      std::signal(SIGINT, handle_signal);
      std::signal(SIGTERM, handle_signal);
      std::cerr << fmt::format("listening on {}:{}\n", host, bound);
      server.run();
      return 0;
    }
  } catch (const esa::ingest::CoverageError& e) {
    print_error("coverage", e.what());
    return 1;
  } catch (const esa::ingest::IngestError& e) {
    print_error("ingest", e.what());
    return 1;
  } catch (const esa::StoreError& e) {
    print_error(e.code(), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("error", e.what());
    return 1;
  }
  return 0;
}
