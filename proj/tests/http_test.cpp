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

#include "esa/http_api.hpp"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <sstream>
#include <thread>

#include "esa/csv.hpp"
#include "esa/ingest.hpp"
#include "fixtures.hpp"
#include "httplib.h"
#include "test_util.hpp"

namespace esa {
namespace {

using ::testing::HasSubstr;
using nlohmann::json;

class HttpTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto data = testing::synthetic_data(2, {3, 2});
    CampaignConfig cfg;
    cfg.campaign_id = "web";
    cfg.batch_size = 5;
    cfg.seed = 4;
    cfg.tutorial = {{"tut-1", "Der Hund.", "The cat.", {{{4, 7}, Severity::kMajor, false}}, 0,
                     {{0, 60}}}};
    campaign = build_campaign(data.documents, data.outputs, cfg);
    store = std::make_unique<CampaignStore>(dir.path());
    store->create(campaign);
    server = std::make_unique<ApiServer>(*store);
    port = server->bind("127.0.0.1", 0);
    thread = std::thread([this] { server->run(); });
    server->wait_until_ready();
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
    who = campaign.tasks[0].annotators[0];
  }
  void TearDown() override {
    server->stop();
    thread.join();
  }

  std::pair<int, json> get(const std::string& path) {
    const auto r = client->Get(path);
    EXPECT_TRUE(r);
    return {r->status, json::parse(r->body)};
  }
  std::pair<int, json> post(const std::string& path, const json& body) {
    const auto r = client->Post(path, body.dump(), "application/json");
    EXPECT_TRUE(r);
    return {r->status, json::parse(r->body)};
  }
  json pass_tutorial() {
    auto [status, body] = post("/campaign/web/tutorial",
                               {{"annotator", who},
                                {"answers",
                                 {{{"item_id", "tut-1"},
                                   {"spans", {{{"start", 4}, {"end", 7}, {"severity", "major"}}}},
                                   {"direct_score", 30}}}}});
    EXPECT_EQ(status, 200);
    return body;
  }
  json submit_body(const json& unit, double score) {
    return {{"annotator", who},
            {"task_id", unit["task_id"]},
            {"unit_index", unit["unit_index"]},
            {"spans", {{{"start", 0}, {"end", 2}, {"severity", "minor"}}}},
            {"direct_score", score}};
  }

  testing::TempDir dir;
  Campaign campaign;
  std::unique_ptr<CampaignStore> store;
  std::unique_ptr<ApiServer> server;
  std::unique_ptr<httplib::Client> client;
  std::thread thread;
  int port = 0;
  std::string who;
};

TEST_F(HttpTest, TutorialGatesTaskEndpoints) {
  auto [s1, next] = get("/campaign/web/next?annotator=" + who);
  EXPECT_EQ(s1, 200);
  EXPECT_EQ(next["kind"], "tutorial");
  EXPECT_EQ(next["item"]["item_id"], "tut-1");
  EXPECT_EQ(next["item"]["target"], "The cat.");

  auto [s2, sub] = post("/campaign/web/submit",
                        {{"annotator", who}, {"task_id", "t001"}, {"unit_index", 0}, {"direct_score", 5}});
  EXPECT_EQ(s2, 403);
  EXPECT_EQ(sub["error"]["code"], "tutorial_required");
  auto [s3, unit] = get("/campaign/web/unit?annotator=" + who + "&task=t001&index=0");
  EXPECT_EQ(s3, 403);

  auto [s4, wrong] = post("/campaign/web/tutorial",
                          {{"annotator", who}, {"answers", {{{"item_id", "tut-1"}, {"direct_score", 30}}}}});
  EXPECT_EQ(s4, 200);
  EXPECT_EQ(wrong["passed"], false);
  EXPECT_THAT(wrong["items"][0]["diagnostics"][0].get<std::string>(), HasSubstr("not marked"));

  EXPECT_EQ(pass_tutorial()["passed"], true);
  auto [s5, after] = get("/campaign/web/next?annotator=" + who);
  EXPECT_EQ(s5, 200);
  EXPECT_EQ(after["kind"], "unit");
}

TEST_F(HttpTest, ServeSubmitReviseExport) {
  pass_tutorial();
  auto [s1, next] = get("/campaign/web/next?annotator=" + who);
  const json unit = next["unit"];
  EXPECT_EQ(unit["campaign_id"], "web");
  EXPECT_EQ(unit["missing_token"], "[MISSING]");
  EXPECT_FALSE(unit.contains("system_id"));

  auto [s2, ok] = post("/campaign/web/submit", submit_body(unit, 70));
  EXPECT_EQ(s2, 200);
  EXPECT_EQ(ok["accepted"], true);
  EXPECT_EQ(ok["revision"], 1);

  auto [s3, again] = get("/campaign/web/unit?annotator=" + who + "&task=" +
                         unit["task_id"].get<std::string>() + "&index=0");
  EXPECT_EQ(s3, 200);
  EXPECT_EQ(again["unit"]["previous_score"], 70);
  EXPECT_EQ(again["unit"]["previous_spans"].size(), 1u);
  auto [s4, rev] = post("/campaign/web/submit", submit_body(unit, 65));
  EXPECT_EQ(rev["revision"], 2);

  auto [s5, bundle] = get("/campaign/web/export");
  EXPECT_EQ(s5, 200);
  EXPECT_EQ(bundle["status"], "open");
  std::istringstream in(bundle["annotations_jsonl"].get<std::string>());
  const auto annotations = ingest::parse_annotations(in, "export");
  ASSERT_EQ(annotations.size(), 1u);
  EXPECT_EQ(*annotations[0].direct_score, 65);
  EXPECT_EQ(annotations[0].system_id, campaign.tasks[0].units[0].system_id);

  const auto timing = client->Get("/campaign/web/export?part=timing");
  ASSERT_TRUE(timing);
  EXPECT_EQ(timing->get_header_value("Content-Type"), "text/csv");
  EXPECT_EQ(parse_csv(timing->body).rows.size(), 1u);
  const auto revisions = client->Get("/campaign/web/export?part=revisions");
  std::istringstream rin(revisions->body);
  EXPECT_EQ(ingest::parse_annotations(rin, "revisions").size(), 2u);
  const auto perturbations = client->Get("/campaign/web/export?part=perturbations");
  std::istringstream pin(perturbations->body);
  EXPECT_EQ(ingest::parse_perturbations(pin, "p"), campaign.perturbations);
}

TEST_F(HttpTest, InvalidAnnotationCarriesViolations) {
  pass_tutorial();
  auto [s1, next] = get("/campaign/web/next?annotator=" + who);
  json body = submit_body(next["unit"], 250);
  body["spans"] = {{{"start", 0}, {"end", 100000}, {"severity", "major"}}};
  auto [status, err] = post("/campaign/web/submit", body);
  EXPECT_EQ(status, 422);
  EXPECT_EQ(err["accepted"], false);
  EXPECT_EQ(err["error"]["code"], "invalid_annotation");
  EXPECT_GE(err["error"]["violations"].size(), 2u);
  EXPECT_EQ(err["violations"], err["error"]["violations"]);
}

TEST_F(HttpTest, ErrorStatuses) {
  EXPECT_EQ(get("/campaign/nope/next?annotator=" + who).first, 404);
  EXPECT_EQ(get("/campaign/web/next?annotator=stranger").first, 404);
  auto [s, body] = get("/campaign/web/next");
  EXPECT_EQ(s, 400);
  EXPECT_EQ(body["error"]["code"], "bad_request");
  const auto r = client->Post("/campaign/web/submit", "not json", "application/json");
  EXPECT_EQ(r->status, 400);
  EXPECT_EQ(post("/campaign/web/submit", {{"annotator", who}}).first, 400);
  EXPECT_EQ(get("/campaign/web/unit?annotator=" + who + "&task=t001&index=x").first, 400);
  EXPECT_EQ(get("/campaign/web/export?part=bogus").first, 400);
  pass_tutorial();
  auto [s2, e2] = get("/campaign/web/unit?annotator=" + who + "&task=t001&index=1");
  EXPECT_EQ(s2, 409);
  EXPECT_EQ(e2["error"]["code"], "not_served");
  EXPECT_EQ(post("/campaign/web/submit",
                 {{"annotator", who}, {"task_id", "t999"}, {"unit_index", 0}, {"direct_score", 5}})
                .first,
            409);
}

}  // namespace
}  // namespace esa
