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

#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "esa/json_io.hpp"
#include "httplib.h"

namespace esa {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

json error_body(const std::string& code, const std::string& message,
                const std::vector<Violation>& violations = {}) {
  json list = json::array();
  for (const auto& v : violations) list.push_back(v);
  return json{{"error", {{"code", code}, {"message", message}, {"violations", list}}}};
}

int status_for(const std::string& code) {
  if (code == "unknown_campaign" || code == "unknown_annotator") return 404;
  if (code == "bad_request") return 400;
  if (code == "tutorial_required") return 403;
  if (code == "out_of_task" || code == "not_served" || code == "task_frozen") return 409;
  if (code == "io_error" || code == "corrupt_log") return 500;
  return 422;
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void reply_error(httplib::Response& res, const std::string& code, const std::string& msg,
                 const std::vector<Violation>& violations = {}) {
  reply(res, status_for(code), error_body(code, msg, violations));
}

std::string required_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) {
    throw StoreError("bad_request", fmt::format("missing query parameter '{}'", name));
  }
  return req.get_param_value(name);
}

json parse_body(const httplib::Request& req) {
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw StoreError("bad_request", "request body must be a JSON object");
  }
  return j;
}

std::optional<double> optional_score(const json& j) {
  if (!j.contains("direct_score") || j.at("direct_score").is_null()) return std::nullopt;
  return j.at("direct_score").get<double>();
}

// Runs a handler, mapping StoreError and malformed input to JSON errors.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const StoreError& e) {
      reply_error(res, e.code(), e.what());
    } catch (const json::exception& e) {
      reply_error(res, "bad_request", e.what());
    } catch (const std::invalid_argument& e) {
      reply_error(res, "bad_request", e.what());
    } catch (const std::exception& e) {
      reply_error(res, "io_error", e.what());
    }
  };
}

}  // namespace

struct ApiServer::Impl {
  CampaignStore& store;
  httplib::Server server;

  explicit Impl(CampaignStore& s) : store(s) { routes(); }

  void routes() {
    server.Get(R"(/campaign/([^/]+)/next)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const std::string id = req.matches[1];
                 const auto item = store.next_item(id, required_param(req, "annotator"));
                 reply(res, 200, to_json(item));
               }));

    server.Get(R"(/campaign/([^/]+)/unit)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const std::string id = req.matches[1];
                 int index = 0;
                 try {
                   index = std::stoi(required_param(req, "index"));
                 } catch (const std::logic_error&) {
                   throw StoreError("bad_request", "index must be an integer");
                 }
                 const auto unit = store.revisit(id, required_param(req, "annotator"),
                                                 required_param(req, "task"), index);
                 reply(res, 200, json{{"kind", "unit"}, {"unit", to_json(unit)}});
               }));

    server.Post(R"(/campaign/([^/]+)/submit)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const std::string id = req.matches[1];
                  const json body = parse_body(req);
                  SubmitRequest r;
                  r.annotator_id = body.at("annotator").get<std::string>();
                  r.task_id = body.at("task_id").get<std::string>();
                  r.unit_index = body.at("unit_index").get<int>();
                  r.spans = body.value("spans", std::vector<ErrorSpan>{});
                  r.direct_score = optional_score(body);
                  const SubmitResult result = store.submit(id, r);
                  json out = to_json(result);
                  if (result.accepted) {
                    reply(res, 200, out);
                    return;
                  }
                  static const std::set<std::string> kGate = {
                      "tutorial_required", "out_of_task", "not_served", "task_frozen"};
                  const std::string code = kGate.contains(result.violations.front().code)
                                               ? result.violations.front().code
                                               : std::string("invalid_annotation");
                  out.update(error_body(code, format_violations(result.violations),
                                        result.violations));
                  reply(res, status_for(code), out);
                }));

    server.Post(R"(/campaign/([^/]+)/tutorial)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const std::string id = req.matches[1];
                  const json body = parse_body(req);
                  std::vector<TutorialAnswer> answers;
                  for (const auto& a : body.value("answers", json::array())) {
                    answers.push_back({a.at("item_id").get<std::string>(),
                                       a.value("spans", std::vector<ErrorSpan>{}),
                                       optional_score(a)});
                  }
                  const auto result = store.check_tutorial(
                      id, body.at("annotator").get<std::string>(), answers);
                  reply(res, 200, to_json(result));
                }));

    server.Get(R"(/campaign/([^/]+)/export)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const std::string id = req.matches[1];
                 const ExportBundle b = store.export_campaign(id);
                 if (!req.has_param("part")) {
                   reply(res, 200,
                         json{{"campaign_id", id},
                              {"status", b.status},
                              {"annotations_jsonl", b.annotations_jsonl},
                              {"revisions_jsonl", b.revisions_jsonl},
                              {"perturbations_jsonl", b.perturbations_jsonl},
                              {"timing_csv", b.timing_csv}});
                   return;
                 }
                 const std::string part = req.get_param_value("part");
                 if (part == "annotations") {
                   res.set_content(b.annotations_jsonl, "application/x-ndjson");
                 } else if (part == "revisions") {
                   res.set_content(b.revisions_jsonl, "application/x-ndjson");
                 } else if (part == "perturbations") {
                   res.set_content(b.perturbations_jsonl, "application/x-ndjson");
                 } else if (part == "timing") {
                   res.set_content(b.timing_csv, "text/csv");
                 } else {
                   throw StoreError("bad_request", fmt::format("unknown export part '{}'", part));
                 }
                 res.status = 200;
               }));
  }
};

ApiServer::ApiServer(CampaignStore& store) : impl_(std::make_unique<Impl>(store)) {}

ApiServer::~ApiServer() = default;

int ApiServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw std::runtime_error(fmt::format("cannot bind {}", host));
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw std::runtime_error(fmt::format("cannot bind {}:{}", host, port));
  }
  return port;
}

void ApiServer::run() { impl_->server.listen_after_bind(); }

void ApiServer::stop() { impl_->server.stop(); }

void ApiServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace esa
