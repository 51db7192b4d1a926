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

// JSON-over-HTTP front end of CampaignStore (routes in docs/formats.md):
//
//   GET  /campaign/{id}/next?annotator=TOKEN
//   GET  /campaign/{id}/unit?annotator=TOKEN&task=TASK&index=N
//   POST /campaign/{id}/submit
//   POST /campaign/{id}/tutorial
//   GET  /campaign/{id}/export[?part=annotations|revisions|perturbations|timing]
//
// Errors carry {"error": {"code", "message", "violations": [...]}}.

#ifndef ESA_HTTP_API_HPP_
#define ESA_HTTP_API_HPP_

#include <memory>
#include <string>

#include "esa/store.hpp"

namespace esa {

class ApiServer {
 public:
  explicit ApiServer(CampaignStore& store);
  ~ApiServer();

  // Binds to `host:port`; port 0 picks a free one. Returns the bound port
  // or throws std::runtime_error.
  int bind(const std::string& host, int port);
  // Blocks until stop() is called.
  void run();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace esa

#endif  // ESA_HTTP_API_HPP_
