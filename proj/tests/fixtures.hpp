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

// Synthetic documents and system outputs for campaign-level tests.

#ifndef ESA_TESTS_FIXTURES_HPP_
#define ESA_TESTS_FIXTURES_HPP_

#include <string>
#include <vector>

#include <fmt/format.h>

#include "esa/model.hpp"
#include "esa/rng.hpp"

namespace esa::testing {

struct SyntheticData {
  std::vector<Document> documents;
  std::vector<SystemOutput> outputs;
};

inline std::string sentence(Rng& rng, int min_tokens, int max_tokens) {
  static const std::vector<std::string> kWords = {
      "river", "stone", "quiet", "market", "seven", "window", "bright", "paper",
      "follow", "garden", "Zürich", "naïve", "north", "engine", "silver", "table"};
  const int n = static_cast<int>(rng.between(min_tokens, max_tokens));
  std::string s;
  for (int i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += kWords[rng.index(kWords.size())];
  }
  return s + ".";
}

// `systems` systems named sys-a, sys-b, ...; document i has doc_sizes[i]
// segments with ids "d<i>-<k>".
inline SyntheticData synthetic_data(int systems, const std::vector<int>& doc_sizes,
                                    std::uint64_t seed = 1) {
  Rng rng(seed);
  SyntheticData out;
  for (std::size_t d = 0; d < doc_sizes.size(); ++d) {
    Document doc{fmt::format("d{:03}", d), "news", {}};
    for (int k = 0; k < doc_sizes[d]; ++k) {
      doc.segments.push_back(make_segment(fmt::format("d{:03}-{}", d, k), sentence(rng, 3, 12)));
    }
    out.documents.push_back(doc);
  }
  for (int s = 0; s < systems; ++s) {
    const std::string id = fmt::format("sys-{}", static_cast<char>('a' + s));
    for (const auto& doc : out.documents) {
      for (const auto& seg : doc.segments) {
        out.outputs.push_back({id, seg.seg_id, sentence(rng, 3, 12), false, {}});
      }
    }
  }
  return out;
}

// Document sizes summing to `total`, each between 1 and 5.
inline std::vector<int> doc_sizes_summing_to(int total, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> sizes;
  while (total > 0) {
    const int s = static_cast<int>(std::min<std::int64_t>(total, rng.between(1, 5)));
    sizes.push_back(s);
    total -= s;
  }
  return sizes;
}

}  // namespace esa::testing

#endif  // ESA_TESTS_FIXTURES_HPP_
