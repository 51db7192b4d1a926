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

#include "esa/qc.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <string_view>
#include <tuple>

#include <fmt/format.h>

#include "esa/agreement.hpp"
#include "esa/rng.hpp"

namespace esa {
namespace {

struct Token {
  std::size_t begin = 0;  // bytes
  std::size_t end = 0;
};

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    if (i >= text.size()) break;
    Token t{i, i};
    while (i < text.size() && !is_space(text[i])) ++i;
    t.end = i;
    tokens.push_back(t);
  }
  return tokens;
}

constexpr std::array<std::string_view, 12> kUnicodePunct = {
    "„", "“", "”", "‘", "’", "‚",
    "«", "»", "–", "—", "…", "¿"};

// Byte length of a punctuation character at the front of `s`, or 0.
std::size_t punct_prefix(std::string_view s) {
  if (s.empty()) return 0;
  const auto c = static_cast<unsigned char>(s[0]);
  if (c < 0x80) {
    return std::string_view("!\"#%&'()*,-./:;?@[\\]_{}").find(s[0]) !=
                   std::string_view::npos
               ? 1
               : 0;
  }
  for (auto p : kUnicodePunct) {
    if (s.substr(0, p.size()) == p) return p.size();
  }
  return 0;
}

std::size_t punct_suffix(std::string_view s) {
  if (s.empty()) return 0;
  const auto c = static_cast<unsigned char>(s.back());
  if (c < 0x80) {
    return std::string_view("!\"#%&'()*,-./:;?@[\\]_{}").find(s.back()) !=
                   std::string_view::npos
               ? 1
               : 0;
  }
  for (auto p : kUnicodePunct) {
    if (s.size() >= p.size() && s.substr(s.size() - p.size()) == p) {
      return p.size();
    }
  }
  return 0;
}

std::size_t leading_punct_bytes(std::string_view token) {
  std::size_t n = 0;
  while (std::size_t k = punct_prefix(token.substr(n))) n += k;
  return n;
}

std::size_t trailing_punct_bytes(std::string_view token) {
  std::size_t n = 0;
  while (std::size_t k = punct_suffix(token.substr(0, token.size() - n))) n += k;
  return n;
}

// Word form of a token without surrounding punctuation; may be empty.
std::string_view core_of(std::string_view token) {
  const std::size_t lead = leading_punct_bytes(token);
  if (lead == token.size()) return {};
  const std::size_t trail = trailing_punct_bytes(token.substr(lead));
  return token.substr(lead, token.size() - lead - trail);
}

}  // namespace

Perturbation perturb(const SystemOutput& output, std::uint64_t seed,
                     const std::vector<std::string>& vocabulary) {
  if (vocabulary.empty()) throw std::invalid_argument("empty vocabulary");
  for (const auto& w : vocabulary) {
    if (w.empty() || std::any_of(w.begin(), w.end(), is_space)) {
      throw std::invalid_argument(
          fmt::format("vocabulary word '{}' is empty or contains whitespace", w));
    }
  }
  const std::string& text = output.target_text;
  const std::vector<Token> tokens = tokenize(text);
  const int n = static_cast<int>(tokens.size());
  if (n < kMinPerturbableTokens) {
    throw NotPerturbableError(fmt::format(
        "not perturbable: ({}, {}) has {} tokens", output.system_id,
        output.seg_id, n));
  }

  Rng rng(seed);
  const int k = static_cast<int>(rng.between(1, std::min(kMaxReplacedTokens, n - 1)));
  const int first = static_cast<int>(rng.between(0, n - k));
  std::vector<std::string_view> words;
  for (int i = 0; i < k; ++i) words.push_back(vocabulary[rng.index(vocabulary.size())]);

  const Token& head = tokens[first];
  const Token& tail = tokens[first + k - 1];
  const std::string_view view(text);
  // Keep leading/trailing punctuation unless the token would vanish.
  std::size_t begin = head.begin;
  std::size_t end = tail.end;
  const std::size_t lead = leading_punct_bytes(view.substr(head.begin, head.end - head.begin));
  if (lead < head.end - head.begin) begin += lead;
  const std::size_t tail_begin = std::max(begin, tail.begin);
  const std::size_t trail = trailing_punct_bytes(view.substr(tail_begin, tail.end - tail_begin));
  if (trail < tail.end - tail_begin) end -= trail;

  std::string replacement;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) replacement += ' ';
    replacement += words[i];
  }

  Perturbation p;
  p.seg_id = output.seg_id;
  p.system_id = output.system_id;
  p.original_text = text;
  p.perturbed_text = text.substr(0, begin) + replacement + text.substr(end);
  const std::int64_t start_cp = utf8_length(view.substr(0, begin));
  p.replaced_range = {start_cp, start_cp + utf8_length(replacement)};
  p.original_range = {start_cp, start_cp + utf8_length(view.substr(begin, end - begin))};
  p.word_count_replaced = k;
  p.seed = seed;
  return p;
}

std::vector<std::string> build_vocabulary(const std::vector<SystemOutput>& outputs) {
  std::set<std::string> words;
  for (const auto& o : outputs) {
    if (o.is_perturbed) continue;
    const std::string_view view(o.target_text);
    for (const Token& t : tokenize(view)) {
      const std::string_view core = core_of(view.substr(t.begin, t.end - t.begin));
      if (!core.empty()) words.emplace(core);
    }
  }
  return {words.begin(), words.end()};
}

SystemOutput perturbed_output(const Perturbation& p) {
  SystemOutput o;
  o.system_id = p.system_id;
  o.seg_id = p.seg_id;
  o.target_text = p.perturbed_text;
  o.is_perturbed = true;
  o.perturbed_range = p.replaced_range;
  return o;
}

std::string restore_original(const Perturbation& p) {
  const std::string_view perturbed(p.perturbed_text);
  const std::size_t b = utf8_byte_offset(perturbed, p.replaced_range.start);
  const std::size_t e = utf8_byte_offset(perturbed, p.replaced_range.end);
  return std::string(perturbed.substr(0, b)) +
         utf8_substr(p.original_text, p.original_range) +
         std::string(perturbed.substr(e));
}

QCReport qc_evaluate(const std::vector<SegmentAnnotation>& annotations,
                     const std::vector<Perturbation>& perturbations,
                     const SeverityWeights& weights) {
  // (system, seg, perturbed) -> annotator -> latest annotation
  std::map<std::tuple<std::string, std::string, bool>,
           std::map<std::string, const SegmentAnnotation*>>
      index;
  for (const auto& a : annotations) {
    auto& slot = index[{a.system_id, a.seg_id, a.is_perturbed}][a.annotator_id];
    if (slot == nullptr || a.submitted_at_ms >= slot->submitted_at_ms) slot = &a;
  }

  auto score_of = [&](const SegmentAnnotation& a) {
    return a.direct_score ? *a.direct_score : span_score(a.spans, weights);
  };

  QCReport report;
  double score_orig = 0.0, score_pert = 0.0, spans_orig = 0.0, spans_pert = 0.0;
  int ok_score = 0, ok_spans = 0, marked = 0;
  for (const auto& p : perturbations) {
    const auto orig_it = index.find({p.system_id, p.seg_id, false});
    const auto pert_it = index.find({p.system_id, p.seg_id, true});
    if (pert_it == index.end()) {
      report.warnings.push_back(fmt::format(
          "perturbation ({}, {}) has no annotation of the perturbed copy; skipped",
          p.system_id, p.seg_id));
      continue;
    }
    for (const auto& [annotator, pert] : pert_it->second) {
      const SegmentAnnotation* orig = nullptr;
      if (orig_it != index.end()) {
        auto o = orig_it->second.find(annotator);
        if (o != orig_it->second.end()) orig = o->second;
      }
      if (orig == nullptr) {
        report.warnings.push_back(fmt::format(
            "annotator {} did not annotate the original of ({}, {}); skipped",
            annotator, p.system_id, p.seg_id));
        continue;
      }
      ++report.pairs;
      const double so = score_of(*orig), sp = score_of(*pert);
      score_orig += so;
      score_pert += sp;
      spans_orig += orig->spans.size();
      spans_pert += pert->spans.size();
      ok_score += so > sp;
      ok_spans += orig->spans.size() < pert->spans.size();
      marked += std::any_of(pert->spans.begin(), pert->spans.end(),
                            [&](const ErrorSpan& s) {
                              return span_hits_interval(s, p.replaced_range);
                            });
    }
  }
  if (report.pairs > 0) {
    const double n = report.pairs;
    report.mean_score_original = score_orig / n;
    report.mean_score_perturbed = score_pert / n;
    report.mean_spans_original = spans_orig / n;
    report.mean_spans_perturbed = spans_pert / n;
    report.ok_score_pct = 100.0 * ok_score / n;
    report.ok_spans_pct = 100.0 * ok_spans / n;
    report.perturbation_marked_pct = 100.0 * marked / n;
  }
  return report;
}

}  // namespace esa
