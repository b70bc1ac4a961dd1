// Copyright 2026 The Nlidb Authors
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

#include "nlidb/corrector.h"

#include <algorithm>
#include <set>

#include "nlidb/error.h"

namespace nlidb {
namespace {

void check_span(const SpanLabel& span, std::size_t n) {
  if (span.start < 1 || span.end < span.start || span.end > n) {
    throw Error(ErrorCode::kInvalidSpan, "span (" + std::to_string(span.start) + ", " +
                                             std::to_string(span.end) + ") is not a span of a " +
                                             std::to_string(n) + "-token question");
  }
}

}  // namespace

std::vector<CorrectionCandidate> candidate_list(const DatabaseSchema& schema) {
  std::vector<CorrectionCandidate> out;
  std::set<std::string> seen;
  auto add = [&](const std::vector<std::string>& words, CorrectionCandidate::Source source) {
    std::string surface = join(words, " ");
    if (surface.empty() || !seen.insert(surface).second) return;
    out.push_back({std::move(surface), 0.0, source});
  };
  for (const Table& t : schema.tables) {
    add(t.display_tokens, CorrectionCandidate::Source::kTable);
    for (FieldId f : t.field_ids) add(schema.field(f).display_tokens, CorrectionCandidate::Source::kColumn);
  }
  return out;
}

std::vector<std::string> mask_span(const std::vector<QuestionToken>& question,
                                   const SpanLabel& span) {
  check_span(span, question.size());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < question.size(); ++i) {
    const std::size_t pos = i + 1;
    if (pos == span.start) out.emplace_back(kMaskToken);
    if (pos < span.start || pos > span.end) out.push_back(question[i].normalized);
  }
  return out;
}

ReferenceMaskScorer::ReferenceMaskScorer(std::shared_ptr<const ReferenceEmbedder> embedder)
    : embedder_(std::move(embedder)) {
  if (!embedder_) throw Error(ErrorCode::kInvalidArgument, "mask scorer needs an embedder");
}

double ReferenceMaskScorer::score(const std::vector<std::string>& masked, std::size_t mask_position,
                                  const CorrectionCandidate& candidate) const {
  std::vector<std::string> context;
  for (std::size_t i = 0; i < masked.size(); ++i) {
    if (i != mask_position) context.push_back(masked[i]);
  }
  const auto words = question_words(candidate.surface);
  const Eigen::VectorXd c = embedder_->text_vector(context);
  const Eigen::VectorXd v = embedder_->text_vector(words);
  const double denom = c.norm() * v.norm();
  const double cosine = denom > 0 ? c.dot(v) / denom : 0.0;
  const double extra = words.empty() ? 0.0 : static_cast<double>(words.size() - 1);
  return cosine - 0.01 * extra;
}

std::vector<CorrectionCandidate> score_candidates(const std::vector<std::string>& masked,
                                                  std::vector<CorrectionCandidate> candidates,
                                                  const MaskFillScorer& scorer) {
  const auto masks = std::count(masked.begin(), masked.end(), kMaskToken);
  if (masks != 1) {
    throw Error(ErrorCode::kNoMask, "expected one mask, found " + std::to_string(masks));
  }
  if (candidates.empty()) throw Error(ErrorCode::kEmptyCandidates, "no correction candidates");
  const auto pos = static_cast<std::size_t>(std::find(masked.begin(), masked.end(), kMaskToken) -
                                            masked.begin());
  for (auto& c : candidates) c.score = scorer.score(masked, pos, c);
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const CorrectionCandidate& a, const CorrectionCandidate& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.surface < b.surface;
                   });
  return candidates;
}

std::string apply_correction(std::string_view question, const SpanLabel& span,
                             const CorrectionCandidate& chosen) {
  const auto tokens = tokenize_question(question);
  check_span(span, tokens.size());
  if (chosen.surface.empty()) throw Error(ErrorCode::kInvalidArgument, "empty correction");
  std::string out(question.substr(0, tokens[span.start - 1].begin));
  out += chosen.surface;
  out.append(question.substr(tokens[span.end - 1].end));
  return out;
}

}  // namespace nlidb
