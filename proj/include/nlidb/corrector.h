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

#ifndef NLIDB_CORRECTOR_H_
#define NLIDB_CORRECTOR_H_

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "nlidb/confusion.h"
#include "nlidb/encoding.h"
#include "nlidb/schema.h"
#include "nlidb/text.h"

namespace nlidb {

inline constexpr std::string_view kMaskToken = "[MASK]";

struct CorrectionCandidate {
  enum class Source { kTable, kColumn };
  std::string surface;  // display name, words joined by spaces
  double score = 0;
  Source source = Source::kTable;

  bool operator==(const CorrectionCandidate&) const = default;
};

// Each table display name followed by its fields' display names, first
// occurrence of each surface kept.
std::vector<CorrectionCandidate> candidate_list(const DatabaseSchema& schema);

// Normalized question words with tokens [start, end] (1-based) collapsed
// into one kMaskToken. Throws Error(kInvalidSpan).
std::vector<std::string> mask_span(const std::vector<QuestionToken>& question,
                                   const SpanLabel& span);

class MaskFillScorer {
 public:
  virtual ~MaskFillScorer() = default;
  virtual double score(const std::vector<std::string>& masked, std::size_t mask_position,
                       const CorrectionCandidate& candidate) const = 0;
};

// cos(mean of the context word vectors, mean of the candidate word vectors)
// minus 0.01 per candidate word beyond the first.
class ReferenceMaskScorer : public MaskFillScorer {
 public:
  explicit ReferenceMaskScorer(std::shared_ptr<const ReferenceEmbedder> embedder);

  double score(const std::vector<std::string>& masked, std::size_t mask_position,
               const CorrectionCandidate& candidate) const override;

 private:
  std::shared_ptr<const ReferenceEmbedder> embedder_;
};

// All candidates, scored, best first; equal scores in lexical order of
// surface. Throws Error(kNoMask) unless exactly one mask is present, and
// Error(kEmptyCandidates).
std::vector<CorrectionCandidate> score_candidates(const std::vector<std::string>& masked,
                                                  std::vector<CorrectionCandidate> candidates,
                                                  const MaskFillScorer& scorer);

// Replaces the bytes of tokens [start, end] with the candidate surface.
// Throws Error(kInvalidSpan).
std::string apply_correction(std::string_view question, const SpanLabel& span,
                             const CorrectionCandidate& chosen);

}  // namespace nlidb

#endif  // NLIDB_CORRECTOR_H_
