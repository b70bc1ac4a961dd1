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

#ifndef NLIDB_TESTS_SUPPORT_ENGINE_H_
#define NLIDB_TESTS_SUPPORT_ENGINE_H_

#include <set>
#include <string>

#include "nlidb/dialogue.h"

namespace nlidb::testing {

// Flags any question word in `confusing` as a one-token span; a word in
// `rambling` flags the whole question.
class WordClassifier : public TranslatabilityClassifier {
 public:
  WordClassifier(std::set<std::string> confusing, std::set<std::string> rambling)
      : confusing_(std::move(confusing)), rambling_(std::move(rambling)) {}
  Classification classify(std::string_view question, const DatabaseSchema& schema) const override;

 private:
  std::set<std::string> confusing_, rambling_;
};

// Ranks "country" first, "name" second, the rest tie.
class PreferenceScorer : public MaskFillScorer {
 public:
  double score(const std::vector<std::string>&, std::size_t,
               const CorrectionCandidate& candidate) const override;
};

// Engine over the singer fixture: confusing words {nation, land, frob},
// rambling word {blah}; exemplar translations for a handful of questions.
void configure_singer_engine(Engine& engine);

}  // namespace nlidb::testing

#endif  // NLIDB_TESTS_SUPPORT_ENGINE_H_
