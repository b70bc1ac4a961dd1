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

#ifndef NLIDB_DECODER_H_
#define NLIDB_DECODER_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlidb/encoding.h"
#include "nlidb/schema.h"
#include "nlidb/sql_ast.h"
#include "nlidb/static_checker.h"

namespace nlidb {

inline constexpr std::size_t kReservedVocabSize = 80;
inline constexpr std::size_t kDefaultBeamWidth = 128;
inline constexpr std::size_t kMaxDecodeLength = 200;

// SQL keywords, operators and punctuation, the end marker "EOS", unused
// slots "[unused k]" up to 70 entries, then the digits "0" .. "9".
const std::vector<std::string>& reserved_vocab();
std::optional<int> reserved_id(std::string_view token);
int eos_id();

struct Action {
  // kCopyTable and kCopyField are the two kinds of schema copies.
  enum class Kind { kGenerate, kCopyQuestion, kCopyTable, kCopyField };
  Kind kind = Kind::kGenerate;
  std::int32_t value = 0;  // vocabulary id, question position, or component id

  static Action generate(int id) { return {Kind::kGenerate, id}; }
  // Throws Error(kInvalidArgument) for a token outside the vocabulary.
  static Action generate(std::string_view token);
  static Action copy_question(std::size_t position) {
    return {Kind::kCopyQuestion, static_cast<std::int32_t>(position)};
  }
  static Action copy_table(TableId id) { return {Kind::kCopyTable, index_of(id)}; }
  static Action copy_field(FieldId id) { return {Kind::kCopyField, index_of(id)}; }

  bool is_eos() const { return kind == Kind::kGenerate && value == eos_id(); }
  bool operator==(const Action&) const = default;
};

std::string action_text(const Action& action, const InputEncoding& encoding,
                        const DatabaseSchema& schema);

// Dense indexing of the legal actions of one encoding: the vocabulary, then
// question positions, then tables and fields in id order.
class ActionSpace {
 public:
  explicit ActionSpace(const InputEncoding& encoding);

  std::size_t size() const;
  bool legal(const Action& action) const;
  // Throws Error(kOutOfBounds) for illegal actions.
  std::size_t index(const Action& action) const;
  Action at(std::size_t index) const;

 private:
  std::size_t question_length_;
  std::vector<TableId> tables_;
  std::vector<FieldId> fields_;
  std::map<TableId, std::size_t> table_slot_;
  std::map<FieldId, std::size_t> field_slot_;
};

// Throws Error(kMalformedActionSequence) on a dangling quote, a missing or
// early EOS, an unused vocabulary slot, or an illegal copy.
std::string actions_to_sql(const std::vector<Action>& actions, const InputEncoding& encoding,
                           const DatabaseSchema& schema);

// Schema names are copied, string literals are copied from the matching
// question tokens, numbers are copied when a question token spells them and
// generated digit by digit otherwise. Keywords are always generated. Throws
// Error(kUncopyableLiteral).
std::vector<Action> sql_to_actions(const SqlQuery& gold, const InputEncoding& encoding,
                                   const DatabaseSchema& schema);

struct DecodeContext {
  const InputEncoding& encoding;
  const DatabaseSchema& schema;
  const ActionSpace& space;
  const EmbeddingOutput* embedding = nullptr;
  const ComponentVectors* components = nullptr;
};

class Scorer {
 public:
  virtual ~Scorer() = default;
  // One probability per index of context.space; zero for excluded actions.
  virtual std::vector<double> next_action_distribution(const std::vector<Action>& prefix,
                                                       const DecodeContext& context) const = 0;
  // Whether the context needs embeddings and component vectors.
  virtual bool uses_features() const { return false; }
};

struct Hypothesis {
  std::vector<Action> actions;  // ends with EOS
  double log_prob = 0;
};

// Finished hypotheses, best first. Equal scores order by the action index
// sequence, lexicographically.
std::vector<Hypothesis> beam_decode(const Scorer& scorer, const DecodeContext& context,
                                    std::size_t beam_width = kDefaultBeamWidth,
                                    std::size_t max_length = kMaxDecodeLength);

// Mixture over whole action sequences; the next action is drawn in
// proportion to the weight of the sequences consistent with the prefix.
// Prefixes outside every sequence continue with EOS.
class SequenceScorer : public Scorer {
 public:
  using Weighted = std::vector<std::pair<std::vector<Action>, double>>;
  explicit SequenceScorer(Weighted sequences) : sequences_(std::move(sequences)) {}

  std::vector<double> next_action_distribution(const std::vector<Action>& prefix,
                                               const DecodeContext& context) const override;

  static std::vector<double> distribution(const Weighted& sequences,
                                          const std::vector<Action>& prefix,
                                          const DecodeContext& context);

 private:
  Weighted sequences_;
};

// Decodes SELECT field FROM table or SELECT COUNT(*) FROM table, choosing
// components by softmax of their fused vectors against the mean question
// vector.
class FeatureScorer : public Scorer {
 public:
  std::vector<double> next_action_distribution(const std::vector<Action>& prefix,
                                               const DecodeContext& context) const override;
  bool uses_features() const override { return true; }
};

// Known (database, question) pairs decode their stored query with
// probability 1; anything else goes to the fallback.
class ExemplarScorer : public Scorer {
 public:
  explicit ExemplarScorer(std::shared_ptr<const Scorer> fallback = nullptr);

  void add(const std::string& db_id, std::string_view question, SqlQuery query);
  std::size_t size() const { return exemplars_.size(); }

  std::vector<double> next_action_distribution(const std::vector<Action>& prefix,
                                               const DecodeContext& context) const override;
  bool uses_features() const override { return fallback_ && fallback_->uses_features(); }

 private:
  const SqlQuery* lookup(const DecodeContext& context) const;

  std::shared_ptr<const Scorer> fallback_;
  std::map<std::pair<std::string, std::string>, SqlQuery> exemplars_;
};

struct TranslatorOptions {
  std::size_t beam_width = kDefaultBeamWidth;
  double theta = kDefaultMatchThreshold;
  std::size_t match_cap = kDefaultMatchCap;
  CheckOptions check;
  std::uint64_t seed = 0;
};

struct Translation {
  std::optional<SqlQuery> query;
  std::size_t rank = 0;  // 1-based beam position of the chosen candidate
  std::vector<std::string> candidates;
  InputEncoding encoding;
};

// tokenize -> match_picklists -> serialize -> embed -> beam_decode ->
// actions_to_sql -> filter_beam.
class Translator {
 public:
  Translator(std::shared_ptr<const Embedder> embedder, std::shared_ptr<const Scorer> scorer,
             TranslatorOptions options = {});

  Translation translate_detailed(std::string_view question, const DatabaseSchema& schema) const;
  std::optional<SqlQuery> translate(std::string_view question,
                                    const DatabaseSchema& schema) const;

  const Embedder& embedder() const { return *embedder_; }
  const TranslatorOptions& options() const { return options_; }

 private:
  std::shared_ptr<const Embedder> embedder_;
  std::shared_ptr<const Scorer> scorer_;
  TranslatorOptions options_;
  FusionParams fusion_;
};

}  // namespace nlidb

#endif  // NLIDB_DECODER_H_
