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

#ifndef NLIDB_FORGE_H_
#define NLIDB_FORGE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nlidb/confusion.h"
#include "nlidb/schema.h"
#include "nlidb/sql_ast.h"

namespace nlidb {

enum class UtranOrigin { kOriginal, kSwapQuestion, kDropQuestion, kDropSchema };

std::string_view origin_name(UtranOrigin origin);  // "original", "swap_question", ...
UtranOrigin parse_origin(std::string_view name);

struct UtranExample {
  std::string question;
  std::string db_id;
  UtranOrigin origin = UtranOrigin::kOriginal;
  SpanLabel label;
  std::string source_question;
  std::string edit;  // e.g. "drop countries", "swap countries -> invoices"

  bool translatable() const { return label.translatable(); }
  bool operator==(const UtranExample&) const = default;
};

// 0-based inclusive token range of a question mentioning a schema component.
struct LinkedSpan {
  std::size_t first = 0;
  std::size_t last = 0;
  std::optional<FieldId> field;  // set for fields
  std::optional<TableId> table;  // set for tables (star references)

  bool operator==(const LinkedSpan&) const = default;
};

// Spans of the question naming the SELECT and WHERE components of `sql`.
// A component matches through its display tokens (fields also as "table
// field"), token by token, exactly or after plural stripping. Longer spans
// win overlaps, then earlier ones; one span per component. Sorted by start.
std::vector<LinkedSpan> link_field_spans(std::string_view question, const SqlQuery& sql,
                                         const DatabaseSchema& schema);

// Removes the `choice`-th linked span (modulo the span count) and an
// adjacent preceding preposition or article. Whole-question label. Throws
// Error(kNoLinkedSpan).
UtranExample drop_question(std::string_view question, const SqlQuery& sql,
                           const DatabaseSchema& schema, std::size_t choice = 0);

// Table and field display names of the other schemas of `pool` sharing no
// (stemmed) token with any name of `schema`. Sorted, unique.
std::vector<std::string> distractor_candidates(const DatabaseSchema& schema,
                                               const std::vector<const DatabaseSchema*>& pool);

// Replaces the `choice`-th linked span with a distractor drawn by `rng`.
// Throws Error(kNoLinkedSpan) or Error(kNoDistractorAvailable).
UtranExample swap_question(std::string_view question, const SqlQuery& sql,
                           const DatabaseSchema& schema,
                           const std::vector<const DatabaseSchema*>& pool, std::mt19937_64& rng,
                           std::size_t choice = 0);

struct SchemaDrop {
  UtranExample example;
  DatabaseSchema schema;
};

// Removes the field of a linked span from a copy of the schema; the label
// covers that span. With `target` unset the first droppable linked field is
// used. Throws Error(kNoLinkedSpan) or Error(kNotDroppable).
SchemaDrop drop_schema(std::string_view question, const SqlQuery& sql,
                       const DatabaseSchema& schema, std::optional<FieldId> target = std::nullopt);

// The schema an example was labeled against: `base`, minus the field a
// drop_schema edit removed.
DatabaseSchema example_schema(const UtranExample& example, const DatabaseSchema& base);

struct Paraphrase {
  std::string question;
  // For each source token, its position in the rewritten question, if kept.
  std::vector<std::optional<std::size_t>> alignment;
};

class Paraphraser {
 public:
  virtual ~Paraphraser() = default;
  virtual Paraphrase rewrite(std::string_view question) const = 0;
};

class IdentityParaphraser : public Paraphraser {
 public:
  Paraphrase rewrite(std::string_view question) const override;
};

// Replaces word sequences (case-insensitive) by fixed phrases. Leftmost,
// longest rule first; rewritten tokens are unaligned.
class PhraseTableParaphraser : public Paraphraser {
 public:
  explicit PhraseTableParaphraser(std::vector<std::pair<std::string, std::string>> rules);
  static PhraseTableParaphraser builtin();

  Paraphrase rewrite(std::string_view question) const override;

 private:
  std::vector<std::pair<std::vector<std::string>, std::string>> rules_;
};

// Rewrites the question and carries the label over: aligned span tokens
// first, then a string search for the span words, then the whole question.
UtranExample paraphrase(const UtranExample& example, const Paraphraser& paraphraser);

// Unigram bag-of-words logistic regression (untranslatable = positive).
class StyleClassifier {
 public:
  struct Options {
    std::size_t epochs = 500;
    double learning_rate = 1.0;
    double l2 = 1e-3;
  };

  StyleClassifier() = default;
  explicit StyleClassifier(Options options) : options_(options) {}

  void fit(const std::vector<UtranExample>& data);
  double probability(std::string_view question) const;  // P(untranslatable)
  double accuracy(const std::vector<UtranExample>& data) const;

 private:
  Options options_;
  std::map<std::string, double> weights_;
  double bias_ = 0;
};

struct FilterOptions {
  std::size_t rounds = 3;
  double tau = 0.9;
  std::size_t max_attempts = 20;
};

// Produces a fresh untranslatable example to replace `discarded`; nullopt
// when it cannot.
using Regenerator = std::function<std::optional<UtranExample>(const UtranExample& discarded,
                                                              std::size_t attempt)>;

// Each round trains a StyleClassifier on the pool and replaces every
// untranslatable example it flags with probability > tau. A replacement the
// current classifier still flags is retried up to max_attempts times.
// Throws Error(kGeneratorExhausted) when every attempt yields nothing.
std::vector<UtranExample> adversarial_filter(std::vector<UtranExample> pool,
                                             const Regenerator& regenerate,
                                             const FilterOptions& options = {},
                                             std::vector<std::size_t>* replaced_per_round = nullptr);

inline constexpr double kDefaultUntranslatableRatio = 0.35;

// round(ratio * n / (1 - ratio)) untranslatable examples per n translatable.
std::size_t untranslatable_target(std::size_t translatable_count, double ratio);

nlohmann::json example_json(const UtranExample& example);
UtranExample example_from_json(const nlohmann::json& record);

void write_dataset(const std::vector<UtranExample>& examples, std::ostream& out);
void write_dataset(const std::vector<UtranExample>& examples, const std::filesystem::path& path);
std::vector<UtranExample> read_dataset(std::istream& in);
std::vector<UtranExample> read_dataset(const std::filesystem::path& path);

struct SourceExample {
  std::string db_id;
  std::string question;
  SqlQuery sql;
};

struct ForgeOptions {
  double ratio = kDefaultUntranslatableRatio;
  FilterOptions filter;
  std::uint64_t seed = 0;
  std::shared_ptr<const Paraphraser> paraphraser;  // identity when unset
};

// Originals plus synthesized untranslatable examples at the target ratio,
// adversarially filtered. Sources whose SQL does not fit their schema are
// skipped.
std::vector<UtranExample> forge_dataset(const std::map<std::string, DatabaseSchema>& schemas,
                                        const std::vector<SourceExample>& sources,
                                        const ForgeOptions& options = {});

}  // namespace nlidb

#endif  // NLIDB_FORGE_H_
