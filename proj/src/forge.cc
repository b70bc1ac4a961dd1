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

#include "nlidb/forge.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>

#include "nlidb/error.h"
#include "nlidb/sql.h"
#include "nlidb/static_checker.h"
#include "nlidb/text.h"

namespace nlidb {
namespace {

const std::set<std::string, std::less<>> kDropPrefixes = {"of", "for", "with", "the", "a",
                                                          "an", "in", "on", "by"};

bool word_match(const std::string& a, const std::string& b) {
  return a == b || light_stem(a) == light_stem(b);
}

struct Component {
  std::optional<FieldId> field;
  std::optional<TableId> table;
  bool operator==(const Component&) const = default;
};

void add_component(std::vector<Component>& out, Component c) {
  if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
}

void collect_ref(const ColumnRef& ref, const FromClause& from, const DatabaseSchema& schema,
                 std::vector<Component>& out) {
  if (ref.is_star()) {
    for (const auto& name : from.tables) {
      if (ref.table && *ref.table != name) continue;
      if (const Table* t = schema.find_table(name)) add_component(out, {std::nullopt, t->table_id});
    }
    return;
  }
  if (!ref.table) return;
  if (const Field* f = schema.find_field(*ref.table, ref.column)) {
    add_component(out, {f->field_id, std::nullopt});
  }
}

void collect_components(const SqlQuery& q, const DatabaseSchema& schema,
                        std::vector<Component>& out);

void collect_condition(const Condition& c, const FromClause& from, const DatabaseSchema& schema,
                       std::vector<Component>& out) {
  if (c.kind != Condition::Kind::kPredicate) {
    for (const auto& child : c.children) collect_condition(child, from, schema, out);
    return;
  }
  collect_ref(c.predicate.column, from, schema, out);
  if (const auto* sub = std::get_if<Box<SqlQuery>>(&c.predicate.value)) {
    collect_components(**sub, schema, out);
  }
}

void collect_components(const SqlQuery& q, const DatabaseSchema& schema,
                        std::vector<Component>& out) {
  for (const auto& item : q.select.items) collect_ref(item.target, q.from, schema, out);
  if (q.where) collect_condition(*q.where, q.from, schema, out);
  if (q.set_op) collect_components(*q.set_op->right, schema, out);
}

std::vector<std::vector<std::string>> patterns(const Component& c, const DatabaseSchema& schema) {
  std::vector<std::vector<std::string>> out;
  if (c.table) {
    out.push_back(schema.table(*c.table).display_tokens);
  } else {
    const Field& f = schema.field(*c.field);
    out.push_back(f.display_tokens);
    std::vector<std::string> both = schema.table(f.table_id).display_tokens;
    both.insert(both.end(), f.display_tokens.begin(), f.display_tokens.end());
    out.push_back(std::move(both));
  }
  return out;
}

// Replaces bytes of tokens [first, last] by `replacement`, tidying the
// whitespace at the seam when nothing is inserted.
std::string splice(std::string_view question, const std::vector<QuestionToken>& tokens,
                   std::size_t first, std::size_t last, std::string_view replacement) {
  std::string left(question.substr(0, tokens[first].begin));
  std::string right(question.substr(tokens[last].end));
  if (replacement.empty()) {
    const bool right_open = right.empty() || std::isspace(static_cast<unsigned char>(right[0])) ||
                            std::ispunct(static_cast<unsigned char>(right[0]));
    if (right_open) {
      while (!left.empty() && std::isspace(static_cast<unsigned char>(left.back()))) left.pop_back();
    }
    if (left.empty()) {
      std::size_t k = 0;
      while (k < right.size() && std::isspace(static_cast<unsigned char>(right[k]))) ++k;
      right.erase(0, k);
    }
  }
  return left + std::string(replacement) + right;
}

std::string span_text(const std::vector<QuestionToken>& tokens, std::size_t first,
                      std::size_t last) {
  std::vector<std::string> words;
  for (std::size_t i = first; i <= last; ++i) words.push_back(tokens[i].surface);
  return join(words, " ");
}

const LinkedSpan& pick_span(const std::vector<LinkedSpan>& spans, std::size_t choice) {
  if (spans.empty()) throw Error(ErrorCode::kNoLinkedSpan, "no question span names a schema component");
  return spans[choice % spans.size()];
}

std::string display_name(const std::vector<std::string>& tokens) { return join(tokens, " "); }

bool droppable(const DatabaseSchema& schema, FieldId id) {
  const Field& f = schema.field(id);
  return schema.table(f.table_id).field_ids.size() > 1 && !schema.in_foreign_pair(id);
}

}  // namespace

std::string_view origin_name(UtranOrigin origin) {
  switch (origin) {
    case UtranOrigin::kOriginal: return "original";
    case UtranOrigin::kSwapQuestion: return "swap_question";
    case UtranOrigin::kDropQuestion: return "drop_question";
    case UtranOrigin::kDropSchema: return "drop_schema";
  }
  return "original";
}

UtranOrigin parse_origin(std::string_view name) {
  for (auto o : {UtranOrigin::kOriginal, UtranOrigin::kSwapQuestion, UtranOrigin::kDropQuestion,
                 UtranOrigin::kDropSchema}) {
    if (origin_name(o) == name) return o;
  }
  throw Error(ErrorCode::kInvalidDocument, "unknown origin '" + std::string(name) + "'");
}

std::vector<LinkedSpan> link_field_spans(std::string_view question, const SqlQuery& sql,
                                         const DatabaseSchema& schema) {
  SqlQuery q = sql;
  qualify_columns(q, schema);
  std::vector<Component> components;
  collect_components(q, schema, components);
  const auto tokens = tokenize_question(question);

  struct Candidate {
    std::size_t first, length, component;
  };
  std::vector<Candidate> candidates;
  for (std::size_t c = 0; c < components.size(); ++c) {
    for (const auto& pattern : patterns(components[c], schema)) {
      if (pattern.empty() || pattern.size() > tokens.size()) continue;
      for (std::size_t i = 0; i + pattern.size() <= tokens.size(); ++i) {
        bool ok = true;
        for (std::size_t k = 0; k < pattern.size() && ok; ++k) {
          ok = word_match(tokens[i + k].normalized, pattern[k]);
        }
        if (ok) candidates.push_back({i, pattern.size(), c});
      }
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.length != b.length) return a.length > b.length;
    if (a.first != b.first) return a.first < b.first;
    return a.component < b.component;
  });
  std::vector<bool> taken(tokens.size(), false);
  std::vector<bool> used(components.size(), false);
  std::vector<LinkedSpan> out;
  for (const auto& cand : candidates) {
    if (used[cand.component]) continue;
    bool free = true;
    for (std::size_t k = 0; k < cand.length; ++k) free = free && !taken[cand.first + k];
    if (!free) continue;
    for (std::size_t k = 0; k < cand.length; ++k) taken[cand.first + k] = true;
    used[cand.component] = true;
    const Component& comp = components[cand.component];
    out.push_back({cand.first, cand.first + cand.length - 1, comp.field, comp.table});
  }
  std::sort(out.begin(), out.end(),
            [](const LinkedSpan& a, const LinkedSpan& b) { return a.first < b.first; });
  return out;
}

UtranExample drop_question(std::string_view question, const SqlQuery& sql,
                           const DatabaseSchema& schema, std::size_t choice) {
  const auto spans = link_field_spans(question, sql, schema);
  const LinkedSpan& span = pick_span(spans, choice);
  const auto tokens = tokenize_question(question);
  std::size_t first = span.first;
  if (first > 0 && kDropPrefixes.contains(tokens[first - 1].normalized)) --first;
  const std::string edited = splice(question, tokens, first, span.last, "");
  const std::size_t n = tokenize_question(edited).size();
  if (n == 0) throw Error(ErrorCode::kNoLinkedSpan, "dropping the span leaves no question");
  UtranExample ex;
  ex.question = edited;
  ex.db_id = schema.db_id;
  ex.origin = UtranOrigin::kDropQuestion;
  ex.label = {1, n};
  ex.source_question = std::string(question);
  ex.edit = "drop " + span_text(tokens, first, span.last);
  return ex;
}

std::vector<std::string> distractor_candidates(const DatabaseSchema& schema,
                                               const std::vector<const DatabaseSchema*>& pool) {
  std::set<std::string> own;
  auto add_own = [&](const std::vector<std::string>& words) {
    for (const auto& w : words) own.insert(light_stem(w));
  };
  for (const Table& t : schema.tables) add_own(t.display_tokens);
  for (const Field& f : schema.fields) add_own(f.display_tokens);
  std::set<std::string> out;
  auto consider = [&](const std::vector<std::string>& words) {
    if (words.empty()) return;
    for (const auto& w : words) {
      if (own.contains(light_stem(w))) return;
    }
    out.insert(display_name(words));
  };
  for (const DatabaseSchema* other : pool) {
    if (other == nullptr || other->db_id == schema.db_id) continue;
    for (const Table& t : other->tables) consider(t.display_tokens);
    for (const Field& f : other->fields) consider(f.display_tokens);
  }
  return {out.begin(), out.end()};
}

UtranExample swap_question(std::string_view question, const SqlQuery& sql,
                           const DatabaseSchema& schema,
                           const std::vector<const DatabaseSchema*>& pool, std::mt19937_64& rng,
                           std::size_t choice) {
  const auto spans = link_field_spans(question, sql, schema);
  const LinkedSpan& span = pick_span(spans, choice);
  const auto distractors = distractor_candidates(schema, pool);
  if (distractors.empty()) {
    throw Error(ErrorCode::kNoDistractorAvailable, "no other schema offers an unused name");
  }
  std::uniform_int_distribution<std::size_t> pick(0, distractors.size() - 1);
  const std::string& distractor = distractors[pick(rng)];
  const auto tokens = tokenize_question(question);
  const std::size_t width = tokenize_question(distractor).size();
  UtranExample ex;
  ex.question = splice(question, tokens, span.first, span.last, distractor);
  ex.db_id = schema.db_id;
  ex.origin = UtranOrigin::kSwapQuestion;
  ex.label = {span.first + 1, span.first + width};
  ex.source_question = std::string(question);
  ex.edit = "swap " + span_text(tokens, span.first, span.last) + " -> " + distractor;
  return ex;
}

SchemaDrop drop_schema(std::string_view question, const SqlQuery& sql,
                       const DatabaseSchema& schema, std::optional<FieldId> target) {
  const auto spans = link_field_spans(question, sql, schema);
  if (spans.empty()) throw Error(ErrorCode::kNoLinkedSpan, "no question span names a schema component");
  const LinkedSpan* chosen = nullptr;
  for (const auto& s : spans) {
    if (!s.field) continue;
    if (target) {
      if (*s.field != *target) continue;
      if (!droppable(schema, *s.field)) {
        throw Error(ErrorCode::kNotDroppable,
                    "field '" + schema.qualified_name(*s.field) +
                        "' is the only field of its table or part of a foreign key");
      }
      chosen = &s;
      break;
    }
    if (droppable(schema, *s.field)) {
      chosen = &s;
      break;
    }
  }
  if (chosen == nullptr) {
    if (target) {
      throw Error(ErrorCode::kNoLinkedSpan,
                  "field '" + schema.qualified_name(*target) + "' is not mentioned by the question");
    }
    throw Error(ErrorCode::kNotDroppable, "no linked field can be removed");
  }
  const auto tokens = tokenize_question(question);
  SchemaDrop out{{}, remove_field(schema, *chosen->field)};
  load_schema(schema_to_json(out.schema));
  UtranExample& ex = out.example;
  ex.question = std::string(question);
  ex.db_id = schema.db_id;
  ex.origin = UtranOrigin::kDropSchema;
  ex.label = {chosen->first + 1, chosen->last + 1};
  ex.source_question = std::string(question);
  ex.edit = "drop_schema " + schema.qualified_name(*chosen->field);
  return out;
}

DatabaseSchema example_schema(const UtranExample& example, const DatabaseSchema& base) {
  if (example.origin != UtranOrigin::kDropSchema) return base;
  constexpr std::string_view kPrefix = "drop_schema ";
  const std::string_view edit = example.edit;
  const auto dot = edit.find('.', kPrefix.size());
  if (edit.substr(0, kPrefix.size()) != kPrefix || dot == std::string_view::npos) {
    throw Error(ErrorCode::kInvalidDocument, "drop_schema example without a field edit");
  }
  const Field* f = base.find_field(edit.substr(kPrefix.size(), dot - kPrefix.size()), edit.substr(dot + 1));
  if (f == nullptr) {
    throw Error(ErrorCode::kInvalidDocument, "edit '" + example.edit + "' names no field of " + base.db_id);
  }
  return remove_field(base, f->field_id);
}

Paraphrase IdentityParaphraser::rewrite(std::string_view question) const {
  Paraphrase p;
  p.question = std::string(question);
  const std::size_t n = tokenize_question(question).size();
  for (std::size_t i = 0; i < n; ++i) p.alignment.emplace_back(i);
  return p;
}

PhraseTableParaphraser::PhraseTableParaphraser(
    std::vector<std::pair<std::string, std::string>> rules) {
  for (auto& [from, to] : rules) {
    auto words = question_words(from);
    if (words.empty()) throw Error(ErrorCode::kInvalidArgument, "empty paraphrase pattern");
    rules_.emplace_back(std::move(words), std::move(to));
  }
  std::stable_sort(rules_.begin(), rules_.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
}

PhraseTableParaphraser PhraseTableParaphraser::builtin() {
  return PhraseTableParaphraser({{"exist", "are there"},
                                 {"show me", "list"},
                                 {"what is", "tell me"},
                                 {"find", "give me"},
                                 {"display", "show"}});
}

Paraphrase PhraseTableParaphraser::rewrite(std::string_view question) const {
  const auto tokens = tokenize_question(question);
  Paraphrase p;
  p.alignment.assign(tokens.size(), std::nullopt);
  std::string out;
  std::size_t cursor = 0, produced = 0;
  for (std::size_t i = 0; i < tokens.size();) {
    const auto* rule = static_cast<const std::pair<std::vector<std::string>, std::string>*>(nullptr);
    for (const auto& r : rules_) {
      if (i + r.first.size() > tokens.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; k < r.first.size() && ok; ++k) ok = tokens[i + k].normalized == r.first[k];
      if (ok) {
        rule = &r;
        break;
      }
    }
    if (rule == nullptr) {
      out.append(question.substr(cursor, tokens[i].end - cursor));
      cursor = tokens[i].end;
      p.alignment[i] = produced++;
      ++i;
      continue;
    }
    out.append(question.substr(cursor, tokens[i].begin - cursor));
    std::string replacement = rule->second;
    if (!replacement.empty() && std::isupper(static_cast<unsigned char>(tokens[i].surface[0]))) {
      replacement[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement[0])));
    }
    out += replacement;
    produced += tokenize_question(replacement).size();
    cursor = tokens[i + rule->first.size() - 1].end;
    i += rule->first.size();
  }
  out.append(question.substr(cursor));
  p.question = std::move(out);
  if (tokenize_question(p.question).size() != produced) {
    p.alignment.assign(tokens.size(), std::nullopt);
  }
  return p;
}

UtranExample paraphrase(const UtranExample& example, const Paraphraser& paraphraser) {
  const Paraphrase p = paraphraser.rewrite(example.question);
  const auto old_tokens = tokenize_question(example.question);
  const auto new_tokens = tokenize_question(p.question);
  if (new_tokens.empty()) return example;
  UtranExample out = example;
  out.question = p.question;
  const std::size_t n = new_tokens.size();
  if (example.label.translatable()) return out;
  const bool whole = example.origin == UtranOrigin::kDropQuestion ||
                     example.label == SpanLabel{1, old_tokens.size()};
  if (whole) {
    out.label = {1, n};
    return out;
  }
  const std::size_t s = example.label.start - 1, e = example.label.end - 1;
  bool aligned = e < p.alignment.size();
  for (std::size_t i = s; aligned && i <= e; ++i) {
    aligned = p.alignment[i].has_value() && (i == s || *p.alignment[i] == *p.alignment[i - 1] + 1);
  }
  if (aligned) {
    out.label = {*p.alignment[s] + 1, *p.alignment[e] + 1};
    return out;
  }
  if (e < old_tokens.size()) {
    const std::size_t width = e - s + 1;
    for (std::size_t i = 0; i + width <= n; ++i) {
      bool ok = true;
      for (std::size_t k = 0; k < width && ok; ++k) {
        ok = new_tokens[i + k].normalized == old_tokens[s + k].normalized;
      }
      if (ok) {
        out.label = {i + 1, i + width};
        return out;
      }
    }
  }
  out.label = {1, n};
  return out;
}

void StyleClassifier::fit(const std::vector<UtranExample>& data) {
  std::unordered_map<std::string, std::size_t> vocab;
  std::vector<std::vector<std::size_t>> rows;
  std::vector<double> y;
  for (const auto& ex : data) {
    std::set<std::size_t> feats;
    for (const auto& w : question_words(ex.question)) {
      feats.insert(vocab.emplace(w, vocab.size()).first->second);
    }
    rows.emplace_back(feats.begin(), feats.end());
    y.push_back(ex.translatable() ? 0.0 : 1.0);
  }
  std::vector<double> w(vocab.size(), 0.0);
  double b = 0;
  const double n = std::max<double>(1.0, static_cast<double>(data.size()));
  for (std::size_t epoch = 0; epoch < options_.epochs && !data.empty(); ++epoch) {
    std::vector<double> gw(w.size(), 0.0);
    double gb = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      double z = b;
      for (std::size_t f : rows[r]) z += w[f];
      const double err = 1.0 / (1.0 + std::exp(-z)) - y[r];
      for (std::size_t f : rows[r]) gw[f] += err;
      gb += err;
    }
    for (std::size_t f = 0; f < w.size(); ++f) {
      w[f] -= options_.learning_rate * (gw[f] / n + options_.l2 * w[f]);
    }
    b -= options_.learning_rate * gb / n;
  }
  weights_.clear();
  for (const auto& [word, id] : vocab) weights_[word] = w[id];
  bias_ = b;
}

double StyleClassifier::probability(std::string_view question) const {
  double z = bias_;
  std::set<std::string> words;
  for (auto& w : question_words(question)) words.insert(std::move(w));
  for (const auto& w : words) {
    auto it = weights_.find(w);
    if (it != weights_.end()) z += it->second;
  }
  return 1.0 / (1.0 + std::exp(-z));
}

double StyleClassifier::accuracy(const std::vector<UtranExample>& data) const {
  if (data.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& ex : data) {
    const bool predicted_untranslatable = probability(ex.question) > 0.5;
    if (predicted_untranslatable == !ex.translatable()) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

std::vector<UtranExample> adversarial_filter(std::vector<UtranExample> pool,
                                             const Regenerator& regenerate,
                                             const FilterOptions& options,
                                             std::vector<std::size_t>* replaced_per_round) {
  for (std::size_t round = 0; round < options.rounds; ++round) {
    StyleClassifier classifier;
    classifier.fit(pool);
    std::size_t replaced = 0;
    for (auto& ex : pool) {
      if (ex.translatable() || !(classifier.probability(ex.question) > options.tau)) continue;
      std::optional<UtranExample> chosen;
      for (std::size_t attempt = 0; attempt < options.max_attempts; ++attempt) {
        auto candidate = regenerate ? regenerate(ex, attempt) : std::nullopt;
        if (!candidate || candidate->translatable()) continue;
        chosen = std::move(candidate);
        if (!(classifier.probability(chosen->question) > options.tau)) break;
      }
      if (!chosen) {
        throw Error(ErrorCode::kGeneratorExhausted,
                    "no replacement for '" + ex.question + "' after " +
                        std::to_string(options.max_attempts) + " attempts");
      }
      ex = std::move(*chosen);
      ++replaced;
    }
    if (replaced_per_round != nullptr) replaced_per_round->push_back(replaced);
  }
  return pool;
}

std::size_t untranslatable_target(std::size_t translatable_count, double ratio) {
  if (!(ratio >= 0.0 && ratio < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "ratio must be in [0, 1)");
  }
  return static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(translatable_count) / (1.0 - ratio)));
}

nlohmann::json example_json(const UtranExample& ex) {
  return {{"question", ex.question},
          {"db_id", ex.db_id},
          {"label", {{"start", ex.label.start}, {"end", ex.label.end}}},
          {"origin", origin_name(ex.origin)},
          {"source_question", ex.source_question},
          {"edit", ex.edit}};
}

UtranExample example_from_json(const nlohmann::json& j) {
  try {
    UtranExample ex;
    ex.question = j.at("question").get<std::string>();
    ex.db_id = j.value("db_id", "");
    ex.label = {j.at("label").at("start").get<std::size_t>(), j.at("label").at("end").get<std::size_t>()};
    ex.origin = parse_origin(j.value("origin", "original"));
    ex.source_question = j.value("source_question", ex.question);
    ex.edit = j.value("edit", "");
    return ex;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidDocument, std::string("bad dataset record: ") + e.what());
  }
}

void write_dataset(const std::vector<UtranExample>& examples, std::ostream& out) {
  for (const auto& ex : examples) out << example_json(ex).dump() << "\n";
  if (!out) throw Error(ErrorCode::kIOFailure, "dataset write failed");
}

void write_dataset(const std::vector<UtranExample>& examples, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIOFailure, "cannot write " + path.string());
  write_dataset(examples, out);
}

std::vector<UtranExample> read_dataset(std::istream& in) {
  std::vector<UtranExample> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidDocument, std::string("bad dataset line: ") + e.what());
    }
    out.push_back(example_from_json(j));
  }
  return out;
}

std::vector<UtranExample> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIOFailure, "cannot read " + path.string());
  return read_dataset(in);
}

std::vector<UtranExample> forge_dataset(const std::map<std::string, DatabaseSchema>& schemas,
                                        const std::vector<SourceExample>& sources,
                                        const ForgeOptions& options) {
  std::mt19937_64 rng(options.seed);
  const IdentityParaphraser identity;
  const Paraphraser& paraphraser =
      options.paraphraser ? *options.paraphraser : static_cast<const Paraphraser&>(identity);
  std::vector<const DatabaseSchema*> pool;
  for (const auto& [id, s] : schemas) pool.push_back(&s);

  std::vector<const SourceExample*> usable;
  for (const auto& src : sources) {
    auto it = schemas.find(src.db_id);
    if (it == schemas.end() || !check(src.sql, it->second).empty()) continue;
    usable.push_back(&src);
  }
  std::vector<UtranExample> originals;
  for (const SourceExample* src : usable) {
    originals.push_back({src->question, src->db_id, UtranOrigin::kOriginal, {}, src->question, ""});
  }

  auto synthesize = [&](const SourceExample& src) -> std::optional<UtranExample> {
    const DatabaseSchema& schema = schemas.at(src.db_id);
    const std::size_t first = rng() % 3;
    const std::size_t choice = rng() % 16;
    for (std::size_t k = 0; k < 3; ++k) {
      try {
        switch ((first + k) % 3) {
          case 0: return paraphrase(swap_question(src.question, src.sql, schema, pool, rng, choice), paraphraser);
          case 1: return paraphrase(drop_question(src.question, src.sql, schema, choice), paraphraser);
          default: {
            std::vector<FieldId> fields;
            for (const auto& s : link_field_spans(src.question, src.sql, schema)) {
              if (s.field && droppable(schema, *s.field)) fields.push_back(*s.field);
            }
            if (fields.empty()) continue;
            return paraphrase(drop_schema(src.question, src.sql, schema, fields[choice % fields.size()]).example,
                              paraphraser);
          }
        }
      } catch (const Error&) {
      }
    }
    return std::nullopt;
  };

  const std::size_t target = untranslatable_target(originals.size(), options.ratio);
  std::vector<UtranExample> synthetic;
  std::set<std::pair<std::string, std::string>> seen;
  if (!usable.empty()) {
    const std::size_t budget = 8 * target + 64;
    for (std::size_t attempt = 0; attempt < budget && synthetic.size() < target; ++attempt) {
      const SourceExample& src = *usable[rng() % usable.size()];
      auto ex = synthesize(src);
      if (!ex || !seen.insert({ex->db_id, ex->question}).second) continue;
      synthetic.push_back(std::move(*ex));
    }
  }
  std::shuffle(originals.begin(), originals.end(), rng);
  if (synthetic.size() < target && options.ratio > 0) {
    const auto keep = static_cast<std::size_t>(std::llround(
        static_cast<double>(synthetic.size()) * (1.0 - options.ratio) / options.ratio));
    originals.resize(std::min(originals.size(), keep));
  }

  std::vector<UtranExample> all = std::move(originals);
  all.insert(all.end(), synthetic.begin(), synthetic.end());
  Regenerator regen = [&](const UtranExample&, std::size_t) -> std::optional<UtranExample> {
    if (usable.empty()) return std::nullopt;
    std::optional<UtranExample> repeat;
    for (std::size_t k = 0; k < 8; ++k) {
      auto ex = synthesize(*usable[rng() % usable.size()]);
      if (ex && seen.insert({ex->db_id, ex->question}).second) return ex;
      if (ex && !repeat) repeat = std::move(ex);
    }
    return repeat;
  };
  all = adversarial_filter(std::move(all), regen, options.filter);
  std::shuffle(all.begin(), all.end(), rng);
  return all;
}

}  // namespace nlidb
