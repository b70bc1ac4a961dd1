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

#include <algorithm>
#include <cctype>

#include "nlidb/decoder.h"
#include "nlidb/error.h"
#include "nlidb/sql.h"

namespace nlidb {
namespace {

constexpr std::size_t kKeywordSlots = 70;

std::vector<std::string> build_vocab() {
  std::vector<std::string> v = {
      "SELECT", "DISTINCT", "COUNT", "SUM", "AVG", "MIN", "MAX", "FROM",
      "JOIN", "ON", "AS", "WHERE", "AND", "OR", "NOT", "IN",
      "LIKE", "BETWEEN", "GROUP", "BY", "HAVING", "ORDER", "ASC", "DESC",
      "LIMIT", "INTERSECT", "UNION", "EXCEPT", "=", "!=", "<", "<=",
      ">", ">=", "(", ")", ",", ".", "*", "'",
      "-", "%", "EOS"};
  for (int k = 0; v.size() < kKeywordSlots; ++k) v.push_back("[unused " + std::to_string(k) + "]");
  for (char d = '0'; d <= '9'; ++d) v.emplace_back(1, d);
  return v;
}

[[noreturn]] void malformed(const std::string& message) {
  throw Error(ErrorCode::kMalformedActionSequence, message);
}

bool is_digit_token(std::string_view t) {
  return t.size() == 1 && std::isdigit(static_cast<unsigned char>(t[0]));
}

bool is_word_token(std::string_view t) {
  return !t.empty() && std::isalpha(static_cast<unsigned char>(t[0]));
}

std::string join_literal_pieces(const std::vector<std::string>& pieces) {
  std::string out;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (i > 0 && pieces[i] != "%" && pieces[i - 1] != "%") out.push_back(' ');
    out += pieces[i];
  }
  return out;
}

}  // namespace

const std::vector<std::string>& reserved_vocab() {
  static const std::vector<std::string> kVocab = build_vocab();
  return kVocab;
}

std::optional<int> reserved_id(std::string_view token) {
  const auto& v = reserved_vocab();
  auto it = std::find(v.begin(), v.end(), token);
  if (it == v.end()) return std::nullopt;
  return static_cast<int>(it - v.begin());
}

int eos_id() {
  static const int kEos = *reserved_id("EOS");
  return kEos;
}

Action Action::generate(std::string_view token) {
  auto id = reserved_id(token);
  if (!id) throw Error(ErrorCode::kInvalidArgument, "'" + std::string(token) + "' is not reserved");
  return generate(*id);
}

std::string action_text(const Action& action, const InputEncoding& encoding,
                        const DatabaseSchema& schema) {
  switch (action.kind) {
    case Action::Kind::kGenerate:
      return reserved_vocab().at(static_cast<std::size_t>(action.value));
    case Action::Kind::kCopyQuestion:
      return encoding.question.at(static_cast<std::size_t>(action.value)).surface;
    case Action::Kind::kCopyTable:
      return schema.table(TableId{action.value}).canonical_name;
    case Action::Kind::kCopyField:
      return schema.qualified_name(FieldId{action.value});
  }
  return {};
}

ActionSpace::ActionSpace(const InputEncoding& encoding)
    : question_length_(encoding.question_length()) {
  for (const auto& [tid, pos] : encoding.table_marker_positions) {
    table_slot_[tid] = tables_.size();
    tables_.push_back(tid);
  }
  for (const auto& [fid, pos] : encoding.field_marker_positions) {
    field_slot_[fid] = fields_.size();
    fields_.push_back(fid);
  }
}

std::size_t ActionSpace::size() const {
  return kReservedVocabSize + question_length_ + tables_.size() + fields_.size();
}

bool ActionSpace::legal(const Action& a) const {
  switch (a.kind) {
    case Action::Kind::kGenerate:
      return a.value >= 0 && static_cast<std::size_t>(a.value) < kReservedVocabSize;
    case Action::Kind::kCopyQuestion:
      return a.value >= 0 && static_cast<std::size_t>(a.value) < question_length_;
    case Action::Kind::kCopyTable: return table_slot_.contains(TableId{a.value});
    case Action::Kind::kCopyField: return field_slot_.contains(FieldId{a.value});
  }
  return false;
}

std::size_t ActionSpace::index(const Action& a) const {
  if (!legal(a)) throw Error(ErrorCode::kOutOfBounds, "action outside the action space");
  switch (a.kind) {
    case Action::Kind::kGenerate: return static_cast<std::size_t>(a.value);
    case Action::Kind::kCopyQuestion: return kReservedVocabSize + static_cast<std::size_t>(a.value);
    case Action::Kind::kCopyTable:
      return kReservedVocabSize + question_length_ + table_slot_.at(TableId{a.value});
    case Action::Kind::kCopyField:
      return kReservedVocabSize + question_length_ + tables_.size() +
             field_slot_.at(FieldId{a.value});
  }
  return 0;
}

Action ActionSpace::at(std::size_t i) const {
  if (i < kReservedVocabSize) return Action::generate(static_cast<int>(i));
  i -= kReservedVocabSize;
  if (i < question_length_) return Action::copy_question(i);
  i -= question_length_;
  if (i < tables_.size()) return Action::copy_table(tables_[i]);
  i -= tables_.size();
  if (i < fields_.size()) return Action::copy_field(fields_[i]);
  throw Error(ErrorCode::kOutOfBounds, "action index out of range");
}

std::string actions_to_sql(const std::vector<Action>& actions, const InputEncoding& encoding,
                           const DatabaseSchema& schema) {
  const ActionSpace space(encoding);
  std::vector<SqlToken> out;
  std::string number;
  std::vector<std::string> pieces;
  bool in_string = false;
  bool finished = false;
  auto emit = [&](SqlToken::Kind kind, std::string text) {
    SqlToken t;
    t.kind = kind;
    t.text = std::move(text);
    out.push_back(std::move(t));
  };
  auto flush_number = [&] {
    if (!number.empty()) emit(SqlToken::Kind::kNumber, std::move(number));
    number.clear();
  };
  for (const Action& a : actions) {
    if (finished) malformed("actions after EOS");
    if (!space.legal(a)) malformed("illegal action");
    switch (a.kind) {
      case Action::Kind::kGenerate: {
        const std::string& tok = reserved_vocab()[static_cast<std::size_t>(a.value)];
        if (tok.starts_with("[unused")) malformed("unused vocabulary slot " + tok);
        if (a.is_eos()) {
          if (in_string) malformed("dangling quote");
          flush_number();
          finished = true;
        } else if (in_string) {
          if (tok == "'") {
            emit(SqlToken::Kind::kString, join_literal_pieces(pieces));
            pieces.clear();
            in_string = false;
          } else {
            pieces.push_back(tok);
          }
        } else if (tok == "'") {
          flush_number();
          in_string = true;
        } else if (is_digit_token(tok) || (tok == "." && !number.empty() && number != "-")) {
          number += tok;
        } else if (tok == "-") {
          flush_number();
          number = "-";
        } else {
          flush_number();
          emit(is_word_token(tok) ? SqlToken::Kind::kKeyword : SqlToken::Kind::kPunct, tok);
        }
        break;
      }
      case Action::Kind::kCopyQuestion: {
        const std::string& surface = encoding.question[static_cast<std::size_t>(a.value)].surface;
        if (in_string) {
          pieces.push_back(surface);
        } else if (number == "-") {
          number += surface;
          flush_number();
        } else {
          flush_number();
          emit(SqlToken::Kind::kNumber, surface);
        }
        break;
      }
      case Action::Kind::kCopyTable:
        if (in_string) malformed("schema copy inside a string literal");
        flush_number();
        emit(SqlToken::Kind::kTable, schema.table(TableId{a.value}).canonical_name);
        break;
      case Action::Kind::kCopyField: {
        if (in_string) malformed("schema copy inside a string literal");
        flush_number();
        const Field& f = schema.field(FieldId{a.value});
        SqlToken t;
        t.kind = SqlToken::Kind::kColumn;
        t.table = schema.table(f.table_id).canonical_name;
        t.column = f.canonical_name;
        t.text = t.table + "." + t.column;
        out.push_back(std::move(t));
        break;
      }
    }
  }
  if (!finished) malformed(in_string ? "dangling quote" : "missing EOS");
  return render_sql_tokens(out);
}

std::vector<Action> sql_to_actions(const SqlQuery& gold, const InputEncoding& encoding,
                                   const DatabaseSchema& schema) {
  SqlQuery q = gold;
  qualify_columns(q, schema);
  const auto& question = encoding.question;
  std::vector<Action> actions;
  auto generate_chars = [&](const std::string& text) {
    for (char c : text) {
      auto id = reserved_id(std::string(1, c));
      if (!id) throw Error(ErrorCode::kUncopyableLiteral, "cannot generate '" + text + "'");
      actions.push_back(Action::generate(*id));
    }
  };
  for (const SqlToken& t : sql_tokens(q)) {
    switch (t.kind) {
      case SqlToken::Kind::kKeyword:
      case SqlToken::Kind::kPunct:
        actions.push_back(Action::generate(t.text));
        break;
      case SqlToken::Kind::kTable: {
        const Table* table = schema.find_table(t.text);
        if (table == nullptr) throw Error(ErrorCode::kInvalidArgument, "unknown table '" + t.text + "'");
        actions.push_back(Action::copy_table(table->table_id));
        break;
      }
      case SqlToken::Kind::kColumn: {
        const Field* f = t.table.empty() ? nullptr : schema.find_field(t.table, t.column);
        if (f == nullptr) throw Error(ErrorCode::kInvalidArgument, "unknown column '" + t.text + "'");
        actions.push_back(Action::copy_field(f->field_id));
        break;
      }
      case SqlToken::Kind::kNumber: {
        auto it = std::find_if(question.begin(), question.end(),
                               [&](const QuestionToken& qt) { return qt.surface == t.text; });
        if (it != question.end()) {
          actions.push_back(Action::copy_question(static_cast<std::size_t>(it - question.begin())));
        } else {
          generate_chars(t.text);
        }
        break;
      }
      case SqlToken::Kind::kString: {
        std::string_view inner = t.text;
        std::size_t lead = 0, trail = 0;
        while (!inner.empty() && inner.front() == '%') {
          inner.remove_prefix(1);
          ++lead;
        }
        while (!inner.empty() && inner.back() == '%') {
          inner.remove_suffix(1);
          ++trail;
        }
        actions.push_back(Action::generate("'"));
        for (std::size_t k = 0; k < lead; ++k) actions.push_back(Action::generate("%"));
        if (!inner.empty()) {
          bool found = false;
          for (std::size_t i = 0; i < question.size() && !found; ++i) {
            std::string text;
            for (std::size_t j = i; j < question.size() && text.size() < inner.size(); ++j) {
              if (j > i) text.push_back(' ');
              text += question[j].surface;
              if (text == inner) {
                for (std::size_t k = i; k <= j; ++k) actions.push_back(Action::copy_question(k));
                found = true;
                break;
              }
            }
          }
          if (!found) {
            throw Error(ErrorCode::kUncopyableLiteral,
                        "literal '" + t.text + "' does not occur in the question");
          }
        }
        for (std::size_t k = 0; k < trail; ++k) actions.push_back(Action::generate("%"));
        actions.push_back(Action::generate("'"));
        break;
      }
    }
  }
  actions.push_back(Action::generate(eos_id()));
  return actions;
}

}  // namespace nlidb
