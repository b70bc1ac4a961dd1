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
#include <charconv>
#include <cmath>
#include <set>

#include "nlidb/sql.h"
#include "nlidb/text.h"

namespace nlidb {
namespace {

class TokenWriter {
 public:
  std::vector<SqlToken> take() { return std::move(out_); }

  void keyword(std::string_view kw) { push(SqlToken::Kind::kKeyword, kw); }
  void punct(std::string_view p) { push(SqlToken::Kind::kPunct, p); }

  void table(const std::string& name) { push(SqlToken::Kind::kTable, name); }

  void column(const ColumnRef& ref) {
    if (ref.is_star()) {
      if (ref.table) {
        table(*ref.table);
        punct(".");
      }
      punct("*");
      return;
    }
    SqlToken t;
    t.kind = SqlToken::Kind::kColumn;
    t.table = ref.table.value_or("");
    t.column = ref.column;
    t.text = t.table.empty() ? t.column : t.table + "." + t.column;
    out_.push_back(std::move(t));
  }

  void literal(const Literal& lit) {
    if (lit.kind == Literal::Kind::kNumber) {
      push(SqlToken::Kind::kNumber, format_number(lit.number));
    } else {
      push(SqlToken::Kind::kString, lit.text);
    }
  }

  void target(const std::optional<Aggregate>& agg, bool distinct,
              const ColumnRef& ref) {
    if (!agg) {
      column(ref);
      return;
    }
    keyword(aggregate_keyword(*agg));
    punct("(");
    if (distinct) keyword("DISTINCT");
    column(ref);
    punct(")");
  }

  void operand(const Operand& op) {
    if (const auto* lit = std::get_if<Literal>(&op)) {
      literal(*lit);
    } else {
      punct("(");
      query(*std::get<Box<SqlQuery>>(op));
      punct(")");
    }
  }

  void predicate(const Predicate& p) {
    target(p.aggregate, false, p.column);
    switch (p.op) {
      case CompareOp::kLike: keyword("LIKE"); break;
      case CompareOp::kIn: keyword("IN"); break;
      case CompareOp::kNotIn:
        keyword("NOT");
        keyword("IN");
        break;
      case CompareOp::kBetween: keyword("BETWEEN"); break;
      default: punct(compare_op_text(p.op)); break;
    }
    operand(p.value);
    if (p.op == CompareOp::kBetween && p.upper) {
      keyword("AND");
      operand(*p.upper);
    }
  }

  void condition(const Condition& c) {
    if (c.kind == Condition::Kind::kPredicate) {
      predicate(c.predicate);
      return;
    }
    const bool is_and = c.kind == Condition::Kind::kAnd;
    for (std::size_t i = 0; i < c.children.size(); ++i) {
      if (i > 0) keyword(is_and ? "AND" : "OR");
      const Condition& child = c.children[i];
      const bool wrap = is_and && child.kind == Condition::Kind::kOr;
      if (wrap) punct("(");
      condition(child);
      if (wrap) punct(")");
    }
  }

  template <typename T, typename F>
  void comma_list(const std::vector<T>& items, F&& emit) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i > 0) punct(",");
      emit(items[i]);
    }
  }

  void query(const SqlQuery& q) {
    keyword("SELECT");
    if (q.select.distinct) keyword("DISTINCT");
    comma_list(q.select.items, [this](const SelectItem& item) {
      target(item.aggregate, item.distinct, item.target);
    });
    keyword("FROM");
    for (std::size_t i = 0; i < q.from.tables.size(); ++i) {
      if (i > 0) keyword("JOIN");
      table(q.from.tables[i]);
      bool first = true;
      for (const auto& jc : q.from.joins) {
        const std::size_t pos = std::max<std::size_t>(jc.position, 1);
        if (pos != i) continue;
        keyword(first ? "ON" : "AND");
        first = false;
        column(jc.left);
        punct("=");
        column(jc.right);
      }
    }
    if (q.where) {
      keyword("WHERE");
      condition(*q.where);
    }
    if (!q.group_by.empty()) {
      keyword("GROUP");
      keyword("BY");
      comma_list(q.group_by, [this](const ColumnRef& ref) { column(ref); });
    }
    if (q.having) {
      keyword("HAVING");
      condition(*q.having);
    }
    if (!q.order_by.keys.empty()) {
      keyword("ORDER");
      keyword("BY");
      comma_list(q.order_by.keys, [this](const OrderKey& key) {
        target(key.aggregate, false, key.column);
        keyword(key.descending ? "DESC" : "ASC");
      });
    }
    if (q.order_by.limit) {
      keyword("LIMIT");
      push(SqlToken::Kind::kNumber, std::to_string(*q.order_by.limit));
    }
    if (q.set_op) {
      keyword(set_op_keyword(q.set_op->kind));
      query(*q.set_op->right);
    }
  }

 private:
  void push(SqlToken::Kind kind, std::string_view text) {
    SqlToken t;
    t.kind = kind;
    t.text = std::string(text);
    out_.push_back(std::move(t));
  }

  std::vector<SqlToken> out_;
};

bool plain_identifier(std::string_view name) {
  if (name.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) return false;
  for (char c : name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    if (std::isupper(static_cast<unsigned char>(c))) return false;
  }
  static const std::set<std::string, std::less<>> kReserved = {
      "select", "from", "where", "group", "by", "having", "order", "limit",
      "union", "intersect", "except", "join", "on", "as", "and", "or", "not",
      "in", "like", "between", "distinct", "asc", "desc"};
  return !kReserved.contains(name);
}

std::string quote_identifier(std::string_view name) {
  if (plain_identifier(name)) return std::string(name);
  return "`" + std::string(name) + "`";
}

std::string render_token(const SqlToken& t) {
  switch (t.kind) {
    case SqlToken::Kind::kTable: return quote_identifier(t.text);
    case SqlToken::Kind::kColumn:
      return t.table.empty() ? quote_identifier(t.column)
                             : quote_identifier(t.table) + "." + quote_identifier(t.column);
    case SqlToken::Kind::kString: {
      std::string out = "'";
      for (char c : t.text) {
        if (c == '\'') out.push_back('\'');
        out.push_back(c);
      }
      out.push_back('\'');
      return out;
    }
    default: return t.text;
  }
}

bool is_aggregate_keyword(const SqlToken& t) {
  if (t.kind != SqlToken::Kind::kKeyword) return false;
  return t.text == "COUNT" || t.text == "SUM" || t.text == "AVG" ||
         t.text == "MIN" || t.text == "MAX";
}

bool is_punct(const SqlToken& t, std::string_view p) {
  return t.kind == SqlToken::Kind::kPunct && t.text == p;
}

// Unqualified references resolve against the FROM tables of their own block.
void qualify_ref(ColumnRef& ref, const FromClause& from, const DatabaseSchema& schema) {
  if (ref.table || ref.is_star()) return;
  for (const auto& name : from.tables) {
    if (schema.find_field(name, ref.column) != nullptr) {
      ref.table = name;
      return;
    }
  }
}

void qualify_operand(Operand& op, const DatabaseSchema& schema);

void qualify_condition(Condition& c, const FromClause& from,
                       const DatabaseSchema& schema) {
  if (c.kind == Condition::Kind::kPredicate) {
    qualify_ref(c.predicate.column, from, schema);
    qualify_operand(c.predicate.value, schema);
    if (c.predicate.upper) qualify_operand(*c.predicate.upper, schema);
    return;
  }
  for (auto& child : c.children) qualify_condition(child, from, schema);
}

void qualify_operand(Operand& op, const DatabaseSchema& schema) {
  if (auto* sub = std::get_if<Box<SqlQuery>>(&op)) qualify_columns(**sub, schema);
}

}  // namespace

std::vector<SqlToken> sql_tokens(const SqlQuery& query) {
  TokenWriter writer;
  writer.query(query);
  return writer.take();
}

std::string render_sql_tokens(const std::vector<SqlToken>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const SqlToken& t = tokens[i];
    if (i > 0) {
      const SqlToken& prev = tokens[i - 1];
      const bool tight = is_punct(t, ",") || is_punct(t, ")") || is_punct(prev, "(") ||
                         is_punct(t, ".") || is_punct(prev, ".") ||
                         (is_punct(t, "(") && is_aggregate_keyword(prev));
      if (!tight) out.push_back(' ');
    }
    out.append(render_token(t));
  }
  return out;
}

std::string format_sql(const SqlQuery& query) {
  return render_sql_tokens(sql_tokens(query));
}

std::string format_number(double value) {
  if (std::isfinite(value) && value == std::floor(value) && std::fabs(value) < 1e15) {
    return std::to_string(static_cast<long long>(value));
  }
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void qualify_columns(SqlQuery& query, const DatabaseSchema& schema) {
  const FromClause& from = query.from;
  for (auto& item : query.select.items) qualify_ref(item.target, from, schema);
  for (auto& jc : query.from.joins) {
    qualify_ref(jc.left, from, schema);
    qualify_ref(jc.right, from, schema);
  }
  if (query.where) qualify_condition(*query.where, from, schema);
  for (auto& g : query.group_by) qualify_ref(g, from, schema);
  if (query.having) qualify_condition(*query.having, from, schema);
  for (auto& k : query.order_by.keys) qualify_ref(k.column, from, schema);
  if (query.set_op) qualify_columns(*query.set_op->right, schema);
}

}  // namespace nlidb
