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

#include "nlidb/static_checker.h"

#include <algorithm>

#include "nlidb/error.h"
#include "nlidb/sql.h"

namespace nlidb {
namespace {

using Rule = Violation::Rule;

class Checker {
 public:
  Checker(const DatabaseSchema& schema, const CheckOptions& options)
      : schema_(schema), options_(options) {}

  std::vector<Violation> take() { return std::move(out_); }

  void block(const SqlQuery& q, const std::string& path) {
    std::vector<std::string> scope;
    for (std::size_t i = 0; i < q.from.tables.size(); ++i) {
      const std::string& name = q.from.tables[i];
      if (schema_.find_table(name) == nullptr) {
        report(Rule::kUnknownName, path + "from.tables[" + std::to_string(i) + "]",
               "unknown table '" + name + "'");
      }
      scope.push_back(name);
    }

    for (std::size_t i = 0; i < q.select.items.size(); ++i) {
      ref(q.select.items[i].target, scope, Rule::kSelectScope, true,
          path + "select[" + std::to_string(i) + "]");
    }

    for (std::size_t i = 0; i < q.from.joins.size(); ++i) {
      const JoinCondition& jc = q.from.joins[i];
      const std::size_t end = std::min(jc.position + 1, scope.size());
      const std::vector<std::string> visible(scope.begin(), scope.begin() + end);
      const std::string where = path + "from.join[" + std::to_string(i) + "]";
      ref(jc.left, visible, Rule::kJoinOrder, true, where);
      ref(jc.right, visible, Rule::kJoinOrder, true, where);
    }

    const bool scoped = !options_.strict_paper_rules;
    std::size_t predicate_index = 0;
    if (q.where) condition(*q.where, scope, scoped, path + "where", predicate_index);
    for (std::size_t i = 0; i < q.group_by.size(); ++i) {
      ref(q.group_by[i], scope, Rule::kSelectScope, scoped,
          path + "group_by[" + std::to_string(i) + "]");
    }
    predicate_index = 0;
    if (q.having) condition(*q.having, scope, scoped, path + "having", predicate_index);
    for (std::size_t i = 0; i < q.order_by.keys.size(); ++i) {
      ref(q.order_by.keys[i].column, scope, Rule::kSelectScope, scoped,
          path + "order_by[" + std::to_string(i) + "]");
    }
    if (q.set_op) block(*q.set_op->right, path + "set_op.");
  }

 private:
  void report(Rule rule, std::string location, std::string message) {
    out_.push_back(Violation{rule, std::move(location), std::move(message)});
  }

  bool in(const std::vector<std::string>& scope, const std::string& table) const {
    return std::find(scope.begin(), scope.end(), table) != scope.end();
  }

  void ref(const ColumnRef& r, const std::vector<std::string>& scope, Rule scope_rule,
           bool enforce_scope, const std::string& location) {
    const std::string shown = r.table ? *r.table + "." + r.column : r.column;
    if (r.table) {
      const Table* table = schema_.find_table(*r.table);
      if (table == nullptr) {
        report(Rule::kUnknownName, location, "unknown table '" + *r.table + "'");
        return;
      }
      if (!r.is_star() && schema_.find_field(table->table_id, r.column) == nullptr) {
        report(Rule::kUnknownName, location, "unknown column '" + shown + "'");
        return;
      }
      if (enforce_scope && !in(scope, *r.table)) {
        report(scope_rule, location, out_of_scope(shown, scope_rule));
      }
      return;
    }
    if (r.is_star()) return;
    for (const auto& name : scope) {
      if (schema_.find_field(name, r.column) != nullptr) return;
    }
    const bool exists = std::any_of(
        schema_.fields.begin(), schema_.fields.end(),
        [&](const Field& f) { return f.canonical_name == r.column; });
    if (!exists) {
      report(Rule::kUnknownName, location, "unknown column '" + shown + "'");
    } else if (enforce_scope) {
      report(scope_rule, location, out_of_scope(shown, scope_rule));
    }
  }

  static std::string out_of_scope(const std::string& shown, Rule rule) {
    if (rule == Rule::kJoinOrder) {
      return "'" + shown + "' refers to a table not joined before this condition";
    }
    return "'" + shown + "' does not come from a table in the FROM clause";
  }

  void operand(const Operand& op, const std::string& location) {
    if (const auto* sub = std::get_if<Box<SqlQuery>>(&op)) {
      block(**sub, location + ".subquery.");
    }
  }

  void condition(const Condition& c, const std::vector<std::string>& scope,
                 bool enforce_scope, const std::string& path, std::size_t& index) {
    if (c.kind == Condition::Kind::kPredicate) {
      const std::string location = path + "[" + std::to_string(index++) + "]";
      ref(c.predicate.column, scope, Rule::kSelectScope, enforce_scope, location);
      operand(c.predicate.value, location);
      if (c.predicate.upper) operand(*c.predicate.upper, location);
      return;
    }
    for (const auto& child : c.children) {
      condition(child, scope, enforce_scope, path, index);
    }
  }

  const DatabaseSchema& schema_;
  const CheckOptions& options_;
  std::vector<Violation> out_;
};

}  // namespace

std::string_view rule_name(Violation::Rule rule) {
  switch (rule) {
    case Rule::kSyntax: return "SYNTAX";
    case Rule::kSelectScope: return "SELECT_SCOPE";
    case Rule::kJoinOrder: return "JOIN_ORDER";
    case Rule::kUnknownName: return "UNKNOWN_NAME";
  }
  return "SYNTAX";
}

std::vector<Violation> check(const SqlQuery& query, const DatabaseSchema& schema,
                             const CheckOptions& options) {
  Checker checker(schema, options);
  checker.block(query, "");
  return checker.take();
}

std::vector<Violation> check(std::string_view query_text,
                             const DatabaseSchema& schema,
                             const CheckOptions& options) {
  SqlQuery query;
  try {
    query = parse_sql(query_text);
  } catch (const SyntaxError& e) {
    return {Violation{Rule::kSyntax, "offset " + std::to_string(e.offset()), e.what()}};
  }
  return check(query, schema, options);
}

std::optional<BeamChoice> filter_beam(const std::vector<std::string>& candidates,
                                      const DatabaseSchema& schema,
                                      const CheckOptions& options) {
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    SqlQuery query;
    try {
      query = parse_sql(candidates[i]);
    } catch (const SyntaxError&) {
      continue;
    }
    if (check(query, schema, options).empty()) {
      return BeamChoice{std::move(query), i + 1};
    }
  }
  return std::nullopt;
}

}  // namespace nlidb
