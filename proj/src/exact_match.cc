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
#include <set>

#include "nlidb/sql.h"

namespace nlidb {
namespace {

// Each clause is reduced to a canonical string; unordered collections are
// rendered as sorted sets so equality of strings is clause-wise set equality.
class Canonicalizer {
 public:
  explicit Canonicalizer(bool with_values) : with_values_(with_values) {}

  std::string query(const SqlQuery& q) const {
    std::string out = "{select:";
    out += q.select.distinct ? "D" : "-";
    std::set<std::string> items;
    for (const auto& item : q.select.items) {
      items.insert(target(item.aggregate, item.distinct, item.target));
    }
    out += set(items);

    std::set<std::string> tables(q.from.tables.begin(), q.from.tables.end());
    out += "from:" + set(std::set<std::string>(tables));
    std::set<std::string> joins;
    for (const auto& jc : q.from.joins) {
      std::string a = column(jc.left);
      std::string b = column(jc.right);
      if (b < a) std::swap(a, b);
      joins.insert(a + "=" + b);
    }
    out += "on:" + set(joins);

    out += "where:" + (q.where ? condition(*q.where) : std::string("-"));
    std::set<std::string> groups;
    for (const auto& g : q.group_by) groups.insert(column(g));
    out += "group:" + set(groups);
    out += "having:" + (q.having ? condition(*q.having) : std::string("-"));

    out += "order:[";
    for (const auto& key : q.order_by.keys) {
      out += target(key.aggregate, false, key.column);
      out += key.descending ? " desc;" : " asc;";
    }
    out += "]limit:";
    if (!q.order_by.limit) {
      out += "-";
    } else {
      out += with_values_ ? std::to_string(*q.order_by.limit) : std::string("V");
    }
    out += "setop:";
    if (q.set_op) {
      out += std::string(set_op_keyword(q.set_op->kind)) + query(*q.set_op->right);
    } else {
      out += "-";
    }
    return out + "}";
  }

 private:
  static std::string set(const std::set<std::string>& items) {
    std::string out = "{";
    for (const auto& s : items) out += s + ";";
    return out + "}";
  }

  static std::string column(const ColumnRef& ref) {
    return ref.table.value_or("") + "." + ref.column;
  }

  static std::string target(const std::optional<Aggregate>& agg, bool distinct,
                            const ColumnRef& ref) {
    if (!agg) return column(ref);
    return std::string(aggregate_keyword(*agg)) + (distinct ? "(D " : "(") +
           column(ref) + ")";
  }

  std::string operand(const Operand& op) const {
    if (const auto* lit = std::get_if<Literal>(&op)) {
      if (!with_values_) return "V";
      if (lit->kind == Literal::Kind::kNumber) return "N" + format_number(lit->number);
      return "S" + std::to_string(lit->text.size()) + ":" + lit->text;
    }
    return "Q" + query(*std::get<Box<SqlQuery>>(op));
  }

  std::string condition(const Condition& c) const {
    if (c.kind == Condition::Kind::kPredicate) {
      const Predicate& p = c.predicate;
      std::string out = "P(" + target(p.aggregate, false, p.column) + " " +
                        std::string(compare_op_text(p.op)) + " " + operand(p.value);
      if (p.upper) out += " " + operand(*p.upper);
      return out + ")";
    }
    std::set<std::string> children;
    for (const auto& child : c.children) children.insert(condition(child));
    return (c.kind == Condition::Kind::kAnd ? "AND" : "OR") + set(children);
  }

  bool with_values_;
};

}  // namespace

bool exact_set_match(const SqlQuery& predicted, const SqlQuery& gold,
                     bool with_values) {
  const Canonicalizer canon(with_values);
  return canon.query(predicted) == canon.query(gold);
}

}  // namespace nlidb
