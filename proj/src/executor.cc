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

#include "nlidb/executor.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "nlidb/error.h"
#include "nlidb/sql.h"
#include "nlidb/text.h"

namespace nlidb {
namespace {

[[noreturn]] void exec_error(const std::string& message) {
  throw Error(ErrorCode::kExecutionError, message);
}

std::optional<double> parse_number(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_boolean(std::string_view text) {
  const std::string t = to_lower(text);
  if (t == "1" || t == "true" || t == "t" || t == "yes" || t == "y") return 1.0;
  if (t == "0" || t == "false" || t == "f" || t == "no" || t == "n") return 0.0;
  return std::nullopt;
}

bool is_numeric_type(FieldType t) {
  return t == FieldType::kNumber || t == FieldType::kBoolean;
}

// Total order for sorting, MIN/MAX and keys: NULL < number < text.
int order_compare(const Value& a, const Value& b) {
  if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
  if (const auto* x = std::get_if<double>(&a)) {
    const double y = std::get<double>(b);
    return *x < y ? -1 : (*x > y ? 1 : 0);
  }
  if (const auto* x = std::get_if<std::string>(&a)) {
    const int c = x->compare(std::get<std::string>(b));
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  return 0;
}

// Predicate comparison; nullopt means the comparison is not true for any
// operator (NULL involved, or text that is not a number against a number).
std::optional<int> predicate_compare(const Value& lhs, const Value& rhs) {
  if (is_null(lhs) || is_null(rhs)) return std::nullopt;
  if (lhs.index() == rhs.index()) return order_compare(lhs, rhs);
  if (const auto* x = std::get_if<double>(&lhs)) {
    auto y = parse_number(std::get<std::string>(rhs));
    if (!y) exec_error("cannot compare a number with '" + std::get<std::string>(rhs) + "'");
    return *x < *y ? -1 : (*x > *y ? 1 : 0);
  }
  auto x = parse_number(std::get<std::string>(lhs));
  if (!x) return std::nullopt;
  const double y = std::get<double>(rhs);
  return *x < y ? -1 : (*x > y ? 1 : 0);
}

bool like_match(std::string_view text, std::string_view pattern) {
  // Iterative wildcard match with backtracking on the last '%'.
  std::size_t t = 0, p = 0, star_p = std::string_view::npos, star_t = 0;
  auto eq = [](char a, char b) {
    return std::tolower(static_cast<unsigned char>(a)) ==
           std::tolower(static_cast<unsigned char>(b));
  };
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '_' || (pattern[p] != '%' && eq(pattern[p], text[t])))) {
      ++t;
      ++p;
    } else if (p < pattern.size() && pattern[p] == '%') {
      star_p = p++;
      star_t = t;
    } else if (star_p != std::string_view::npos) {
      p = star_p + 1;
      t = ++star_t;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '%') ++p;
  return p == pattern.size();
}

Value literal_value(const Literal& lit) {
  if (lit.kind == Literal::Kind::kNumber) return lit.number;
  return lit.text;
}

std::string key_of(const Row& values) {
  std::string key;
  for (const Value& v : values) {
    key.push_back(static_cast<char>('0' + v.index()));
    if (const auto* d = std::get_if<double>(&v)) {
      key += format_number(*d);
    } else if (const auto* s = std::get_if<std::string>(&v)) {
      key += std::to_string(s->size()) + ":" + *s;
    }
    key.push_back('|');
  }
  return key;
}

std::string column_label(const std::optional<Aggregate>& agg, bool distinct,
                         const ColumnRef& ref) {
  std::string name = ref.table ? *ref.table + "." + ref.column : ref.column;
  if (!agg) return name;
  return std::string(aggregate_keyword(*agg)) + "(" + (distinct ? "DISTINCT " : "") +
         name + ")";
}

struct Relation {
  std::vector<std::string> columns;
  std::vector<Row> rows;
  std::vector<bool> confidential;
  // Backing joined rows of aggregate blocks, ascending.
  std::vector<std::size_t> sources;
  std::vector<Row> joined;
  std::vector<FieldId> joined_fields;
};

class Evaluator {
 public:
  explicit Evaluator(const Database& db) : db_(db), schema_(*db.schema) {}

  Relation query(const SqlQuery& q) {
    Relation left = block(q);
    if (!q.set_op) return left;
    Relation right = query(*q.set_op->right);
    if (left.columns.size() != right.columns.size()) {
      exec_error(std::string(set_op_keyword(q.set_op->kind)) +
                 " operands have different column counts");
    }
    Relation out;
    out.columns = left.columns;
    out.confidential = left.confidential;
    for (std::size_t i = 0; i < right.confidential.size(); ++i) {
      if (right.confidential[i]) out.confidential[i] = true;
    }
    std::set<std::string> right_keys;
    for (const Row& r : right.rows) right_keys.insert(key_of(r));
    std::set<std::string> seen;
    auto emit = [&](const Row& r) {
      if (seen.insert(key_of(r)).second) out.rows.push_back(r);
    };
    switch (q.set_op->kind) {
      case SetOpKind::kUnion:
        for (const Row& r : left.rows) emit(r);
        for (const Row& r : right.rows) emit(r);
        break;
      case SetOpKind::kIntersect:
        for (const Row& r : left.rows) {
          if (right_keys.contains(key_of(r))) emit(r);
        }
        break;
      case SetOpKind::kExcept:
        for (const Row& r : left.rows) {
          if (!right_keys.contains(key_of(r))) emit(r);
        }
        break;
    }
    return out;
  }

 private:
  struct Scope {
    std::vector<TableId> tables;
    std::vector<std::size_t> offsets;
    std::vector<FieldId> fields;  // wide-row column -> field
  };

  using Group = std::vector<std::size_t>;

  Scope make_scope(const FromClause& from) const {
    Scope scope;
    for (const auto& name : from.tables) {
      const Table* t = schema_.find_table(name);
      if (t == nullptr) exec_error("unknown table '" + name + "'");
      scope.tables.push_back(t->table_id);
      scope.offsets.push_back(scope.fields.size());
      scope.fields.insert(scope.fields.end(), t->field_ids.begin(), t->field_ids.end());
    }
    return scope;
  }

  std::size_t bind(const Scope& scope, const ColumnRef& ref) const {
    for (std::size_t i = 0; i < scope.tables.size(); ++i) {
      const Table& t = schema_.table(scope.tables[i]);
      if (ref.table && *ref.table != t.canonical_name) continue;
      for (std::size_t k = 0; k < t.field_ids.size(); ++k) {
        if (schema_.field(t.field_ids[k]).canonical_name == ref.column) {
          return scope.offsets[i] + k;
        }
      }
    }
    exec_error("cannot resolve column '" + column_label(std::nullopt, false, ref) + "'");
  }

  // Column indices covered by a star reference.
  std::vector<std::size_t> star_columns(const Scope& scope, const ColumnRef& ref) const {
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < scope.tables.size(); ++i) {
      const Table& t = schema_.table(scope.tables[i]);
      if (ref.table && *ref.table != t.canonical_name) continue;
      for (std::size_t k = 0; k < t.field_ids.size(); ++k) cols.push_back(scope.offsets[i] + k);
    }
    if (cols.empty()) exec_error("star reference matches no FROM table");
    return cols;
  }

  std::vector<Row> join(const SqlQuery& q, const Scope& scope) const {
    const std::size_t width = scope.fields.size();
    std::vector<Row> rows;
    for (const Row& r : db_.rows(scope.tables[0])) {
      Row wide(width);
      std::copy(r.begin(), r.end(), wide.begin());
      rows.push_back(std::move(wide));
    }
    for (std::size_t i = 1; i < scope.tables.size(); ++i) {
      const std::size_t lo = scope.offsets[i];
      const auto& right_rows = db_.rows(scope.tables[i]);
      const std::size_t hi = lo + schema_.table(scope.tables[i]).field_ids.size();
      std::vector<std::pair<std::size_t, std::size_t>> keys;     // (earlier col, table-i col)
      std::vector<std::pair<std::size_t, std::size_t>> filters;  // other column pairs
      for (const auto& jc : q.from.joins) {
        if (std::max<std::size_t>(jc.position, 1) != i) continue;
        std::size_t a = bind(scope, jc.left);
        std::size_t b = bind(scope, jc.right);
        if (a >= hi || b >= hi) exec_error("join condition references a later table");
        const bool a_here = a >= lo, b_here = b >= lo;
        if (a_here != b_here) {
          keys.emplace_back(a_here ? b : a, a_here ? a : b);
        } else {
          filters.emplace_back(a, b);
        }
      }
      std::unordered_map<std::string, std::vector<std::size_t>> index;
      if (!keys.empty()) {
        for (std::size_t r = 0; r < right_rows.size(); ++r) {
          Row key;
          bool has_null = false;
          for (const auto& k : keys) {
            const Value& v = right_rows[r][k.second - lo];
            has_null = has_null || is_null(v);
            key.push_back(v);
          }
          if (!has_null) index[key_of(key)].push_back(r);
        }
      }
      std::vector<std::size_t> all(right_rows.size());
      for (std::size_t r = 0; r < all.size(); ++r) all[r] = r;
      std::vector<Row> next;
      for (const Row& left : rows) {
        const std::vector<std::size_t>* candidates = &all;
        if (!keys.empty()) {
          Row key;
          bool has_null = false;
          for (const auto& k : keys) {
            has_null = has_null || is_null(left[k.first]);
            key.push_back(left[k.first]);
          }
          if (has_null) continue;
          auto it = index.find(key_of(key));
          if (it == index.end()) continue;
          candidates = &it->second;
        }
        for (std::size_t r : *candidates) {
          Row wide = left;
          std::copy(right_rows[r].begin(), right_rows[r].end(), wide.begin() + lo);
          bool ok = true;
          for (const auto& [a, b] : filters) {
            if (is_null(wide[a]) || !(wide[a] == wide[b])) {
              ok = false;
              break;
            }
          }
          if (ok) next.push_back(std::move(wide));
        }
      }
      rows = std::move(next);
    }
    return rows;
  }

  const Relation& subquery(const SqlQuery& q) {
    auto it = subqueries_.find(&q);
    if (it == subqueries_.end()) it = subqueries_.emplace(&q, query(q)).first;
    return it->second;
  }

  Value aggregate(const Scope& scope, const std::vector<Row>& rows, const Group& group,
                  Aggregate agg, bool distinct, const ColumnRef& ref) const {
    if (ref.is_star()) return static_cast<double>(group.size());
    const std::size_t col = bind(scope, ref);
    const FieldType type = schema_.field(scope.fields[col]).field_type;
    std::vector<Value> values;
    std::set<std::string> seen;
    for (std::size_t r : group) {
      const Value& v = rows[r][col];
      if (is_null(v)) continue;
      if (distinct && !seen.insert(key_of({v})).second) continue;
      values.push_back(v);
    }
    switch (agg) {
      case Aggregate::kCount: return static_cast<double>(values.size());
      case Aggregate::kSum:
      case Aggregate::kAvg: {
        if (!is_numeric_type(type)) {
          exec_error(std::string(aggregate_keyword(agg)) + " over non-numeric column '" +
                     column_label(std::nullopt, false, ref) + "'");
        }
        if (values.empty()) return Value{};
        double sum = 0;
        for (const Value& v : values) sum += std::get<double>(v);
        return agg == Aggregate::kSum ? sum : sum / static_cast<double>(values.size());
      }
      case Aggregate::kMin:
      case Aggregate::kMax: {
        if (values.empty()) return Value{};
        Value best = values.front();
        for (const Value& v : values) {
          const int c = order_compare(v, best);
          if ((agg == Aggregate::kMin && c < 0) || (agg == Aggregate::kMax && c > 0)) best = v;
        }
        return best;
      }
    }
    return Value{};
  }

  // Value of a column or aggregate in row context (group == nullptr) or group
  // context.
  Value term(const Scope& scope, const std::vector<Row>& rows, std::size_t row,
             const Group* group, const std::optional<Aggregate>& agg, bool distinct,
             const ColumnRef& ref) const {
    if (agg) {
      if (group == nullptr) exec_error("aggregate outside of an aggregate query");
      return aggregate(scope, rows, *group, *agg, distinct, ref);
    }
    if (group != nullptr) {
      if (group->empty()) return Value{};
      return rows[group->front()][bind(scope, ref)];
    }
    return rows[row][bind(scope, ref)];
  }

  Value scalar(const Operand& op) {
    if (const auto* lit = std::get_if<Literal>(&op)) return literal_value(*lit);
    const Relation& sub = subquery(*std::get<Box<SqlQuery>>(op));
    if (sub.columns.size() != 1) exec_error("scalar subquery must return one column");
    if (sub.rows.empty()) return Value{};
    return sub.rows.front().front();
  }

  bool predicate(const Scope& scope, const std::vector<Row>& rows, std::size_t row,
                 const Group* group, const Predicate& p) {
    const Value lhs = term(scope, rows, row, group, p.aggregate, false, p.column);
    switch (p.op) {
      case CompareOp::kLike: {
        if (is_null(lhs)) return false;
        if (!std::holds_alternative<std::string>(lhs)) exec_error("LIKE on a non-text value");
        return like_match(std::get<std::string>(lhs), std::get<Literal>(p.value).text);
      }
      case CompareOp::kIn:
      case CompareOp::kNotIn: {
        const auto* box = std::get_if<Box<SqlQuery>>(&p.value);
        if (box == nullptr) exec_error("IN expects a subquery");
        const Relation& sub = subquery(**box);
        if (sub.columns.size() != 1) exec_error("IN subquery must return one column");
        if (is_null(lhs)) return false;
        bool found = false;
        for (const Row& r : sub.rows) {
          auto c = predicate_compare(lhs, r.front());
          if (c && *c == 0) {
            found = true;
            break;
          }
        }
        return p.op == CompareOp::kIn ? found : !found;
      }
      case CompareOp::kBetween: {
        if (!p.upper) exec_error("BETWEEN without upper bound");
        auto lo = predicate_compare(lhs, scalar(p.value));
        auto hi = predicate_compare(lhs, scalar(*p.upper));
        return lo && hi && *lo >= 0 && *hi <= 0;
      }
      default: break;
    }
    auto c = predicate_compare(lhs, scalar(p.value));
    if (!c) return false;
    switch (p.op) {
      case CompareOp::kEq: return *c == 0;
      case CompareOp::kNe: return *c != 0;
      case CompareOp::kLt: return *c < 0;
      case CompareOp::kLe: return *c <= 0;
      case CompareOp::kGt: return *c > 0;
      case CompareOp::kGe: return *c >= 0;
      default: return false;
    }
  }

  bool condition(const Scope& scope, const std::vector<Row>& rows, std::size_t row,
                 const Group* group, const Condition& c) {
    switch (c.kind) {
      case Condition::Kind::kPredicate:
        return predicate(scope, rows, row, group, c.predicate);
      case Condition::Kind::kAnd:
        for (const auto& child : c.children) {
          if (!condition(scope, rows, row, group, child)) return false;
        }
        return true;
      case Condition::Kind::kOr:
        for (const auto& child : c.children) {
          if (condition(scope, rows, row, group, child)) return true;
        }
        return false;
    }
    return false;
  }

  struct Entry {
    Row values;
    Row sort_keys;
    Group sources;
  };

  Relation block(const SqlQuery& q) {
    const Scope scope = make_scope(q.from);
    std::vector<Row> joined = join(q, scope);
    std::vector<Row> rows;
    if (q.where) {
      for (std::size_t r = 0; r < joined.size(); ++r) {
        if (condition(scope, joined, r, nullptr, *q.where)) rows.push_back(std::move(joined[r]));
      }
    } else {
      rows = std::move(joined);
    }

    Relation rel;
    for (const auto& item : q.select.items) {
      if (!item.aggregate && item.target.is_star()) {
        for (std::size_t col : star_columns(scope, item.target)) {
          rel.columns.push_back(schema_.qualified_name(scope.fields[col]));
          rel.confidential.push_back(schema_.field(scope.fields[col]).confidential);
        }
      } else {
        rel.columns.push_back(column_label(item.aggregate, item.distinct, item.target));
        rel.confidential.push_back(!item.aggregate &&
                                   schema_.field(scope.fields[bind(scope, item.target)]).confidential);
      }
    }

    const bool grouped = has_aggregate(q) || !q.group_by.empty() || q.having;
    std::vector<Group> groups;
    if (grouped) {
      if (q.group_by.empty()) {
        Group all(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) all[r] = r;
        groups.push_back(std::move(all));
      } else {
        std::vector<std::size_t> cols;
        for (const auto& g : q.group_by) cols.push_back(bind(scope, g));
        std::unordered_map<std::string, std::size_t> slot;
        for (std::size_t r = 0; r < rows.size(); ++r) {
          Row key;
          for (std::size_t c : cols) key.push_back(rows[r][c]);
          auto [it, inserted] = slot.emplace(key_of(key), groups.size());
          if (inserted) groups.emplace_back();
          groups[it->second].push_back(r);
        }
      }
    }

    std::vector<Entry> entries;
    auto project = [&](std::size_t row, const Group* group) {
      Entry e;
      for (const auto& item : q.select.items) {
        if (!item.aggregate && item.target.is_star()) {
          for (std::size_t col : star_columns(scope, item.target)) {
            if (group == nullptr) {
              e.values.push_back(rows[row][col]);
            } else {
              e.values.push_back(group->empty() ? Value{} : rows[group->front()][col]);
            }
          }
        } else {
          e.values.push_back(term(scope, rows, row, group, item.aggregate, item.distinct, item.target));
        }
      }
      for (const auto& key : q.order_by.keys) {
        e.sort_keys.push_back(term(scope, rows, row, group, key.aggregate, false, key.column));
      }
      if (group != nullptr) e.sources = *group;
      entries.push_back(std::move(e));
    };
    if (grouped) {
      for (const Group& g : groups) {
        if (q.having && !condition(scope, rows, 0, &g, *q.having)) continue;
        project(0, &g);
      }
    } else {
      for (std::size_t r = 0; r < rows.size(); ++r) project(r, nullptr);
    }

    if (!q.order_by.keys.empty()) {
      std::stable_sort(entries.begin(), entries.end(), [&](const Entry& a, const Entry& b) {
        for (std::size_t k = 0; k < q.order_by.keys.size(); ++k) {
          const int c = order_compare(a.sort_keys[k], b.sort_keys[k]);
          if (c != 0) return q.order_by.keys[k].descending ? c > 0 : c < 0;
        }
        return false;
      });
    }
    if (q.select.distinct) {
      std::set<std::string> seen;
      std::vector<Entry> unique;
      for (auto& e : entries) {
        if (seen.insert(key_of(e.values)).second) unique.push_back(std::move(e));
      }
      entries = std::move(unique);
    }
    if (q.order_by.limit && entries.size() > static_cast<std::size_t>(*q.order_by.limit)) {
      entries.resize(static_cast<std::size_t>(*q.order_by.limit));
    }

    std::set<std::size_t> sources;
    for (auto& e : entries) {
      rel.rows.push_back(std::move(e.values));
      sources.insert(e.sources.begin(), e.sources.end());
    }
    rel.sources.assign(sources.begin(), sources.end());
    rel.joined = std::move(rows);
    rel.joined_fields = scope.fields;
    return rel;
  }

  const Database& db_;
  const DatabaseSchema& schema_;
  std::unordered_map<const SqlQuery*, Relation> subqueries_;
};

bool reads_confidential_ref(const DatabaseSchema& schema, const FromClause& from,
                            const ColumnRef& ref) {
  if (ref.is_star()) return false;
  for (const auto& name : from.tables) {
    if (ref.table && *ref.table != name) continue;
    const Field* f = schema.find_field(name, ref.column);
    if (f != nullptr) return f->confidential;
  }
  return false;
}

bool reads_confidential(const DatabaseSchema& schema, const SqlQuery& q);

bool reads_confidential(const DatabaseSchema& schema, const FromClause& from,
                        const Condition& c) {
  if (c.kind == Condition::Kind::kPredicate) {
    if (reads_confidential_ref(schema, from, c.predicate.column)) return true;
    for (const Operand* op : {&c.predicate.value}) {
      if (const auto* sub = std::get_if<Box<SqlQuery>>(op)) {
        if (reads_confidential(schema, **sub)) return true;
      }
    }
    return false;
  }
  for (const auto& child : c.children) {
    if (reads_confidential(schema, from, child)) return true;
  }
  return false;
}

bool reads_confidential(const DatabaseSchema& schema, const SqlQuery& q) {
  auto ref = [&](const ColumnRef& r) { return reads_confidential_ref(schema, q.from, r); };
  for (const auto& item : q.select.items) {
    if (ref(item.target)) return true;
  }
  for (const auto& jc : q.from.joins) {
    if (ref(jc.left) || ref(jc.right)) return true;
  }
  if (q.where && reads_confidential(schema, q.from, *q.where)) return true;
  for (const auto& g : q.group_by) {
    if (ref(g)) return true;
  }
  if (q.having && reads_confidential(schema, q.from, *q.having)) return true;
  for (const auto& k : q.order_by.keys) {
    if (ref(k.column)) return true;
  }
  return false;
}

Value coerce(const std::string& cell, FieldType type, const std::string& table,
             std::size_t row, const std::string& column) {
  if (cell.empty()) return Value{};
  std::optional<double> v;
  switch (type) {
    case FieldType::kNumber: v = parse_number(cell); break;
    case FieldType::kBoolean: v = parse_boolean(cell); break;
    default: return cell;
  }
  if (!v) {
    throw Error(ErrorCode::kTypeCoercionError,
                "table '" + table + "' row " + std::to_string(row) + " column '" +
                    column + "': cannot read '" + cell + "' as " +
                    std::string(field_type_name(type)));
  }
  return *v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIOFailure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string value_text(const Value& v) {
  if (is_null(v)) return "NULL";
  if (const auto* d = std::get_if<double>(&v)) return format_number(*d);
  return std::get<std::string>(v);
}

nlohmann::json value_json(const Value& v) {
  if (is_null(v)) return nullptr;
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::get<std::string>(v);
}

Database load_database(std::shared_ptr<const DatabaseSchema> schema,
                       const std::map<std::string, CsvTable>& csv_per_table) {
  Database db;
  db.schema = std::move(schema);
  const DatabaseSchema& s = *db.schema;
  db.tables.resize(s.tables.size());
  for (const auto& [name, csv] : csv_per_table) {
    const Table* table = s.find_table(to_lower(name));
    if (table == nullptr) {
      throw Error(ErrorCode::kColumnMismatch, "data for unknown table '" + name + "'");
    }
    if (csv.header.size() != table->field_ids.size()) {
      throw Error(ErrorCode::kArityError,
                  "table '" + table->canonical_name + "' header has " +
                      std::to_string(csv.header.size()) + " columns, schema has " +
                      std::to_string(table->field_ids.size()));
    }
    // position in table -> csv column
    std::vector<std::size_t> source(table->field_ids.size(), csv.header.size());
    for (std::size_t c = 0; c < csv.header.size(); ++c) {
      const Field* f = s.find_field(table->table_id, to_lower(csv.header[c]));
      if (f == nullptr) {
        throw Error(ErrorCode::kColumnMismatch, "table '" + table->canonical_name +
                                                    "' has no column '" + csv.header[c] + "'");
      }
      auto pos = std::find(table->field_ids.begin(), table->field_ids.end(), f->field_id) -
                 table->field_ids.begin();
      source[pos] = c;
    }
    auto& rows = db.tables[index_of(table->table_id)];
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
      const auto& cells = csv.rows[r];
      if (cells.size() != csv.header.size()) {
        throw Error(ErrorCode::kArityError,
                    "table '" + table->canonical_name + "' row " + std::to_string(r + 1) +
                        " has " + std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(csv.header.size()));
      }
      Row row;
      row.reserve(cells.size());
      for (std::size_t k = 0; k < table->field_ids.size(); ++k) {
        const Field& f = s.field(table->field_ids[k]);
        row.push_back(coerce(cells[source[k]], f.field_type, table->canonical_name, r + 1,
                             f.canonical_name));
      }
      rows.push_back(std::move(row));
    }
  }
  return db;
}

BundleFiles read_bundle_directory(const std::filesystem::path& dir) {
  BundleFiles files;
  files.schema_json = read_file(dir / "schema.json");
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      files.csv_text[entry.path().stem().string()] = read_file(entry.path());
    }
  }
  return files;
}

void write_bundle_directory(const BundleFiles& files, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIOFailure, "cannot create " + dir.string());
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw Error(ErrorCode::kIOFailure, "cannot write " + path.string());
  };
  write(dir / "schema.json", files.schema_json);
  for (const auto& [table, text] : files.csv_text) write(dir / (table + ".csv"), text);
}

Database load_bundle(const BundleFiles& files, const SchemaLoadOptions& options,
                     std::size_t picklist_cap) {
  DatabaseSchema schema = load_schema(std::string_view(files.schema_json), options);
  std::map<std::string, CsvTable> csv;
  for (const auto& [table, text] : files.csv_text) csv[table] = parse_csv(text);
  // Validate shapes before picklists so the error names arity problems.
  load_database(std::make_shared<const DatabaseSchema>(schema), csv);
  schema = load_picklists(schema, csv, picklist_cap);
  return load_database(std::make_shared<const DatabaseSchema>(std::move(schema)), csv);
}

nlohmann::json result_json(const ResultSet& result) {
  auto rows_json = [](const std::vector<Row>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const Row& r : rows) {
      nlohmann::json row = nlohmann::json::array();
      for (const Value& v : r) row.push_back(value_json(v));
      out.push_back(std::move(row));
    }
    return out;
  };
  nlohmann::json j = {{"columns", result.columns},
                      {"rows", rows_json(result.rows)},
                      {"hidden_count", result.hidden_count},
                      {"sql", result.sql_text}};
  if (result.provenance) {
    j["provenance"] = {{"columns", result.provenance_columns},
                       {"rows", rows_json(*result.provenance)},
                       {"hidden_count", result.provenance_hidden_count}};
  }
  return j;
}

ResultSet execute(const SqlQuery& ast, const Database& db) {
  const DatabaseSchema& schema = *db.schema;
  SqlQuery q = ast;
  qualify_columns(q, schema);
  Evaluator evaluator(db);
  Relation rel = evaluator.query(q);

  ResultSet result;
  result.sql_text = format_sql(q);
  result.columns = rel.columns;
  const bool masked = std::find(rel.confidential.begin(), rel.confidential.end(), true) !=
                      rel.confidential.end();
  if (masked) {
    result.hidden_count = rel.rows.size();
  } else {
    result.rows = std::move(rel.rows);
  }

  if (!q.set_op && has_aggregate(q)) {
    std::vector<std::size_t> visible;
    for (std::size_t c = 0; c < rel.joined_fields.size(); ++c) {
      const Field& f = schema.field(rel.joined_fields[c]);
      if (f.confidential) continue;
      visible.push_back(c);
      result.provenance_columns.push_back(schema.qualified_name(f.field_id));
    }
    std::vector<Row> provenance;
    if (reads_confidential(schema, q)) {
      result.provenance_hidden_count = rel.sources.size();
    } else {
      for (std::size_t r : rel.sources) {
        Row row;
        for (std::size_t c : visible) row.push_back(rel.joined[r][c]);
        provenance.push_back(std::move(row));
      }
    }
    result.provenance = std::move(provenance);
  }
  return result;
}

}  // namespace nlidb
