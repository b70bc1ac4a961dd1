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

#ifndef NLIDB_SQL_AST_H_
#define NLIDB_SQL_AST_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace nlidb {

// Heap cell with value semantics, for recursive AST members.
template <typename T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;
  ~Box() = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

struct Literal {
  enum class Kind { kNumber, kString };
  Kind kind = Kind::kNumber;
  double number = 0;
  std::string text;  // string literals only; LIKE patterns verbatim

  static Literal Number(double v) { return {Kind::kNumber, v, {}}; }
  static Literal String(std::string s) { return {Kind::kString, 0, std::move(s)}; }

  bool operator==(const Literal& o) const {
    if (kind != o.kind) return false;
    return kind == Kind::kNumber ? number == o.number : text == o.text;
  }
};

inline constexpr std::string_view kStar = "*";

struct ColumnRef {
  std::optional<std::string> table;
  std::string column;  // "*" for star

  bool is_star() const { return column == kStar; }
  bool operator==(const ColumnRef&) const = default;
};

enum class Aggregate { kCount, kSum, kAvg, kMin, kMax };

std::string_view aggregate_keyword(Aggregate agg);

struct SelectItem {
  std::optional<Aggregate> aggregate;
  bool distinct = false;  // COUNT(DISTINCT x)
  ColumnRef target;

  bool operator==(const SelectItem&) const = default;
};

struct SelectClause {
  bool distinct = false;
  std::vector<SelectItem> items;

  bool operator==(const SelectClause&) const = default;
};

enum class CompareOp { kEq, kNe, kLt, kLe, kGt, kGe, kLike, kIn, kNotIn, kBetween };

std::string_view compare_op_text(CompareOp op);

struct SqlQuery;

using Operand = std::variant<Literal, Box<SqlQuery>>;

struct Predicate {
  std::optional<Aggregate> aggregate;  // HAVING COUNT(*) > 1
  ColumnRef column;
  CompareOp op = CompareOp::kEq;
  Operand value = Literal{};
  std::optional<Operand> upper;  // BETWEEN value AND upper

  bool operator==(const Predicate&) const = default;
};

// Boolean tree. AND/OR nodes have at least two children and never a child of
// the same kind (the parser flattens).
struct Condition {
  enum class Kind { kPredicate, kAnd, kOr };
  Kind kind = Kind::kPredicate;
  Predicate predicate;
  std::vector<Condition> children;

  static Condition Leaf(Predicate p) {
    Condition c;
    c.predicate = std::move(p);
    return c;
  }
  static Condition Node(Kind kind, std::vector<Condition> children) {
    Condition c;
    c.kind = kind;
    c.children = std::move(children);
    return c;
  }

  bool operator==(const Condition&) const = default;
};

// `position` is the index into FromClause::tables of the JOIN whose ON clause
// holds this condition.
struct JoinCondition {
  ColumnRef left;
  ColumnRef right;
  std::size_t position = 1;

  bool operator==(const JoinCondition&) const = default;
};

struct FromClause {
  std::vector<std::string> tables;
  std::vector<JoinCondition> joins;

  bool operator==(const FromClause&) const = default;
};

struct OrderKey {
  std::optional<Aggregate> aggregate;
  ColumnRef column;
  bool descending = false;

  bool operator==(const OrderKey&) const = default;
};

struct OrderBy {
  std::vector<OrderKey> keys;
  std::optional<std::int64_t> limit;

  bool operator==(const OrderBy&) const = default;
};

enum class SetOpKind { kUnion, kIntersect, kExcept };

std::string_view set_op_keyword(SetOpKind kind);

struct SetOp {
  SetOpKind kind = SetOpKind::kUnion;
  Box<SqlQuery> right;

  bool operator==(const SetOp&) const = default;
};

struct SqlQuery {
  SelectClause select;
  FromClause from;
  std::optional<Condition> where;
  std::vector<ColumnRef> group_by;
  std::optional<Condition> having;
  OrderBy order_by;
  std::optional<SetOp> set_op;

  bool operator==(const SqlQuery&) const = default;
};

// True if any select item of this query block (not its set-op partner)
// carries an aggregate.
bool has_aggregate(const SqlQuery& query);

}  // namespace nlidb

#endif  // NLIDB_SQL_AST_H_
