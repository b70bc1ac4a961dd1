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

#ifndef NLIDB_SQL_H_
#define NLIDB_SQL_H_

#include <string>
#include <string_view>
#include <vector>

#include "nlidb/schema.h"
#include "nlidb/sql_ast.h"

namespace nlidb {

// Parses the SELECT subset: aggregates, JOIN ... ON, WHERE with AND/OR and
// nested IN / scalar subqueries, GROUP BY, HAVING, ORDER BY, LIMIT and
// UNION/INTERSECT/EXCEPT. Identifiers are lowercased and table aliases are
// replaced by the table names they stand for. Throws SyntaxError.
SqlQuery parse_sql(std::string_view text);

// Terminal of the canonical surface form.
struct SqlToken {
  enum class Kind { kKeyword, kPunct, kTable, kColumn, kNumber, kString };
  Kind kind = Kind::kKeyword;
  std::string text;    // keyword/punct text, table name, number text, string body
  std::string table;   // kColumn: qualifier, may be empty
  std::string column;  // kColumn: column name

  bool operator==(const SqlToken&) const = default;
};

// Canonical token stream; format_sql is its rendering.
std::vector<SqlToken> sql_tokens(const SqlQuery& query);

// Renders tokens with canonical spacing: single spaces, none inside
// parentheses, before commas, or around '.'.
std::string render_sql_tokens(const std::vector<SqlToken>& tokens);

// Uppercase keywords, single spaces; parse_sql(format_sql(q)) == q.
std::string format_sql(const SqlQuery& query);

// Number literal text: integers without a fraction, others shortest
// round-trip form.
std::string format_number(double value);

// Qualifies unqualified column references with the first table of the
// enclosing FROM clause that has the column. Unresolvable references stay
// unqualified.
void qualify_columns(SqlQuery& query, const DatabaseSchema& schema);

// Clause-wise comparison: select items, FROM tables, join conditions,
// same-level conjuncts/disjuncts and GROUP BY keys compare as sets; ORDER BY
// keys in order. With `with_values` false, literal operands and LIMIT counts
// are ignored (only their presence matters).
bool exact_set_match(const SqlQuery& predicted, const SqlQuery& gold,
                     bool with_values);

}  // namespace nlidb

#endif  // NLIDB_SQL_H_
