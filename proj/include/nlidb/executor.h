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

#ifndef NLIDB_EXECUTOR_H_
#define NLIDB_EXECUTOR_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "nlidb/csv.h"
#include "nlidb/schema.h"
#include "nlidb/sql_ast.h"

namespace nlidb {

// NULL, number (number and boolean fields) or text (text, time, other).
using Value = std::variant<std::monostate, double, std::string>;
using Row = std::vector<Value>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

std::string value_text(const Value& v);  // "NULL" for NULL
nlohmann::json value_json(const Value& v);

struct Database {
  std::shared_ptr<const DatabaseSchema> schema;
  std::vector<std::vector<Row>> tables;  // indexed by TableId

  const std::vector<Row>& rows(TableId id) const { return tables.at(index_of(id)); }
  bool operator==(const Database& o) const {
    return *schema == *o.schema && tables == o.tables;
  }
};

// Cells are coerced to their field's type; empty cells become NULL.
// Tables without a CSV entry are empty. Throws Error(kTypeCoercionError),
// Error(kArityError) or Error(kColumnMismatch).
Database load_database(std::shared_ptr<const DatabaseSchema> schema,
                       const std::map<std::string, CsvTable>& csv_per_table);

// A bundle directory holds schema.json plus one <table>.csv per table.
struct BundleFiles {
  std::string schema_json;
  std::map<std::string, std::string> csv_text;  // keyed by table name
};

BundleFiles read_bundle_directory(const std::filesystem::path& dir);
void write_bundle_directory(const BundleFiles& files, const std::filesystem::path& dir);

// Validates the schema, fills picklists from the data and loads the tables.
Database load_bundle(const BundleFiles& files, const SchemaLoadOptions& options = {},
                     std::size_t picklist_cap = kDefaultPicklistCap);

struct ResultSet {
  std::vector<std::string> columns;
  std::vector<Row> rows;
  // Supporting rows of an aggregate query: post-WHERE joined rows behind the
  // returned groups, projected onto the non-confidential FROM columns.
  std::optional<std::vector<Row>> provenance;
  std::vector<std::string> provenance_columns;
  // Result rows withheld because they project a confidential field.
  std::size_t hidden_count = 0;
  // Supporting rows withheld because the query reads a confidential field.
  std::size_t provenance_hidden_count = 0;
  std::string sql_text;
};

nlohmann::json result_json(const ResultSet& result);

// Evaluates a query that passed the static check. Semantics:
//  - Joins are inner joins in FROM order; rows keep nested-loop order.
//  - Comparisons involving NULL are false; aggregates skip NULL, COUNT(*)
//    counts rows; SUM/AVG/MIN/MAX of no values is NULL.
//  - Text compares bytewise; LIKE is ASCII case-insensitive with % and _.
//  - A number field against a non-numeric string literal, LIKE on a number
//    field, and SUM/AVG of a text field raise Error(kExecutionError).
//  - ORDER BY is a stable sort (NULL first ascending), applied before
//    DISTINCT and LIMIT. Bare columns in an aggregate query take the value of
//    the first row of their group.
//  - UNION/INTERSECT/EXCEPT return distinct rows in left-then-right order.
//  - Scalar subqueries use their first row; IN subqueries must have exactly
//    one column.
ResultSet execute(const SqlQuery& query, const Database& db);

}  // namespace nlidb

#endif  // NLIDB_EXECUTOR_H_
