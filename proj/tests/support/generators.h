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

#ifndef NLIDB_TESTS_SUPPORT_GENERATORS_H_
#define NLIDB_TESTS_SUPPORT_GENERATORS_H_

#include <cstddef>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "nlidb/confusion.h"
#include "nlidb/csv.h"
#include "nlidb/executor.h"
#include "nlidb/schema.h"
#include "nlidb/sql_ast.h"

namespace nlidb::testing {

using Rng = std::mt19937_64;

struct SchemaShape {
  std::size_t max_tables = 5;
  std::size_t max_extra_fields = 4;
};

// Random schema: every table has a numeric primary key "id"; later tables
// may carry "<parent>_id" foreign keys to earlier ones.
DatabaseSchema random_schema(Rng& rng, const SchemaShape& shape = {});

struct GeneratedDatabase {
  std::map<std::string, CsvTable> csv;
  Database db;
};

// Up to `max_rows` rows per table, about one cell in ten NULL.
GeneratedDatabase random_database(Rng& rng, std::shared_ptr<const DatabaseSchema> schema,
                                  std::size_t max_rows = 50);

struct QueryShape {
  bool subqueries = true;
  bool set_ops = true;
  bool unqualified = false;  // sometimes drop the qualifier
  std::size_t max_joins = 2;
};

// Random query that passes the static checker on `schema` and executes
// without error.
SqlQuery random_query(Rng& rng, const DatabaseSchema& schema, const QueryShape& shape = {});

// Every literal of `q` spelled out as question words, so that the query's
// literals can be copied from the question.
std::string question_for_literals(const SqlQuery& q);

// Text values drawn by the generators.
const std::vector<std::string>& text_pool();

// Fixed-embedding span example: Gaussian noise rows with a start direction on
// the gold start row and an end direction on the gold end row.
SpanExample toy_span_example(Rng& rng, int dim = 16, std::size_t max_question = 12);

struct ToyQuestion {
  std::string question;
  SpanLabel label;
};

// Filler-word question; untranslatable ones carry a span that opens with a
// fixed start word and closes with a fixed end word.
ToyQuestion toy_span_question(Rng& rng);

}  // namespace nlidb::testing

#endif  // NLIDB_TESTS_SUPPORT_GENERATORS_H_
