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

#ifndef NLIDB_STATIC_CHECKER_H_
#define NLIDB_STATIC_CHECKER_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlidb/schema.h"
#include "nlidb/sql_ast.h"

namespace nlidb {

struct Violation {
  enum class Rule { kSyntax, kSelectScope, kJoinOrder, kUnknownName };
  Rule rule = Rule::kSyntax;
  std::string location;  // clause path, e.g. "where.subquery.select[0]"
  std::string message;

  bool operator==(const Violation&) const = default;
};

std::string_view rule_name(Violation::Rule rule);

struct CheckOptions {
  // Scope checks apply to SELECT items only (plus the JOIN rule); otherwise
  // WHERE, GROUP BY, HAVING and ORDER BY references are scoped as well.
  bool strict_paper_rules = false;
};

// Empty iff the query parses, names only schema tables/columns, takes every
// column from a table of its own FROM clause, and every JOIN condition only
// references tables listed at or before that JOIN.
std::vector<Violation> check(const SqlQuery& query, const DatabaseSchema& schema,
                             const CheckOptions& options = {});
std::vector<Violation> check(std::string_view query_text,
                             const DatabaseSchema& schema,
                             const CheckOptions& options = {});

struct BeamChoice {
  SqlQuery query;
  std::size_t rank = 0;  // 1-based position in the candidate list
};

// Highest-ranked candidate with no violations.
std::optional<BeamChoice> filter_beam(const std::vector<std::string>& candidates,
                                      const DatabaseSchema& schema,
                                      const CheckOptions& options = {});

}  // namespace nlidb

#endif  // NLIDB_STATIC_CHECKER_H_
