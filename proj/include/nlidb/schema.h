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

#ifndef NLIDB_SCHEMA_H_
#define NLIDB_SCHEMA_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nlidb/csv.h"

namespace nlidb {

enum class TableId : std::int32_t {};
enum class FieldId : std::int32_t {};

inline std::int32_t index_of(TableId id) { return static_cast<std::int32_t>(id); }
inline std::int32_t index_of(FieldId id) { return static_cast<std::int32_t>(id); }

enum class FieldType { kText, kNumber, kTime, kBoolean, kOther };

inline constexpr int kFieldTypeCount = 5;

std::string_view field_type_name(FieldType type);
// Accepts the five canonical names plus common SQL spellings
// ("int", "varchar", "date", ...). Unknown spellings map to kOther.
FieldType parse_field_type(std::string_view name);

struct Field {
  FieldId field_id{};
  TableId table_id{};
  std::string canonical_name;
  std::vector<std::string> display_tokens;
  FieldType field_type = FieldType::kText;
  bool is_primary = false;
  std::optional<FieldId> foreign_target;
  bool confidential = false;
  std::optional<std::vector<std::string>> picklist;

  bool operator==(const Field&) const = default;
};

struct Table {
  TableId table_id{};
  std::string canonical_name;
  std::vector<std::string> display_tokens;
  std::vector<FieldId> field_ids;

  bool operator==(const Table&) const = default;
};

// Immutable after load; share by const reference.
class DatabaseSchema {
 public:
  std::string db_id;
  std::vector<Table> tables;
  std::vector<Field> fields;
  std::vector<std::pair<FieldId, FieldId>> foreign_pairs;

  const Table& table(TableId id) const { return tables.at(index_of(id)); }
  const Field& field(FieldId id) const { return fields.at(index_of(id)); }

  const Table* find_table(std::string_view canonical_name) const;
  const Field* find_field(TableId table, std::string_view canonical_name) const;
  const Field* find_field(std::string_view table_name,
                          std::string_view field_name) const;

  // "table.field"
  std::string qualified_name(FieldId id) const;

  bool in_foreign_pair(FieldId id) const;

  bool operator==(const DatabaseSchema&) const = default;
};

struct SchemaLoadOptions {
  // Entries of the form "table.column" that are flagged confidential in
  // addition to any "confidential": true in the document.
  std::vector<std::string> confidential_fields;
};

// Document format:
//   {"db_id": ..., "tables": [{"name": ..., "columns": [{"name", "type",
//    "primary", "confidential"}]}], "foreign_keys": [["t.c", "t.c"], ...]}
// Throws Error with kDuplicateName, kUnresolvedForeignKey, kEmptySchema or
// kInvalidDocument.
DatabaseSchema load_schema(std::string_view document,
                           const SchemaLoadOptions& options = {});
DatabaseSchema load_schema(const nlohmann::json& document,
                           const SchemaLoadOptions& options = {});
inline DatabaseSchema load_schema(const std::string& document,
                                  const SchemaLoadOptions& options = {}) {
  return load_schema(std::string_view(document), options);
}
inline DatabaseSchema load_schema(const char* document,
                                  const SchemaLoadOptions& options = {}) {
  return load_schema(std::string_view(document), options);
}

// Inverse of load_schema. Picklists are not part of the document.
nlohmann::json schema_to_json(const DatabaseSchema& schema);

// Spider's tables.json entry format
// (table_names_original, column_names_original, column_types, ...).
DatabaseSchema load_spider_schema(const nlohmann::json& entry,
                                  const SchemaLoadOptions& options = {});

inline constexpr std::size_t kDefaultPicklistCap = 1000;

// Fills picklists from per-table CSV data keyed by canonical table name.
// Values are ranked by frequency, ties lexical, and capped. Confidential
// fields get none. Throws Error(kColumnMismatch) if a header does not name
// exactly the table's fields.
DatabaseSchema load_picklists(const DatabaseSchema& schema,
                              const std::map<std::string, CsvTable>& data,
                              std::size_t cap = kDefaultPicklistCap);

// {"db_id", "nodes": [{"id", "name", "fields": [...]}],
//  "edges": [{"source", "target", "source_field", "target_field"}]}
nlohmann::json schema_graph(const DatabaseSchema& schema);

// Returns a copy without `field`, with ids renumbered densely. Foreign keys
// involving the field are dropped as well.
DatabaseSchema remove_field(const DatabaseSchema& schema, FieldId field);

}  // namespace nlidb

#endif  // NLIDB_SCHEMA_H_
