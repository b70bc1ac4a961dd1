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

#include "nlidb/schema.h"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "nlidb/error.h"
#include "nlidb/text.h"

namespace nlidb {

using nlohmann::json;

std::string_view field_type_name(FieldType type) {
  switch (type) {
    case FieldType::kText: return "text";
    case FieldType::kNumber: return "number";
    case FieldType::kTime: return "time";
    case FieldType::kBoolean: return "boolean";
    case FieldType::kOther: return "other";
  }
  return "other";
}

FieldType parse_field_type(std::string_view name) {
  std::string n = to_lower(name.substr(0, name.find('(')));
  while (!n.empty() && n.back() == ' ') n.pop_back();
  static const std::set<std::string, std::less<>> kText = {
      "text", "varchar", "char", "string", "nvarchar", "clob"};
  static const std::set<std::string, std::less<>> kNumber = {
      "number", "int", "integer", "real", "float", "double", "numeric",
      "decimal", "bigint", "smallint"};
  static const std::set<std::string, std::less<>> kTime = {
      "time", "date", "datetime", "timestamp", "year"};
  static const std::set<std::string, std::less<>> kBool = {"boolean", "bool",
                                                           "bit"};
  if (kText.contains(n)) return FieldType::kText;
  if (kNumber.contains(n)) return FieldType::kNumber;
  if (kTime.contains(n)) return FieldType::kTime;
  if (kBool.contains(n)) return FieldType::kBoolean;
  return FieldType::kOther;
}

const Table* DatabaseSchema::find_table(std::string_view canonical_name) const {
  for (const auto& t : tables) {
    if (t.canonical_name == canonical_name) return &t;
  }
  return nullptr;
}

const Field* DatabaseSchema::find_field(TableId table,
                                        std::string_view canonical_name) const {
  for (FieldId id : this->table(table).field_ids) {
    const Field& f = field(id);
    if (f.canonical_name == canonical_name) return &f;
  }
  return nullptr;
}

const Field* DatabaseSchema::find_field(std::string_view table_name,
                                        std::string_view field_name) const {
  const Table* t = find_table(table_name);
  return t == nullptr ? nullptr : find_field(t->table_id, field_name);
}

std::string DatabaseSchema::qualified_name(FieldId id) const {
  const Field& f = field(id);
  return table(f.table_id).canonical_name + "." + f.canonical_name;
}

bool DatabaseSchema::in_foreign_pair(FieldId id) const {
  return std::any_of(foreign_pairs.begin(), foreign_pairs.end(),
                     [id](const auto& p) { return p.first == id || p.second == id; });
}

namespace {

std::string require_string(const json& obj, const char* key,
                           const std::string& where) {
  if (!obj.is_object() || !obj.contains(key) || !obj[key].is_string()) {
    throw Error(ErrorCode::kInvalidDocument,
                where + ": missing string field '" + key + "'");
  }
  return obj[key].get<std::string>();
}

bool optional_bool(const json& obj, const char* key) {
  if (!obj.contains(key)) return false;
  if (!obj[key].is_boolean()) {
    throw Error(ErrorCode::kInvalidDocument,
                std::string("field '") + key + "' must be a boolean");
  }
  return obj[key].get<bool>();
}

std::vector<std::string> display_for(const json& obj, const std::string& name) {
  if (obj.contains("display") && obj["display"].is_string()) {
    return display_tokens_from_name(obj["display"].get<std::string>());
  }
  return display_tokens_from_name(name);
}

// Resolves "table.column".
FieldId resolve_dotted(const DatabaseSchema& schema, const std::string& dotted,
                       ErrorCode code, const std::string& what) {
  const auto dot = dotted.find('.');
  if (dot == std::string::npos) {
    throw Error(code, what + " '" + dotted + "' is not of the form table.column");
  }
  const Field* f = schema.find_field(to_lower(dotted.substr(0, dot)),
                                     to_lower(dotted.substr(dot + 1)));
  if (f == nullptr) {
    throw Error(code, what + " '" + dotted + "' does not name a schema field");
  }
  return f->field_id;
}

void add_foreign_pair(DatabaseSchema& schema, FieldId from, FieldId to) {
  if (schema.field(from).table_id == schema.field(to).table_id) {
    throw Error(ErrorCode::kUnresolvedForeignKey,
                "foreign key " + schema.qualified_name(from) + " -> " +
                    schema.qualified_name(to) +
                    " joins fields of the same table");
  }
  for (const auto& [a, b] : schema.foreign_pairs) {
    if ((a == from && b == to) || (a == to && b == from)) return;
  }
  schema.foreign_pairs.emplace_back(from, to);
  Field& source = schema.fields[index_of(from)];
  if (!source.foreign_target) source.foreign_target = to;
}

void apply_confidential(DatabaseSchema& schema, const SchemaLoadOptions& options) {
  for (const auto& dotted : options.confidential_fields) {
    FieldId id = resolve_dotted(schema, dotted, ErrorCode::kInvalidDocument,
                                "confidential field");
    schema.fields[index_of(id)].confidential = true;
  }
}

}  // namespace

DatabaseSchema load_schema(std::string_view document,
                           const SchemaLoadOptions& options) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidDocument, std::string("schema JSON: ") + e.what());
  }
  return load_schema(doc, options);
}

DatabaseSchema load_schema(const json& doc, const SchemaLoadOptions& options) {
  DatabaseSchema schema;
  schema.db_id = require_string(doc, "db_id", "schema");
  if (doc.contains("tables") && !doc["tables"].is_array()) {
    throw Error(ErrorCode::kInvalidDocument, "schema '" + schema.db_id + "': tables must be an array");
  }
  if (!doc.contains("tables") || doc["tables"].empty()) {
    throw Error(ErrorCode::kEmptySchema, "schema '" + schema.db_id + "' has no tables");
  }
  for (const json& t : doc["tables"]) {
    const std::string name = to_lower(require_string(t, "name", "table"));
    if (schema.find_table(name) != nullptr) {
      throw Error(ErrorCode::kDuplicateName, "duplicate table name '" + name + "'");
    }
    Table table;
    table.table_id = static_cast<TableId>(schema.tables.size());
    table.canonical_name = name;
    table.display_tokens = display_for(t, name);
    if (!t.contains("columns") || !t["columns"].is_array() || t["columns"].empty()) {
      throw Error(ErrorCode::kEmptySchema, "table '" + name + "' has no columns");
    }
    std::set<std::string> seen;
    for (const json& c : t["columns"]) {
      const std::string cname = to_lower(require_string(c, "name", "column of " + name));
      if (!seen.insert(cname).second) {
        throw Error(ErrorCode::kDuplicateName,
                    "duplicate column name '" + cname + "' in table '" + name + "'");
      }
      Field field;
      field.field_id = static_cast<FieldId>(schema.fields.size());
      field.table_id = table.table_id;
      field.canonical_name = cname;
      field.display_tokens = display_for(c, cname);
      field.field_type = parse_field_type(
          c.contains("type") && c["type"].is_string() ? c["type"].get<std::string>()
                                                      : "text");
      field.is_primary = optional_bool(c, "primary");
      field.confidential = optional_bool(c, "confidential");
      table.field_ids.push_back(field.field_id);
      schema.fields.push_back(std::move(field));
    }
    schema.tables.push_back(std::move(table));
  }
  if (doc.contains("foreign_keys")) {
    if (!doc["foreign_keys"].is_array()) {
      throw Error(ErrorCode::kInvalidDocument, "foreign_keys must be an array");
    }
    for (const json& pair : doc["foreign_keys"]) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() ||
          !pair[1].is_string()) {
        throw Error(ErrorCode::kInvalidDocument,
                    "foreign key entries must be [\"t.c\", \"t.c\"]");
      }
      FieldId from = resolve_dotted(schema, pair[0].get<std::string>(),
                                    ErrorCode::kUnresolvedForeignKey, "foreign key");
      FieldId to = resolve_dotted(schema, pair[1].get<std::string>(),
                                  ErrorCode::kUnresolvedForeignKey, "foreign key");
      add_foreign_pair(schema, from, to);
    }
  }
  apply_confidential(schema, options);
  return schema;
}

json schema_to_json(const DatabaseSchema& schema) {
  json tables = json::array();
  for (const Table& t : schema.tables) {
    json columns = json::array();
    for (FieldId id : t.field_ids) {
      const Field& f = schema.field(id);
      json c = {{"name", f.canonical_name},
                {"type", std::string(field_type_name(f.field_type))},
                {"primary", f.is_primary},
                {"confidential", f.confidential}};
      if (f.display_tokens != display_tokens_from_name(f.canonical_name)) {
        c["display"] = join(f.display_tokens, " ");
      }
      columns.push_back(std::move(c));
    }
    json tj = {{"name", t.canonical_name}, {"columns", std::move(columns)}};
    if (t.display_tokens != display_tokens_from_name(t.canonical_name)) {
      tj["display"] = join(t.display_tokens, " ");
    }
    tables.push_back(std::move(tj));
  }
  json fks = json::array();
  for (const auto& [a, b] : schema.foreign_pairs) {
    fks.push_back({schema.qualified_name(a), schema.qualified_name(b)});
  }
  return {{"db_id", schema.db_id}, {"tables", tables}, {"foreign_keys", fks}};
}

DatabaseSchema load_spider_schema(const json& entry,
                                  const SchemaLoadOptions& options) {
  json doc;
  doc["db_id"] = entry.at("db_id");
  const auto& table_names = entry.at("table_names_original");
  const auto& display_names =
      entry.contains("table_names") ? entry["table_names"] : table_names;
  const auto& columns = entry.at("column_names_original");
  const auto& column_display =
      entry.contains("column_names") ? entry["column_names"] : columns;
  const auto& types = entry.at("column_types");
  std::set<int> primary;
  for (const auto& p : entry.value("primary_keys", json::array())) {
    if (p.is_array()) {
      for (const auto& q : p) primary.insert(q.get<int>());
    } else {
      primary.insert(p.get<int>());
    }
  }
  json tables = json::array();
  for (std::size_t t = 0; t < table_names.size(); ++t) {
    tables.push_back({{"name", table_names[t]},
                      {"display", display_names[t]},
                      {"columns", json::array()}});
  }
  std::vector<std::string> dotted(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const int t = columns[c][0].get<int>();
    if (t < 0) continue;  // the "*" pseudo-column
    const std::string name = columns[c][1].get<std::string>();
    json col = {{"name", name},
                {"display", column_display[c][1]},
                {"type", types[c]},
                {"primary", primary.contains(static_cast<int>(c))}};
    tables[t]["columns"].push_back(std::move(col));
    dotted[c] = table_names[t].get<std::string>() + "." + name;
  }
  doc["tables"] = std::move(tables);
  json fks = json::array();
  for (const auto& fk : entry.value("foreign_keys", json::array())) {
    const int a = fk[0].get<int>();
    const int b = fk[1].get<int>();
    if (columns[a][0] == columns[b][0]) continue;  // self-referential
    fks.push_back({dotted[a], dotted[b]});
  }
  doc["foreign_keys"] = std::move(fks);
  return load_schema(doc, options);
}

DatabaseSchema load_picklists(const DatabaseSchema& schema,
                              const std::map<std::string, CsvTable>& data,
                              std::size_t cap) {
  DatabaseSchema out = schema;
  for (const auto& [table_name, csv] : data) {
    const Table* table = out.find_table(to_lower(table_name));
    if (table == nullptr) {
      throw Error(ErrorCode::kColumnMismatch,
                  "data for unknown table '" + table_name + "'");
    }
    std::vector<FieldId> column_fields;
    std::set<FieldId> covered;
    for (const auto& h : csv.header) {
      const Field* f = out.find_field(table->table_id, to_lower(h));
      if (f == nullptr || !covered.insert(f->field_id).second) {
        throw Error(ErrorCode::kColumnMismatch,
                    "header column '" + h + "' does not match table '" +
                        table->canonical_name + "'");
      }
      column_fields.push_back(f->field_id);
    }
    if (covered.size() != table->field_ids.size()) {
      throw Error(ErrorCode::kColumnMismatch,
                  "header of table '" + table->canonical_name +
                      "' does not cover all fields");
    }
    std::vector<std::unordered_map<std::string, std::size_t>> counts(
        column_fields.size());
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
      const auto& row = csv.rows[r];
      if (row.size() != column_fields.size()) {
        throw Error(ErrorCode::kColumnMismatch,
                    "row " + std::to_string(r + 1) + " of table '" +
                        table->canonical_name + "' has " +
                        std::to_string(row.size()) + " cells");
      }
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (!row[c].empty()) ++counts[c][row[c]];
      }
    }
    for (std::size_t c = 0; c < column_fields.size(); ++c) {
      Field& f = out.fields[index_of(column_fields[c])];
      if (f.confidential) {
        f.picklist.reset();
        continue;
      }
      std::vector<std::pair<std::string, std::size_t>> ranked(counts[c].begin(),
                                                              counts[c].end());
      std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
      });
      if (ranked.size() > cap) ranked.resize(cap);
      std::vector<std::string> values;
      values.reserve(ranked.size());
      for (auto& [v, n] : ranked) values.push_back(std::move(v));
      f.picklist = std::move(values);
    }
  }
  return out;
}

json schema_graph(const DatabaseSchema& schema) {
  json nodes = json::array();
  for (const Table& t : schema.tables) {
    json fields = json::array();
    for (FieldId id : t.field_ids) {
      const Field& f = schema.field(id);
      fields.push_back({{"name", f.canonical_name},
                        {"type", std::string(field_type_name(f.field_type))},
                        {"primary", f.is_primary},
                        {"foreign", schema.in_foreign_pair(id)},
                        {"confidential", f.confidential}});
    }
    nodes.push_back({{"id", index_of(t.table_id)},
                     {"name", t.canonical_name},
                     {"fields", std::move(fields)}});
  }
  json edges = json::array();
  for (const auto& [a, b] : schema.foreign_pairs) {
    edges.push_back({{"source", index_of(schema.field(a).table_id)},
                     {"target", index_of(schema.field(b).table_id)},
                     {"source_field", schema.qualified_name(a)},
                     {"target_field", schema.qualified_name(b)}});
  }
  return {{"db_id", schema.db_id}, {"nodes", nodes}, {"edges", edges}};
}

DatabaseSchema remove_field(const DatabaseSchema& schema, FieldId removed) {
  DatabaseSchema out;
  out.db_id = schema.db_id;
  std::unordered_map<std::int32_t, FieldId> remap;
  for (const Table& t : schema.tables) {
    Table nt = t;
    nt.field_ids.clear();
    for (FieldId id : t.field_ids) {
      if (id == removed) continue;
      Field f = schema.field(id);
      f.field_id = static_cast<FieldId>(out.fields.size());
      remap[index_of(id)] = f.field_id;
      nt.field_ids.push_back(f.field_id);
      out.fields.push_back(std::move(f));
    }
    out.tables.push_back(std::move(nt));
  }
  for (Field& f : out.fields) {
    if (f.foreign_target) {
      auto it = remap.find(index_of(*f.foreign_target));
      if (it == remap.end()) {
        f.foreign_target.reset();
      } else {
        f.foreign_target = it->second;
      }
    }
  }
  for (const auto& [a, b] : schema.foreign_pairs) {
    if (a == removed || b == removed) continue;
    out.foreign_pairs.emplace_back(remap.at(index_of(a)), remap.at(index_of(b)));
  }
  return out;
}

}  // namespace nlidb
