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

#include "support/fixtures.h"

#include "nlidb/sql.h"
#include "nlidb/text.h"

namespace nlidb::testing {

std::string singer_schema_json() {
  return R"({
    "db_id": "concert_singer",
    "tables": [
      {"name": "singer", "columns": [
        {"name": "singer_id", "type": "number", "primary": true},
        {"name": "name", "type": "text"},
        {"name": "country", "type": "text"},
        {"name": "age", "type": "number"},
        {"name": "is_male", "type": "boolean"}]},
      {"name": "concert", "columns": [
        {"name": "concert_id", "type": "number", "primary": true},
        {"name": "concert_name", "type": "text"},
        {"name": "theme", "type": "text"},
        {"name": "year", "type": "number"},
        {"name": "singer_id", "type": "number"}]}
    ],
    "foreign_keys": [["concert.singer_id", "singer.singer_id"]]
  })";
}

BundleFiles singer_bundle() {
  BundleFiles files;
  files.schema_json = singer_schema_json();
  files.csv_text["singer"] =
      "singer_id,name,country,age,is_male\n"
      "1,Joe Sharp,Netherlands,52,true\n"
      "2,Timbaland,United States,32,true\n"
      "3,Rose White,France,41,false\n";
  files.csv_text["concert"] =
      "concert_id,concert_name,theme,year,singer_id\n"
      "1,Auditions,Free choice,2014,1\n"
      "2,Super bootcamp,Happy Tonight,2014,2\n"
      "3,Home Visits,Bleeding Love,2015,2\n"
      "4,Week 1,Wide Awake,2015,3\n";
  return files;
}

Database singer_database() { return load_bundle(singer_bundle()); }

std::string world_schema_json() {
  return R"({
    "db_id": "world",
    "tables": [
      {"name": "country", "columns": [
        {"name": "code", "type": "text", "primary": true},
        {"name": "name", "type": "text"},
        {"name": "region", "type": "text"},
        {"name": "population", "type": "number"}]},
      {"name": "city", "columns": [
        {"name": "city_id", "type": "number", "primary": true},
        {"name": "name", "type": "text"},
        {"name": "country_code", "type": "text"},
        {"name": "population", "type": "number"}]}
    ],
    "foreign_keys": [["city.country_code", "country.code"]]
  })";
}

BundleFiles world_bundle() {
  BundleFiles files;
  files.schema_json = world_schema_json();
  files.csv_text["country"] =
      "code,name,region,population\n"
      "ABW,Aruba,Carribean,103000\n"
      "AIA,Anguilla,Carribean,8000\n"
      "PRI,Puerto Rico,Porto Rico,3869000\n";
  files.csv_text["city"] =
      "city_id,name,country_code,population\n"
      "1,Oranjestad,ABW,29034\n"
      "2,South Hill,AIA,961\n"
      "3,San Juan,PRI,434374\n"
      "4,Bayamon,PRI,224044\n";
  return files;
}

Database world_database() { return load_bundle(world_bundle()); }

std::string college_schema_json() {
  return R"({
    "db_id": "college",
    "tables": [
      {"name": "department", "columns": [
        {"name": "dept_id", "type": "number", "primary": true},
        {"name": "dept_name", "type": "text"},
        {"name": "budget", "type": "number"}]},
      {"name": "instructor", "columns": [
        {"name": "instructor_id", "type": "number", "primary": true},
        {"name": "instructor_name", "type": "text"},
        {"name": "salary", "type": "number"},
        {"name": "dept_id", "type": "number"}]},
      {"name": "student", "columns": [
        {"name": "student_id", "type": "number", "primary": true},
        {"name": "student_name", "type": "text"},
        {"name": "enrolled", "type": "time"},
        {"name": "dept_id", "type": "number"}]},
      {"name": "course", "columns": [
        {"name": "course_id", "type": "number", "primary": true},
        {"name": "title", "type": "text"},
        {"name": "credits", "type": "number"},
        {"name": "dept_id", "type": "number"}]},
      {"name": "takes", "columns": [
        {"name": "student_id", "type": "number"},
        {"name": "course_id", "type": "number"},
        {"name": "grade", "type": "text"}]}
    ],
    "foreign_keys": [
      ["instructor.dept_id", "department.dept_id"],
      ["student.dept_id", "department.dept_id"],
      ["course.dept_id", "department.dept_id"],
      ["takes.student_id", "student.student_id"],
      ["takes.course_id", "course.course_id"]]
  })";
}

std::string store_schema_json() {
  return R"({
    "db_id": "store",
    "tables": [
      {"name": "invoices", "columns": [
        {"name": "invoice_id", "type": "number", "primary": true},
        {"name": "billing_city", "type": "text"},
        {"name": "total", "type": "number"}]},
      {"name": "customers", "columns": [
        {"name": "customer_id", "type": "number", "primary": true},
        {"name": "first_name", "type": "text"},
        {"name": "last_name", "type": "text"},
        {"name": "invoice_id", "type": "number"}]}
    ],
    "foreign_keys": [["customers.invoice_id", "invoices.invoice_id"]]
  })";
}

DatabaseSchema schema_of(const std::string& json) { return load_schema(json); }

std::map<std::string, DatabaseSchema> fixture_schemas() {
  std::map<std::string, DatabaseSchema> out;
  for (const auto& json : {singer_schema_json(), world_schema_json(), college_schema_json(),
                           store_schema_json()}) {
    DatabaseSchema s = load_schema(json);
    out.emplace(s.db_id, std::move(s));
  }
  return out;
}

std::vector<SourceExample> fixture_corpus() {
  std::vector<SourceExample> out;
  auto add = [&](const DatabaseSchema& s, const std::string& q, const std::string& sql) {
    out.push_back({s.db_id, q, parse_sql(sql)});
  };
  for (const auto& [id, s] : fixture_schemas()) {
    for (const Table& t : s.tables) {
      const std::string tn = join(t.display_tokens, " ");
      add(s, "How many " + tn + " records are there?", "SELECT COUNT(*) FROM " + t.canonical_name);
      add(s, "Count the " + tn + " entries.", "SELECT COUNT(*) FROM " + t.canonical_name);
      const Field* number = nullptr;
      for (FieldId fid : t.field_ids) {
        const Field& f = s.field(fid);
        if (f.field_type == FieldType::kNumber && !f.is_primary && !s.in_foreign_pair(fid)) number = &f;
      }
      for (FieldId fid : t.field_ids) {
        const Field& f = s.field(fid);
        if (f.is_primary || s.in_foreign_pair(fid)) continue;
        const std::string fn = join(f.display_tokens, " ");
        const std::string col = t.canonical_name + "." + f.canonical_name;
        add(s, "What are the " + fn + " values of all " + tn + " rows?", "SELECT " + col + " FROM " + t.canonical_name);
        add(s, "Show the " + fn + " of each " + tn + ".", "SELECT " + col + " FROM " + t.canonical_name);
        add(s, "List the distinct " + fn + " in " + tn + ".", "SELECT DISTINCT " + col + " FROM " + t.canonical_name);
        if (f.field_type == FieldType::kNumber) {
          add(s, "What is the average " + fn + " in " + tn + "?", "SELECT AVG(" + col + ") FROM " + t.canonical_name);
          add(s, "Give the largest " + fn + " of any " + tn + ".", "SELECT MAX(" + col + ") FROM " + t.canonical_name);
        }
        if (number != nullptr && number != &f) {
          const std::string nn = join(number->display_tokens, " ");
          add(s, "Find the " + fn + " of " + tn + " with " + nn + " greater than 10.",
              "SELECT " + col + " FROM " + t.canonical_name + " WHERE " + t.canonical_name + "." + number->canonical_name + " > 10");
          add(s, "Order the " + fn + " of " + tn + " by " + nn + ".",
              "SELECT " + col + " FROM " + t.canonical_name + " ORDER BY " + t.canonical_name + "." + number->canonical_name);
        }
      }
    }
  }
  return out;
}

}  // namespace nlidb::testing
