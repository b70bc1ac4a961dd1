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

#ifndef NLIDB_TESTS_SUPPORT_FIXTURES_H_
#define NLIDB_TESTS_SUPPORT_FIXTURES_H_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "nlidb/executor.h"
#include "nlidb/forge.h"
#include "nlidb/schema.h"

namespace nlidb::testing {

// singer(singer_id, name, country, age, is_male) and
// concert(concert_id, concert_name, theme, year, singer_id -> singer).
std::string singer_schema_json();
BundleFiles singer_bundle();
Database singer_database();

// country(code, name, region, population) and
// city(city_id, name, country_code -> country, population). Three countries
// with regions Carribean, Carribean, Porto Rico.
std::string world_schema_json();
BundleFiles world_bundle();
Database world_database();

// Five tables and five foreign keys: department, instructor, student, course
// and takes.
std::string college_schema_json();

// invoices(invoice_id, billing_city, total) and customers(customer_id,
// first_name, last_name, invoice_id -> invoices).
std::string store_schema_json();

DatabaseSchema schema_of(const std::string& json);

// The four fixture schemas keyed by db_id.
std::map<std::string, DatabaseSchema> fixture_schemas();

// Templated question/SQL pairs over every fixture schema.
std::vector<SourceExample> fixture_corpus();

}  // namespace nlidb::testing

#endif  // NLIDB_TESTS_SUPPORT_FIXTURES_H_
