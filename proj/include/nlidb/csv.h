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

#ifndef NLIDB_CSV_H_
#define NLIDB_CSV_H_

#include <string>
#include <string_view>
#include <vector>

namespace nlidb {

// RFC 4180 style table. Empty cells are kept as empty strings; callers decide
// whether that means NULL.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Throws Error(kInvalidDocument) on an unterminated quoted field.
CsvTable parse_csv(std::string_view text);

std::string write_csv(const CsvTable& table);

}  // namespace nlidb

#endif  // NLIDB_CSV_H_
