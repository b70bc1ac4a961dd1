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

#include <gtest/gtest.h>

#include "nlidb/sql.h"
#include "nlidb/static_checker.h"
#include "support/fixtures.h"
#include "support/generators.h"

namespace nlidb {
namespace {

using Rule = Violation::Rule;

class CheckerTest : public ::testing::Test {
 protected:
  DatabaseSchema schema = testing::schema_of(testing::singer_schema_json());

  std::vector<Rule> rules(const std::string& sql, CheckOptions options = {}) {
    std::vector<Rule> out;
    for (const auto& v : check(sql, schema, options)) out.push_back(v.rule);
    return out;
  }
};

TEST_F(CheckerTest, ValidQuery) { EXPECT_TRUE(rules("SELECT name FROM singer").empty()); }

TEST_F(CheckerTest, SelectScope) {
  EXPECT_EQ(rules("SELECT age FROM concert"), std::vector<Rule>{Rule::kSelectScope});
  EXPECT_EQ(rules("SELECT singer.name FROM concert"), std::vector<Rule>{Rule::kSelectScope});
}

TEST_F(CheckerTest, JoinOrder) {
  const auto s = load_schema(R"({"db_id": "x", "tables": [
      {"name": "a", "columns": [{"name": "id", "type": "number"}]},
      {"name": "b", "columns": [{"name": "id", "type": "number"}]},
      {"name": "c", "columns": [{"name": "id", "type": "number"}]}]})");
  const auto v = check("SELECT * FROM a JOIN b ON c.id = b.id JOIN c ON c.id = a.id", s);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, Rule::kJoinOrder);
  EXPECT_EQ(v[0].location, "from.join[0]");
}

TEST_F(CheckerTest, UnknownNames) {
  EXPECT_EQ(rules("SELECT nope FROM singer"), std::vector<Rule>{Rule::kUnknownName});
  EXPECT_EQ(rules("SELECT name FROM nowhere"), (std::vector<Rule>{Rule::kUnknownName, Rule::kSelectScope}));
  EXPECT_EQ(rules("SELECT singer.nope FROM singer"), std::vector<Rule>{Rule::kUnknownName});
}

TEST_F(CheckerTest, Syntax) {
  const auto v = check("SELECT FROM singer", schema);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, Rule::kSyntax);
  EXPECT_EQ(v[0].location, "offset 8");
}

TEST_F(CheckerTest, ScopeBeyondSelectAndStrictToggle) {
  const std::string sql = "SELECT name FROM singer WHERE concert.year > 2000";
  EXPECT_EQ(rules(sql), std::vector<Rule>{Rule::kSelectScope});
  CheckOptions strict;
  strict.strict_paper_rules = true;
  EXPECT_TRUE(rules(sql, strict).empty());
  EXPECT_EQ(rules("SELECT concert.year FROM singer", strict), std::vector<Rule>{Rule::kSelectScope});
}

TEST_F(CheckerTest, SubqueriesAreScopedOnTheirOwn) {
  EXPECT_TRUE(rules("SELECT name FROM singer WHERE singer_id IN (SELECT singer_id FROM concert)").empty());
  const auto v = check("SELECT name FROM singer WHERE singer_id IN (SELECT age FROM concert)", schema);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].location, "where[0].subquery.select[0]");
}

TEST_F(CheckerTest, FilterBeam) {
  auto r = filter_beam({"SELECT age FROM concert", "SELECT name FROM singer"}, schema);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->rank, 2u);
  EXPECT_FALSE(filter_beam({"SELECT age FROM concert", "SELEC x"}, schema).has_value());
  EXPECT_FALSE(filter_beam({}, schema).has_value());

  std::vector<std::string> beam;
  for (int i = 0; i < 6; ++i) beam.push_back("SELECT age FROM concert WHERE year > " + std::to_string(i));
  beam.push_back("SELECT name FROM singer WHERE age > 30");
  while (beam.size() < 128) beam.push_back("SELECT country FROM singer");
  r = filter_beam(beam, schema);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->rank, 7u);
  EXPECT_EQ(r->query, parse_sql(beam[6]));
}

TEST(CheckerProperty, TextAndAstAgreeAndGeneratedQueriesPass) {
  testing::Rng rng(31);
  for (int i = 0; i < 300; ++i) {
    const auto schema = testing::random_schema(rng);
    const SqlQuery q = testing::random_query(rng, schema);
    const auto from_ast = check(q, schema);
    EXPECT_TRUE(from_ast.empty()) << format_sql(q);
    EXPECT_EQ(check(format_sql(q), schema), from_ast);
  }
}

TEST(CheckerProperty, FilterBeamNoneIffAllInvalid) {
  testing::Rng rng(37);
  const auto schema = testing::schema_of(testing::college_schema_json());
  const std::vector<std::string> invalid = {"SELECT nope FROM student", "SELECT FROM course",
                                            "SELECT budget FROM student",
                                            "SELECT * FROM takes JOIN course ON student.student_id = takes.student_id"};
  for (int i = 0; i < 200; ++i) {
    std::vector<std::string> beam;
    const std::size_t n = 1 + rng() % 20;
    std::optional<std::size_t> first_valid;
    for (std::size_t k = 0; k < n; ++k) {
      if (rng() % 4 == 0) {
        beam.push_back(format_sql(testing::random_query(rng, schema)));
        if (!first_valid) first_valid = k + 1;
      } else {
        beam.push_back(invalid[rng() % invalid.size()]);
      }
    }
    const auto r = filter_beam(beam, schema);
    ASSERT_EQ(r.has_value(), first_valid.has_value());
    if (r) EXPECT_EQ(r->rank, *first_valid);
  }
}

}  // namespace
}  // namespace nlidb
