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

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "nlidb/error.h"
#include "nlidb/eval.h"
#include "nlidb/sql.h"
#include "support/generators.h"

namespace nlidb {
namespace {

template <typename Fn>
ErrorCode error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kInvalidArgument;
}

// Token-set precision/recall F1.
double squad_f1(const SpanLabel& p, const SpanLabel& g) {
  if (p.start == 0 || g.start == 0) return p.start == 0 && g.start == 0 ? 1.0 : 0.0;
  std::size_t common = 0;
  for (std::size_t i = p.start; i <= p.end; ++i) common += (i >= g.start && i <= g.end);
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / static_cast<double>(p.end - p.start + 1);
  const double recall = static_cast<double>(common) / static_cast<double>(g.end - g.start + 1);
  return 2 * precision * recall / (precision + recall);
}

SpanLabel random_label(testing::Rng& rng, std::size_t q) {
  if (rng() % 3 == 0) return {};
  const std::size_t s = 1 + rng() % q;
  return {s, s + rng() % (q - s + 1)};
}

TEST(Translatability, Examples) {
  const std::vector<SpanLabel> gold = {{0, 0}, {1, 3}, {2, 2}, {0, 0}};
  EXPECT_DOUBLE_EQ(eval_translatability(gold, gold), 100.0);
  EXPECT_DOUBLE_EQ(eval_translatability({{0, 0}, {0, 0}, {1, 1}, {1, 4}}, gold), 50.0);
  EXPECT_DOUBLE_EQ(eval_translatability({}, {}), 0.0);
  EXPECT_EQ(error_of([&] { eval_translatability({{0, 0}}, gold); }), ErrorCode::kLengthMismatch);
}

TEST(Span, HandComputedCases) {
  EXPECT_DOUBLE_EQ(span_f1({3, 5}, {3, 5}), 1.0);
  EXPECT_DOUBLE_EQ(span_f1({2, 4}, {3, 4}), 0.8);
  EXPECT_DOUBLE_EQ(span_f1({0, 0}, {1, 7}), 0.0);
  EXPECT_DOUBLE_EQ(span_f1({1, 7}, {0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(span_f1({0, 0}, {0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(span_f1({1, 2}, {4, 5}), 0.0);

  const SpanReport r = eval_span({{2, 4}, {3, 5}, {0, 0}, {0, 0}}, {{3, 4}, {3, 5}, {1, 7}, {0, 0}});
  EXPECT_DOUBLE_EQ(r.all.accuracy, 50.0);
  EXPECT_DOUBLE_EQ(r.all.f1, 100.0 * (0.8 + 1 + 0 + 1) / 4);
  EXPECT_EQ(r.all.count, 4u);
  EXPECT_EQ(r.translatable.count, 1u);
  EXPECT_DOUBLE_EQ(r.translatable.accuracy, 100.0);
  EXPECT_EQ(r.untranslatable.count, 3u);
  EXPECT_DOUBLE_EQ(r.untranslatable.accuracy, 100.0 / 3);
  EXPECT_DOUBLE_EQ(eval_span({{2, 4}}, {{3, 4}}).all.f1, 80.0);
  EXPECT_EQ(error_of([] { eval_span({{0, 0}}, {}); }), ErrorCode::kLengthMismatch);
}

TEST(SpanProperty, OracleF1PermutationInvarianceAndDegeneracy) {
  testing::Rng rng(47);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    std::vector<SpanLabel> pred, gold, whole_pred, whole_gold;
    double f1_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t q = 1 + rng() % 12;
      pred.push_back(random_label(rng, q));
      gold.push_back(random_label(rng, q));
      f1_sum += squad_f1(pred.back(), gold.back());
      whole_pred.push_back(rng() % 2 ? SpanLabel{} : SpanLabel{1, q});
      whole_gold.push_back(rng() % 2 ? SpanLabel{} : SpanLabel{1, q});
    }
    const SpanReport r = eval_span(pred, gold);
    ASSERT_NEAR(r.all.f1, 100.0 * f1_sum / static_cast<double>(n), 1e-9);
    ASSERT_GE(r.all.accuracy, 0.0);
    ASSERT_LE(r.all.f1, 100.0);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<SpanLabel> pp, gg;
    for (std::size_t i : order) pp.push_back(pred[i]), gg.push_back(gold[i]);
    const SpanReport s = eval_span(pp, gg);
    ASSERT_NEAR(s.all.accuracy, r.all.accuracy, 1e-9);
    ASSERT_NEAR(s.all.f1, r.all.f1, 1e-9);
    ASSERT_NEAR(eval_translatability(pp, gg), eval_translatability(pred, gold), 1e-9);

    const SpanReport w = eval_span(whole_pred, whole_gold);
    const double tran = eval_translatability(whole_pred, whole_gold);
    ASSERT_NEAR(w.all.accuracy, tran, 1e-9);
    ASSERT_NEAR(w.all.f1, tran, 1e-9);
  }
}

TEST(Em, Examples) {
  const std::vector<std::string> gold = {"SELECT name, age FROM singer", "SELECT COUNT(*) FROM concert WHERE year = 2014"};
  EXPECT_DOUBLE_EQ(eval_em(gold, gold, true).accuracy, 100.0);
  const auto permuted = eval_em({"SELECT age, name FROM singer", "select count(*) from concert where year = 2014"}, gold, true);
  EXPECT_DOUBLE_EQ(permuted.accuracy, 100.0);
  EXPECT_EQ(permuted.matched, 2u);
  const auto values = eval_em({"SELECT name, age FROM singer", "SELECT COUNT(*) FROM concert WHERE year = 2015"}, gold, true);
  EXPECT_DOUBLE_EQ(values.accuracy, 50.0);
  EXPECT_DOUBLE_EQ(eval_em({"SELECT name, age FROM singer", "SELECT COUNT(*) FROM concert WHERE year = 2015"}, gold, false).accuracy, 100.0);
  const auto broken = eval_em({"SELECT FROM", "SELECT COUNT(*) FROM concert WHERE year = 2014"}, gold, true);
  EXPECT_DOUBLE_EQ(broken.accuracy, 50.0);
  EXPECT_EQ(broken.prediction_parse_failures, 1u);
  EXPECT_EQ(broken.gold_parse_failures, 0u);
  EXPECT_EQ(eval_em({"SELECT a FROM t"}, {"SELEC"}, true).gold_parse_failures, 1u);
  EXPECT_EQ(error_of([&] { eval_em({}, gold, true); }), ErrorCode::kLengthMismatch);
}

TEST(EmProperty, SelectPermutationsMatch) {
  testing::Rng rng(53);
  std::vector<std::string> pred, gold;
  for (int i = 0; i < 300; ++i) {
    const auto schema = testing::random_schema(rng);
    SqlQuery q = testing::random_query(rng, schema, {false, false});
    gold.push_back(format_sql(q));
    std::shuffle(q.select.items.begin(), q.select.items.end(), rng);
    pred.push_back(format_sql(q));
  }
  EXPECT_DOUBLE_EQ(eval_em(pred, gold, true).accuracy, 100.0);
}

TEST(Report, FixedWidthRows) {
  EvalReport r;
  r.translatability_accuracy = 87.6;
  r.span = eval_span({{2, 4}}, {{3, 4}});
  EmReport em;
  em.accuracy = 63.2;
  r.em = em;
  r.counts["examples"] = 1;
  const std::string text = format_report(r);
  EXPECT_NE(text.find("Tran Acc                      87.60\n"), std::string::npos) << text;
  EXPECT_NE(text.find("Span F1                       80.00\n"), std::string::npos) << text;
  EXPECT_NE(text.find("EM Acc                        63.20\n"), std::string::npos) << text;
  EXPECT_NE(text.find("examples                    1\n"), std::string::npos) << text;
  EXPECT_EQ(format_report({}), "");
}

TEST(Records, LabelsQueriesAndFiles) {
  using nlohmann::json;
  EXPECT_EQ(label_from_record(json::parse(R"({"label": {"start": 2, "end": 3}})")), (SpanLabel{2, 3}));
  EXPECT_EQ(label_from_record(json::parse(R"({"translatable": true})")), (SpanLabel{0, 0}));
  EXPECT_FALSE(label_from_record(json::parse(R"({"translatable": false})")).translatable());
  EXPECT_EQ(error_of([] { label_from_record(json::parse(R"({"x": 1})")); }), ErrorCode::kInvalidDocument);
  EXPECT_EQ(error_of([] { label_from_record(json::parse(R"({"label": {"start": "a"}})")); }), ErrorCode::kInvalidDocument);
  EXPECT_EQ(query_from_record(json::parse(R"({"query": "SELECT 1"})")), "SELECT 1");
  EXPECT_EQ(query_from_record(json::parse(R"({"sql": "SELECT 2"})")), "SELECT 2");
  EXPECT_EQ(error_of([] { query_from_record(json::parse("{}")); }), ErrorCode::kInvalidDocument);

  const auto path = std::filesystem::temp_directory_path() / "nlidb_eval_records.jsonl";
  {
    std::ofstream out(path);
    out << R"({"a": 1})" << "\n\n" << R"({"a": 2})" << "\n";
  }
  EXPECT_EQ(read_json_lines(path.string()).size(), 2u);
  {
    std::ofstream out(path);
    out << "{\"a\": 1}\n{oops\n";
  }
  EXPECT_EQ(error_of([&] { read_json_lines(path.string()); }), ErrorCode::kInvalidDocument);
  std::filesystem::remove(path);
  EXPECT_EQ(error_of([] { read_json_lines("/nonexistent/p.jsonl"); }), ErrorCode::kIOFailure);
}

}  // namespace
}  // namespace nlidb
