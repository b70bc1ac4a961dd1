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

#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "nlidb/error.h"
#include "nlidb/forge.h"
#include "nlidb/sql.h"
#include "nlidb/text.h"
#include "support/fixtures.h"

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

std::vector<std::string> words(const std::string& q) {
  std::vector<std::string> out;
  for (const auto& t : tokenize_question(q)) out.push_back(t.normalized);
  return out;
}

std::string span_words(const UtranExample& ex) {
  const auto w = words(ex.question);
  std::string out;
  for (std::size_t i = ex.label.start; i <= ex.label.end; ++i) out += (out.empty() ? "" : " ") + w[i - 1];
  return out;
}

class ForgeTest : public ::testing::Test {
 protected:
  DatabaseSchema world = testing::schema_of(testing::world_schema_json());
  DatabaseSchema store = testing::schema_of(testing::store_schema_json());
  DatabaseSchema singer = testing::schema_of(testing::singer_schema_json());
  SqlQuery count_countries = parse_sql("SELECT COUNT(*) FROM country");
};

TEST_F(ForgeTest, LinkSpans) {
  const auto spans = link_field_spans("How many countries exist?", count_countries, world);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0].first, 2u);
  EXPECT_EQ(spans[0].last, 2u);
  EXPECT_EQ(spans[0].table, world.find_table("country")->table_id);
  EXPECT_FALSE(spans[0].field.has_value());

  EXPECT_TRUE(link_field_spans("how big is it", count_countries, world).empty());

  const auto longest = link_field_spans("list every singer name", parse_sql("SELECT name FROM singer"), singer);
  ASSERT_EQ(longest.size(), 1u);
  EXPECT_EQ(longest[0].first, 2u);
  EXPECT_EQ(longest[0].last, 3u);
  EXPECT_EQ(longest[0].field, singer.find_field("singer", "name")->field_id);

  const auto two = link_field_spans("regions and names of each country",
                                    parse_sql("SELECT region, name FROM country"), world);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].first, 0u);
  EXPECT_EQ(two[1].first, 2u);
}

TEST_F(ForgeTest, DropQuestionWorkedExample) {
  const UtranExample ex = drop_question("How many countries exist?", count_countries, world);
  EXPECT_EQ(ex.question, "How many exist?");
  EXPECT_EQ(ex.label, (SpanLabel{1, 3}));
  EXPECT_EQ(ex.origin, UtranOrigin::kDropQuestion);
  EXPECT_EQ(ex.source_question, "How many countries exist?");
  EXPECT_EQ(ex.db_id, "world");
  EXPECT_EQ(paraphrase(ex, IdentityParaphraser{}), ex);

  const UtranExample prep = drop_question("show the names of the countries", parse_sql("SELECT name FROM country"), world);
  EXPECT_EQ(prep.question, "show of the countries");
  const UtranExample article = drop_question("list the regions", parse_sql("SELECT region FROM country"), world);
  EXPECT_EQ(article.question, "list");
  EXPECT_EQ(article.label, (SpanLabel{1, 1}));

  EXPECT_EQ(error_of([&] { drop_question("how big is it", count_countries, world); }), ErrorCode::kNoLinkedSpan);
}

TEST_F(ForgeTest, SwapQuestionUsesForeignName) {
  std::mt19937_64 rng(1);
  const std::vector<const DatabaseSchema*> pool = {&world, &store};
  const auto candidates = distractor_candidates(world, pool);
  ASSERT_FALSE(candidates.empty());
  EXPECT_TRUE(std::count(candidates.begin(), candidates.end(), "invoices"));
  // "first name" shares "name" with the world schema, "invoice id" shares "id".
  EXPECT_FALSE(std::count(candidates.begin(), candidates.end(), "first name"));
  EXPECT_FALSE(std::count(candidates.begin(), candidates.end(), "invoice id"));

  std::set<std::string> seen;
  for (int i = 0; i < 40; ++i) {
    const UtranExample ex = swap_question("How many countries exist?", count_countries, world, pool, rng);
    EXPECT_EQ(ex.origin, UtranOrigin::kSwapQuestion);
    EXPECT_EQ(ex.label.start, 3u);
    const std::string inserted = span_words(ex);
    EXPECT_TRUE(std::count(candidates.begin(), candidates.end(), inserted)) << inserted;
    EXPECT_EQ(ex.question, "How many " + inserted + " exist?");
    EXPECT_NE(ex.question, ex.source_question);
    seen.insert(inserted);
  }
  EXPECT_EQ(seen.size(), candidates.size());

  EXPECT_EQ(error_of([&] { swap_question("How many countries exist?", count_countries, world, {&world}, rng); }),
            ErrorCode::kNoDistractorAvailable);
  EXPECT_EQ(error_of([&] { swap_question("what now", count_countries, world, pool, rng); }), ErrorCode::kNoLinkedSpan);
}

TEST_F(ForgeTest, DropSchema) {
  const SchemaDrop d = drop_schema("show regions of countries", parse_sql("SELECT region FROM country"), world);
  EXPECT_EQ(d.example.question, "show regions of countries");
  EXPECT_EQ(d.example.label, (SpanLabel{2, 2}));
  EXPECT_EQ(span_words(d.example), "regions");
  EXPECT_EQ(d.schema.find_field("country", "region"), nullptr);
  EXPECT_EQ(d.schema.fields.size(), world.fields.size() - 1);
  EXPECT_NO_THROW(load_schema(schema_to_json(d.schema)));
  EXPECT_EQ(example_schema(d.example, world), d.schema);
  EXPECT_EQ(example_schema(drop_question("How many countries exist?", count_countries, world), world), world);
  UtranExample stray = d.example;
  stray.edit = "drop_schema country.nothing";
  EXPECT_EQ(error_of([&] { example_schema(stray, world); }), ErrorCode::kInvalidDocument);

  const FieldId fk = world.find_field("city", "country_code")->field_id;
  EXPECT_EQ(error_of([&] {
              drop_schema("show country code of cities", parse_sql("SELECT country_code FROM city"), world, fk);
            }),
            ErrorCode::kNotDroppable);
  EXPECT_EQ(error_of([&] { drop_schema("show country code of cities", parse_sql("SELECT country_code FROM city"), world); }),
            ErrorCode::kNotDroppable);
}

TEST_F(ForgeTest, TransformLabelsOnCorpus) {
  const auto schemas = testing::fixture_schemas();
  std::vector<const DatabaseSchema*> pool;
  for (const auto& [id, s] : schemas) pool.push_back(&s);
  std::mt19937_64 rng(3);
  std::size_t made = 0;
  for (const auto& src : testing::fixture_corpus()) {
    const DatabaseSchema& s = schemas.at(src.db_id);
    const std::size_t n = words(src.question).size();
    try {
      const auto ex = drop_question(src.question, src.sql, s);
      EXPECT_EQ(ex.label, (SpanLabel{1, words(ex.question).size()}));
      EXPECT_LT(words(ex.question).size(), n);
      ++made;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kNoLinkedSpan);
    }
    try {
      const auto ex = swap_question(src.question, src.sql, s, pool, rng);
      EXPECT_GE(ex.label.start, 1u);
      EXPECT_LE(ex.label.end, words(ex.question).size());
      EXPECT_NE(ex.question, src.question);
      ++made;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kNoLinkedSpan);
    }
    try {
      const auto d = drop_schema(src.question, src.sql, s);
      EXPECT_GE(d.example.label.start, 1u);
      EXPECT_LE(d.example.label.end, n);
      EXPECT_LT(d.example.label.length(), n);
      EXPECT_NO_THROW(load_schema(schema_to_json(d.schema)));
      ++made;
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == ErrorCode::kNoLinkedSpan || e.code() == ErrorCode::kNotDroppable);
    }
  }
  EXPECT_GT(made, 100u);
}

TEST_F(ForgeTest, ParaphraseRemapsSpans) {
  const auto table = PhraseTableParaphraser::builtin();
  const UtranExample dropped = drop_question("How many countries exist?", count_countries, world);
  const UtranExample re = paraphrase(dropped, table);
  EXPECT_EQ(re.question, "How many are there?");
  EXPECT_EQ(re.label, (SpanLabel{1, 4}));

  UtranExample swapped{"show me the invoices of Aruba", "world", UtranOrigin::kSwapQuestion, {4, 4},
                       "show me the countries of Aruba", ""};
  const UtranExample shifted = paraphrase(swapped, table);
  EXPECT_EQ(shifted.question, "list the invoices of Aruba");
  EXPECT_EQ(shifted.label, (SpanLabel{3, 3}));

  // Rewriting inside the span breaks alignment; the words are found again.
  const PhraseTableParaphraser inside({{"billing", "invoice"}, {"show", "list all"}});
  UtranExample city{"show billing city", "world", UtranOrigin::kSwapQuestion, {2, 3}, "show name", ""};
  const UtranExample relinked = paraphrase(city, inside);
  EXPECT_EQ(relinked.question, "list all invoice city");
  EXPECT_EQ(relinked.label, (SpanLabel{1, 4}));
  UtranExample one{"show billing now", "world", UtranOrigin::kSwapQuestion, {3, 3}, "show now", ""};
  EXPECT_EQ(paraphrase(one, inside).label, (SpanLabel{4, 4}));

  const PhraseTableParaphraser eraser(std::vector<std::pair<std::string, std::string>>{{"invoices", "things"}});
  const UtranExample gone = paraphrase(swapped, eraser);
  EXPECT_EQ(gone.question, "show me the things of Aruba");
  EXPECT_EQ(gone.label, (SpanLabel{1, 6}));

  UtranExample original{"display all", "world", UtranOrigin::kOriginal, {}, "display all", ""};
  EXPECT_EQ(paraphrase(original, table).label, (SpanLabel{0, 0}));
  EXPECT_EQ(paraphrase(original, table).question, "show all");
}

TEST_F(ForgeTest, AdversarialFilterTrivialCases) {
  std::vector<UtranExample> pool;
  for (int i = 0; i < 10; ++i) {
    pool.push_back({"list the countries " + std::to_string(i), "world", UtranOrigin::kOriginal, {}, "", ""});
    pool.push_back({"zebra quux " + std::to_string(i), "world", UtranOrigin::kDropQuestion, {1, 3}, "", ""});
  }
  std::size_t calls = 0;
  Regenerator regen = [&](const UtranExample& d, std::size_t) -> std::optional<UtranExample> {
    ++calls;
    UtranExample r = d;
    r.question = "list the things " + std::to_string(calls);
    return r;
  };
  EXPECT_EQ(adversarial_filter(pool, regen, {0, 0.9, 20}), pool);
  std::vector<std::size_t> replaced;
  EXPECT_EQ(adversarial_filter(pool, regen, {3, 1.0, 20}, &replaced), pool);
  EXPECT_EQ(replaced, (std::vector<std::size_t>{0, 0, 0}));
  EXPECT_EQ(calls, 0u);

  const auto refined = adversarial_filter(pool, regen, {1, 0.6, 20}, &replaced);
  EXPECT_GT(calls, 0u);
  EXPECT_EQ(refined.size(), pool.size());
  std::size_t untran = 0;
  for (const auto& ex : refined) untran += !ex.translatable();
  EXPECT_EQ(untran, 10u);

  Regenerator none = [](const UtranExample&, std::size_t) { return std::optional<UtranExample>{}; };
  EXPECT_EQ(error_of([&] { adversarial_filter(pool, none, {1, 0.6, 5}); }), ErrorCode::kGeneratorExhausted);
}

TEST_F(ForgeTest, DatasetRoundTrip) {
  const auto data = forge_dataset(testing::fixture_schemas(), testing::fixture_corpus(), {0.35, {1, 0.9, 20}, 7});
  std::stringstream buf;
  write_dataset(data, buf);
  const std::string text = buf.str();
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), data.size());
  EXPECT_EQ(read_dataset(buf), data);
  const auto first = nlohmann::json::parse(text.substr(0, text.find('\n')));
  for (const char* key : {"question", "db_id", "label", "origin", "source_question"}) {
    EXPECT_TRUE(first.contains(key)) << key;
  }
  std::stringstream bad("{\"question\": 1}\n");
  EXPECT_EQ(error_of([&] { read_dataset(bad); }), ErrorCode::kInvalidDocument);
  EXPECT_EQ(error_of([&] { read_dataset(std::filesystem::path("/nonexistent/x.jsonl")); }), ErrorCode::kIOFailure);
}

TEST_F(ForgeTest, MixRatio) {
  EXPECT_EQ(untranslatable_target(13392 - 4733, kDefaultUntranslatableRatio), 4663u);
  EXPECT_NEAR(4733.0 / 13392.0, kDefaultUntranslatableRatio, 0.005);
  EXPECT_EQ(untranslatable_target(65, 0.35), 35u);
  EXPECT_EQ(untranslatable_target(10, 0.0), 0u);
  EXPECT_EQ(error_of([] { untranslatable_target(10, 1.0); }), ErrorCode::kInvalidArgument);

  const auto corpus = testing::fixture_corpus();
  for (double ratio : {0.2, 0.35, 0.5}) {
    const auto data = forge_dataset(testing::fixture_schemas(), corpus, {ratio, {3, 0.9, 20}, 11});
    std::size_t untran = 0;
    for (const auto& ex : data) {
      if (ex.translatable()) {
        EXPECT_EQ(ex.origin, UtranOrigin::kOriginal);
        continue;
      }
      ++untran;
      const std::size_t n = words(ex.question).size();
      ASSERT_GE(ex.label.start, 1u);
      ASSERT_LE(ex.label.end, n);
      if (ex.origin == UtranOrigin::kDropQuestion) EXPECT_EQ(ex.label, (SpanLabel{1, n}));
    }
    EXPECT_NEAR(static_cast<double>(untran) / static_cast<double>(data.size()), ratio, 0.02) << ratio;
  }
}

TEST_F(ForgeTest, FilterDoesNotMakeStyleEasier) {
  const auto schemas = testing::fixture_schemas();
  const auto corpus = testing::fixture_corpus();
  // Mean over seeds: one 105-example held-out half is too noisy on its own.
  auto held_out_accuracy = [&](std::size_t rounds) {
    double total = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto data = forge_dataset(schemas, corpus, {0.35, {rounds, 0.9, 20}, seed});
      std::vector<UtranExample> train, test;
      for (std::size_t i = 0; i < data.size(); ++i) (i % 2 ? test : train).push_back(data[i]);
      StyleClassifier c;
      c.fit(train);
      total += c.accuracy(test);
    }
    return total / 10;
  };
  const double before = held_out_accuracy(0);
  const double after = held_out_accuracy(3);
  EXPECT_LE(after, before);
  EXPECT_LT(after, 1.0);
  RecordProperty("held_out_before", std::to_string(before));
  RecordProperty("held_out_after", std::to_string(after));
}

}  // namespace
}  // namespace nlidb
