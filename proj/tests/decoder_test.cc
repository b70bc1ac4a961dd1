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
#include <cmath>

#include <gtest/gtest.h>

#include "nlidb/decoder.h"
#include "nlidb/error.h"
#include "nlidb/sql.h"
#include "support/fixtures.h"
#include "support/generators.h"

namespace nlidb {
namespace {

Action gen(std::string_view token) { return Action::generate(token); }

struct Pipeline {
  DatabaseSchema schema;
  InputEncoding enc;
  ActionSpace space;
  Pipeline(DatabaseSchema s, const std::string& question)
      : schema(std::move(s)),
        enc(serialize(tokenize_question(question), schema, match_picklists(question, schema))),
        space(enc) {}
  DecodeContext ctx() const { return DecodeContext{enc, schema, space}; }
};

ErrorCode error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kInvalidArgument;
}

TEST(Vocab, LayoutAndCoverage) {
  const auto& v = reserved_vocab();
  ASSERT_EQ(v.size(), 80u);
  EXPECT_EQ(kReservedVocabSize, 80u);
  for (int d = 0; d < 10; ++d) EXPECT_EQ(v[70 + d], std::to_string(d));
  EXPECT_EQ(v[eos_id()], "EOS");
  EXPECT_EQ(std::set<std::string>(v.begin(), v.end()).size(), v.size());

  testing::Rng rng(13);
  for (int i = 0; i < 300; ++i) {
    const auto schema = testing::random_schema(rng);
    for (const SqlToken& t : sql_tokens(testing::random_query(rng, schema))) {
      if (t.kind == SqlToken::Kind::kKeyword || t.kind == SqlToken::Kind::kPunct) {
        EXPECT_TRUE(reserved_id(t.text).has_value()) << t.text;
      }
    }
  }
  EXPECT_THROW(Action::generate("FROBNICATE"), Error);
}

TEST(ActionsToSql, CountStar) {
  Pipeline p(testing::schema_of(testing::singer_schema_json()), "how many singers");
  const TableId singer = p.schema.find_table("singer")->table_id;
  const std::vector<Action> a = {gen("SELECT"), gen("COUNT"), gen("("), gen("*"), gen(")"),
                                 gen("FROM"), Action::copy_table(singer), Action::generate(eos_id())};
  EXPECT_EQ(actions_to_sql(a, p.enc, p.schema), "SELECT COUNT(*) FROM singer");
  EXPECT_EQ(sql_to_actions(parse_sql("SELECT COUNT(*) FROM singer"), p.enc, p.schema), a);
}

TEST(ActionsToSql, QuotedValueCopy) {
  const Database db = testing::world_database();
  Pipeline p(*db.schema, "countries in the Carribean");
  const FieldId name = p.schema.find_field("country", "name")->field_id;
  const FieldId region = p.schema.find_field("country", "region")->field_id;
  const TableId country = p.schema.find_table("country")->table_id;
  const std::vector<Action> a = {gen("SELECT"), Action::copy_field(name), gen("FROM"),
                                 Action::copy_table(country), gen("WHERE"), Action::copy_field(region),
                                 gen("="), gen("'"), Action::copy_question(3), gen("'"),
                                 Action::generate(eos_id())};
  const std::string sql = actions_to_sql(a, p.enc, p.schema);
  EXPECT_EQ(sql, "SELECT country.name FROM country WHERE country.region = 'Carribean'");
  EXPECT_NO_THROW(parse_sql(sql));
}

TEST(ActionsToSql, Malformed) {
  Pipeline p(testing::schema_of(testing::singer_schema_json()), "singers");
  const TableId singer = p.schema.find_table("singer")->table_id;
  auto code = [&](std::vector<Action> a) { return error_of([&] { actions_to_sql(a, p.enc, p.schema); }); };
  EXPECT_EQ(code({gen("SELECT"), gen("*"), gen("FROM"), Action::copy_table(singer)}),
            ErrorCode::kMalformedActionSequence);
  EXPECT_EQ(code({gen("SELECT"), gen("'"), Action::copy_question(0), Action::generate(eos_id())}),
            ErrorCode::kMalformedActionSequence);
  EXPECT_EQ(code({gen("SELECT"), Action::generate(eos_id()), gen("*")}), ErrorCode::kMalformedActionSequence);
  EXPECT_EQ(code({Action::generate(50), Action::generate(eos_id())}), ErrorCode::kMalformedActionSequence);
  EXPECT_EQ(code({Action::copy_question(9), Action::generate(eos_id())}), ErrorCode::kMalformedActionSequence);
}

TEST(SqlToActions, DigitsAndUncopyable) {
  Pipeline p(testing::schema_of(testing::singer_schema_json()), "singers older than twenty");
  const auto a = sql_to_actions(parse_sql("SELECT name FROM singer WHERE age > 20"), p.enc, p.schema);
  const std::vector<Action> tail = {gen("2"), gen("0"), Action::generate(eos_id())};
  ASSERT_GE(a.size(), 3u);
  EXPECT_TRUE(std::equal(tail.begin(), tail.end(), a.end() - 3));
  EXPECT_EQ(error_of([&] { sql_to_actions(parse_sql("SELECT name FROM singer WHERE country = 'Vienna'"), p.enc, p.schema); }),
            ErrorCode::kUncopyableLiteral);

  Pipeline q(testing::schema_of(testing::singer_schema_json()), "singers older than 20");
  const auto b = sql_to_actions(parse_sql("SELECT name FROM singer WHERE age > 20"), q.enc, q.schema);
  EXPECT_EQ(b[b.size() - 2], Action::copy_question(3));
}

TEST(ActionRoundTripProperty, EmWithValues) {
  testing::Rng rng(19);
  std::size_t copyable = 0;
  for (int i = 0; i < 300; ++i) {
    const auto schema = testing::random_schema(rng);
    SqlQuery q = testing::random_query(rng, schema);
    Pipeline p(schema, testing::question_for_literals(q));
    qualify_columns(q, p.schema);
    std::vector<Action> actions;
    try {
      actions = sql_to_actions(q, p.enc, p.schema);
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), ErrorCode::kUncopyableLiteral) << e.what();
      continue;
    }
    ++copyable;
    for (const Action& a : actions) EXPECT_TRUE(p.space.legal(a));
    const std::string sql = actions_to_sql(actions, p.enc, p.schema);
    EXPECT_TRUE(exact_set_match(parse_sql(sql), q, true)) << sql << "\nvs\n" << format_sql(q);
  }
  EXPECT_GE(copyable, 250u);
}

TEST(ActionSpace, Indexing) {
  Pipeline p(testing::schema_of(testing::singer_schema_json()), "a b c");
  EXPECT_EQ(p.space.size(), 80u + 3u + 2u + 10u);
  for (std::size_t i = 0; i < p.space.size(); ++i) EXPECT_EQ(p.space.index(p.space.at(i)), i);
  EXPECT_FALSE(p.space.legal(Action::copy_question(3)));
  EXPECT_FALSE(p.space.legal(Action::copy_field(FieldId{10})));
  EXPECT_EQ(error_of([&] { p.space.index(Action::copy_table(TableId{2})); }), ErrorCode::kOutOfBounds);
}

// Exhaustive top-k of a prefix-free weighted mixture: each sequence has
// probability weight / total.
std::vector<Hypothesis> exhaustive(const SequenceScorer::Weighted& seqs, const DecodeContext& ctx) {
  std::vector<Hypothesis> all;
  for (const auto& [actions, w] : seqs) {
    double lp = 0;
    std::vector<Action> prefix;
    for (const Action& a : actions) {
      const auto d = SequenceScorer::distribution(seqs, prefix, ctx);
      lp += std::log(d[ctx.space.index(a)]);
      prefix.push_back(a);
    }
    all.push_back({actions, lp});
  }
  std::sort(all.begin(), all.end(), [&](const Hypothesis& x, const Hypothesis& y) {
    if (x.log_prob != y.log_prob) return x.log_prob > y.log_prob;
    std::vector<std::size_t> a, b;
    for (const auto& act : x.actions) a.push_back(ctx.space.index(act));
    for (const auto& act : y.actions) b.push_back(ctx.space.index(act));
    return a < b;
  });
  return all;
}

TEST(BeamDecode, GreedyFollowsMassOnePath) {
  Pipeline p(testing::schema_of(testing::singer_schema_json()), "how many singers");
  const auto gold = sql_to_actions(parse_sql("SELECT COUNT(*) FROM singer"), p.enc, p.schema);
  const SequenceScorer scorer({{gold, 1.0}});
  const auto out = beam_decode(scorer, p.ctx(), 1);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].actions, gold);
  EXPECT_DOUBLE_EQ(out[0].log_prob, 0.0);
}

TEST(BeamDecode, TwoStepToyMatchesEnumeration) {
  Pipeline p(testing::schema_of(testing::singer_schema_json()), "x");
  const Action a = gen("SELECT"), b = gen("FROM"), c = gen("WHERE"), e = Action::generate(eos_id());
  const SequenceScorer::Weighted seqs = {
      {{e}, 0.2}, {{a, e}, 0.15}, {{a, c, e}, 0.35}, {{b, e}, 0.03}, {{b, c, e}, 0.27}};
  const SequenceScorer scorer(seqs);
  const auto out = beam_decode(scorer, p.ctx(), 3);
  const auto want = exhaustive(seqs, p.ctx());
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(out[i].actions, want[i].actions) << i;
    EXPECT_NEAR(out[i].log_prob, want[i].log_prob, 1e-12);
  }
  EXPECT_NEAR(std::exp(out[0].log_prob), 0.35, 1e-12);
}

TEST(BeamDecodeProperty, OrderingBoundsLegalityAndExhaustiveMonotonicity) {
  testing::Rng rng(29);
  Pipeline p(testing::schema_of(testing::singer_schema_json()), "one two three");
  for (int trial = 0; trial < 100; ++trial) {
    SequenceScorer::Weighted seqs;
    const std::size_t n = 1 + rng() % 12;
    for (std::size_t s = 0; s < n; ++s) {
      std::vector<Action> seq;
      const std::size_t len = rng() % 4;
      for (std::size_t k = 0; k < len; ++k) {
        std::size_t idx;
        do {
          idx = rng() % p.space.size();
        } while (p.space.at(idx).is_eos());
        seq.push_back(p.space.at(idx));
      }
      seq.push_back(Action::generate(eos_id()));
      bool dup = false;
      for (const auto& [other, w] : seqs) dup = dup || other == seq;
      if (!dup) seqs.push_back({seq, 0.05 + static_cast<double>(rng() % 1000) / 1000.0});
    }
    const SequenceScorer scorer(seqs);
    const auto want = exhaustive(seqs, p.ctx());
    std::optional<std::vector<Action>> top_at_exhaustive;
    for (std::size_t w : {1u, 2u, 3u, 5u, 16u, 64u, 128u}) {
      const auto out = beam_decode(scorer, p.ctx(), w);
      ASSERT_LE(out.size(), w);
      for (std::size_t i = 1; i < out.size(); ++i) ASSERT_GE(out[i - 1].log_prob, out[i].log_prob);
      for (const auto& h : out) {
        ASSERT_TRUE(h.actions.back().is_eos());
        for (const auto& a : h.actions) ASSERT_TRUE(p.space.legal(a));
      }
      // Every prefix fits in the beam from here on, so search is exact.
      if (w >= 4 * seqs.size()) {
        ASSERT_EQ(out.size(), seqs.size());
        for (std::size_t i = 0; i < out.size(); ++i) ASSERT_EQ(out[i].actions, want[i].actions);
        if (top_at_exhaustive) ASSERT_EQ(out[0].actions, *top_at_exhaustive);
        top_at_exhaustive = out[0].actions;
      }
    }
  }
}

TEST(BeamDecode, RejectsWrongDistributionSize) {
  struct Bad : Scorer {
    std::vector<double> next_action_distribution(const std::vector<Action>&, const DecodeContext&) const override {
      return {1.0};
    }
  };
  Pipeline p(testing::schema_of(testing::singer_schema_json()), "x");
  EXPECT_EQ(error_of([&] { beam_decode(Bad{}, p.ctx(), 4); }), ErrorCode::kShapeMismatch);
}

TEST(BeamDecode, LengthBound) {
  struct Forever : Scorer {
    std::vector<double> next_action_distribution(const std::vector<Action>&, const DecodeContext& c) const override {
      std::vector<double> d(c.space.size(), 0.0);
      d[c.space.index(Action::generate("SELECT"))] = 1.0;
      return d;
    }
  };
  Pipeline p(testing::schema_of(testing::singer_schema_json()), "x");
  EXPECT_TRUE(beam_decode(Forever{}, p.ctx(), 2, 10).empty());
}

class TranslatorTest : public ::testing::Test {
 protected:
  DatabaseSchema schema = testing::schema_of(testing::singer_schema_json());
  std::shared_ptr<const Embedder> embedder = std::make_shared<const ReferenceEmbedder>(0, 64);

  std::vector<Action> actions_for(const std::string& question, const std::string& sql) {
    Pipeline p(schema, question);
    return sql_to_actions(parse_sql(sql), p.enc, p.schema);
  }
};

TEST_F(TranslatorTest, ExemplarScorerReturnsGold) {
  auto scorer = std::make_shared<ExemplarScorer>();
  const SqlQuery gold = parse_sql("SELECT name FROM singer WHERE age > 40");
  scorer->add("concert_singer", "Who is older than 40?", gold);
  const Translator t(embedder, scorer);
  const auto got = t.translate("who is older than 40", schema);
  ASSERT_TRUE(got.has_value());
  SqlQuery want = gold;
  qualify_columns(want, schema);
  EXPECT_TRUE(exact_set_match(*got, want, true));
  EXPECT_FALSE(t.translate("something else", schema).has_value());
}

TEST_F(TranslatorTest, OnlyInvalidCandidatesGiveNone) {
  const std::string q = "show ages of concerts";
  const auto bad = actions_for(q, "SELECT singer.age FROM concert");
  const Translator t(embedder, std::make_shared<SequenceScorer>(SequenceScorer::Weighted{{bad, 1.0}}));
  const auto d = t.translate_detailed(q, schema);
  EXPECT_FALSE(d.query.has_value());
  EXPECT_EQ(d.candidates.size(), 1u);
}

TEST_F(TranslatorTest, StaticCheckSkipsInvalidRankOne) {
  const std::string q = "names of singers older than 40";
  const auto bad = actions_for(q, "SELECT concert.theme FROM singer WHERE singer.age > 40");
  const auto good = actions_for(q, "SELECT singer.name FROM singer WHERE singer.age > 40");
  const Translator t(embedder, std::make_shared<SequenceScorer>(SequenceScorer::Weighted{{bad, 0.6}, {good, 0.4}}));
  const auto d = t.translate_detailed(q, schema);
  ASSERT_TRUE(d.query.has_value());
  EXPECT_EQ(d.rank, 2u);
  EXPECT_EQ(format_sql(*d.query), "SELECT singer.name FROM singer WHERE singer.age > 40");
}

TEST_F(TranslatorTest, FeatureScorerProducesValidQueries) {
  const Translator t(embedder, std::make_shared<FeatureScorer>());
  for (const char* q : {"how many singers are there", "list the concert themes", "show every name"}) {
    const auto d = t.translate_detailed(q, schema);
    ASSERT_TRUE(d.query.has_value()) << q;
    EXPECT_TRUE(check(*d.query, schema).empty());
    EXPECT_LE(d.candidates.size(), kDefaultBeamWidth);
  }
  const auto count = t.translate("how many singers are there", schema);
  ASSERT_TRUE(count.has_value());
  EXPECT_EQ(count->select.items[0].aggregate, Aggregate::kCount);
}

}  // namespace
}  // namespace nlidb
