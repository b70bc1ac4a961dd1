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
#include <limits>
#include <numeric>

#include "nlidb/decoder.h"
#include "nlidb/error.h"
#include "nlidb/sql.h"
#include "nlidb/text.h"

namespace nlidb {
namespace {

struct Node {
  std::vector<Action> actions;
  std::vector<std::size_t> indices;
  double log_prob = 0;
  bool done = false;
};

struct Extension {
  std::size_t parent;
  std::size_t action;  // index, or npos for a finished parent carried over
  double log_prob;
};

constexpr std::size_t kCarry = static_cast<std::size_t>(-1);

// Lexicographic comparison of parent.indices + action.
bool index_less(const std::vector<Node>& beam, const Extension& a, const Extension& b) {
  const auto& pa = beam[a.parent].indices;
  const auto& pb = beam[b.parent].indices;
  const std::size_t na = pa.size() + (a.action == kCarry ? 0 : 1);
  const std::size_t nb = pb.size() + (b.action == kCarry ? 0 : 1);
  for (std::size_t i = 0; i < std::min(na, nb); ++i) {
    const std::size_t x = i < pa.size() ? pa[i] : a.action;
    const std::size_t y = i < pb.size() ? pb[i] : b.action;
    if (x != y) return x < y;
  }
  return na < nb;
}

std::vector<double> one_hot(const DecodeContext& ctx, const Action& a) {
  std::vector<double> p(ctx.space.size(), 0.0);
  p[ctx.space.index(a)] = 1.0;
  return p;
}

std::string question_key(const std::vector<QuestionToken>& tokens) {
  std::vector<std::string> words;
  for (const auto& t : tokens) words.push_back(t.normalized);
  return join(words, " ");
}

}  // namespace

std::vector<Hypothesis> beam_decode(const Scorer& scorer, const DecodeContext& context,
                                    std::size_t beam_width, std::size_t max_length) {
  if (beam_width == 0) throw Error(ErrorCode::kInvalidArgument, "beam width must be positive");
  std::vector<Node> beam(1);
  for (std::size_t step = 0; step < max_length; ++step) {
    if (std::all_of(beam.begin(), beam.end(), [](const Node& n) { return n.done; })) break;
    std::vector<Extension> pool;
    for (std::size_t b = 0; b < beam.size(); ++b) {
      if (beam[b].done) {
        pool.push_back({b, kCarry, beam[b].log_prob});
        continue;
      }
      const std::vector<double> dist = scorer.next_action_distribution(beam[b].actions, context);
      if (dist.size() != context.space.size()) {
        throw Error(ErrorCode::kShapeMismatch, "scorer returned " + std::to_string(dist.size()) +
                                                   " probabilities for " +
                                                   std::to_string(context.space.size()) + " actions");
      }
      for (std::size_t a = 0; a < dist.size(); ++a) {
        if (!(dist[a] > 0.0)) continue;
        pool.push_back({b, a, beam[b].log_prob + std::log(dist[a])});
      }
    }
    auto better = [&](const Extension& x, const Extension& y) {
      if (x.log_prob != y.log_prob) return x.log_prob > y.log_prob;
      return index_less(beam, x, y);
    };
    const std::size_t keep = std::min(beam_width, pool.size());
    std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(keep), pool.end(),
                      better);
    pool.resize(keep);
    std::vector<Node> next;
    next.reserve(keep);
    for (const Extension& e : pool) {
      Node n = beam[e.parent];
      if (e.action != kCarry) {
        const Action a = context.space.at(e.action);
        n.actions.push_back(a);
        n.indices.push_back(e.action);
        n.log_prob = e.log_prob;
        n.done = a.is_eos();
      }
      next.push_back(std::move(n));
    }
    beam = std::move(next);
    if (beam.empty()) break;
  }
  std::vector<Hypothesis> out;
  for (auto& n : beam) {
    if (n.done) out.push_back({std::move(n.actions), n.log_prob});
  }
  return out;
}

std::vector<double> SequenceScorer::distribution(const Weighted& sequences,
                                                 const std::vector<Action>& prefix,
                                                 const DecodeContext& context) {
  std::vector<double> p(context.space.size(), 0.0);
  double total = 0;
  for (const auto& [seq, weight] : sequences) {
    if (weight <= 0 || seq.size() <= prefix.size()) continue;
    if (!std::equal(prefix.begin(), prefix.end(), seq.begin())) continue;
    const Action& next = seq[prefix.size()];
    if (!context.space.legal(next)) continue;
    p[context.space.index(next)] += weight;
    total += weight;
  }
  if (total <= 0) return one_hot(context, Action::generate(eos_id()));
  for (double& x : p) x /= total;
  return p;
}

std::vector<double> SequenceScorer::next_action_distribution(const std::vector<Action>& prefix,
                                                             const DecodeContext& context) const {
  return distribution(sequences_, prefix, context);
}

std::vector<double> FeatureScorer::next_action_distribution(const std::vector<Action>& prefix,
                                                            const DecodeContext& ctx) const {
  if (ctx.embedding == nullptr || ctx.components == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "feature scorer needs embeddings");
  }
  auto gen = [&](std::string_view tok) { return one_hot(ctx, Action::generate(tok)); };
  const Eigen::Index d = ctx.embedding->h_q.cols();
  Eigen::VectorXd state = Eigen::VectorXd::Zero(d);
  if (ctx.embedding->h_q.rows() > 0) state = ctx.embedding->h_q.colwise().mean().transpose();
  auto logit = [&](const Eigen::VectorXd& v) {
    if (v.size() != d) throw Error(ErrorCode::kShapeMismatch, "component dimension mismatch");
    const double norm = v.norm() * state.norm();
    return norm > 0 ? 8.0 * v.dot(state) / norm : 0.0;
  };
  auto softmax_into = [&](std::vector<std::pair<Action, double>> choices) {
    std::vector<double> p(ctx.space.size(), 0.0);
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& c : choices) hi = std::max(hi, c.second);
    double z = 0;
    for (auto& c : choices) z += (c.second = std::exp(c.second - hi));
    for (const auto& c : choices) p[ctx.space.index(c.first)] += c.second / z;
    return p;
  };
  const std::size_t n = prefix.size();
  if (n == 0) return gen("SELECT");
  const bool counting = n >= 2 && prefix[1] == Action::generate("COUNT");
  if (n == 1) {
    bool asks_count = false;
    for (const auto& t : ctx.encoding.question) {
      if (t.normalized == "many" || t.normalized == "number" || t.normalized == "count") {
        asks_count = true;
      }
    }
    std::vector<std::pair<Action, double>> choices;
    choices.emplace_back(Action::generate("COUNT"), asks_count ? 8.0 : -8.0);
    for (const auto& [fid, v] : ctx.components->fields) {
      choices.emplace_back(Action::copy_field(fid), logit(v));
    }
    return softmax_into(std::move(choices));
  }
  if (counting) {
    static const char* kTail[] = {"(", "*", ")", "FROM"};
    if (n < 6) return gen(kTail[n - 2]);
    if (n == 6) {
      std::vector<std::pair<Action, double>> choices;
      for (const auto& [tid, v] : ctx.components->tables) {
        choices.emplace_back(Action::copy_table(tid), logit(v));
      }
      return softmax_into(std::move(choices));
    }
    return gen("EOS");
  }
  if (n == 2) return gen("FROM");
  if (n == 3) {
    const Field& f = ctx.schema.field(FieldId{prefix[1].value});
    return one_hot(ctx, Action::copy_table(f.table_id));
  }
  return gen("EOS");
}

ExemplarScorer::ExemplarScorer(std::shared_ptr<const Scorer> fallback)
    : fallback_(std::move(fallback)) {}

void ExemplarScorer::add(const std::string& db_id, std::string_view question, SqlQuery query) {
  exemplars_[{db_id, question_key(tokenize_question(question))}] = std::move(query);
}

const SqlQuery* ExemplarScorer::lookup(const DecodeContext& context) const {
  auto it = exemplars_.find({context.schema.db_id, question_key(context.encoding.question)});
  return it == exemplars_.end() ? nullptr : &it->second;
}

std::vector<double> ExemplarScorer::next_action_distribution(const std::vector<Action>& prefix,
                                                             const DecodeContext& context) const {
  if (const SqlQuery* q = lookup(context)) {
    try {
      SequenceScorer::Weighted gold = {{sql_to_actions(*q, context.encoding, context.schema), 1.0}};
      return SequenceScorer::distribution(gold, prefix, context);
    } catch (const Error&) {
    }
  }
  if (fallback_) return fallback_->next_action_distribution(prefix, context);
  return one_hot(context, Action::generate(eos_id()));
}

Translator::Translator(std::shared_ptr<const Embedder> embedder,
                       std::shared_ptr<const Scorer> scorer, TranslatorOptions options)
    : embedder_(std::move(embedder)), scorer_(std::move(scorer)), options_(options) {
  if (!embedder_ || !scorer_) throw Error(ErrorCode::kInvalidArgument, "translator needs an embedder and a scorer");
  if (options_.beam_width == 0) throw Error(ErrorCode::kInvalidArgument, "beam width must be positive");
  if (scorer_->uses_features()) {
    fusion_ = make_fusion_params(embedder_->dim(), embedder_->dim(), options_.seed);
  }
}

Translation Translator::translate_detailed(std::string_view question,
                                           const DatabaseSchema& schema) const {
  Translation out;
  const auto tokens = tokenize_question(question);
  const auto matches = match_picklists(question, schema, options_.theta, options_.match_cap);
  out.encoding = serialize(tokens, schema, matches);
  const ActionSpace space(out.encoding);
  EmbeddingOutput embedding;
  ComponentVectors components;
  DecodeContext ctx{out.encoding, schema, space};
  if (scorer_->uses_features()) {
    embedding = embedder_->embed(out.encoding);
    const MetaFeatures features = make_meta_features(schema, embedder_->dim(), options_.seed);
    components = fuse_metadata(embedding, features, fusion_, out.encoding);
    ctx.embedding = &embedding;
    ctx.components = &components;
  }
  for (const auto& h : beam_decode(*scorer_, ctx, options_.beam_width)) {
    try {
      out.candidates.push_back(actions_to_sql(h.actions, out.encoding, schema));
    } catch (const Error&) {
      out.candidates.emplace_back();
    }
  }
  if (auto choice = filter_beam(out.candidates, schema, options_.check)) {
    out.query = std::move(choice->query);
    out.rank = choice->rank;
  }
  return out;
}

std::optional<SqlQuery> Translator::translate(std::string_view question,
                                              const DatabaseSchema& schema) const {
  return translate_detailed(question, schema).query;
}

}  // namespace nlidb
