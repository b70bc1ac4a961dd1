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

#include "nlidb/confusion.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "nlidb/error.h"
#include "nlidb/text.h"

namespace nlidb {
namespace {

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double hi = logits.maxCoeff();
  Eigen::VectorXd p = (logits.array() - hi).exp().matrix();
  return p / p.sum();
}

double log_sum_exp(const Eigen::VectorXd& logits) {
  const double hi = logits.maxCoeff();
  return hi + std::log((logits.array() - hi).exp().sum());
}

void check_shapes(const Eigen::MatrixXd& h, const SpanHeadParams& params) {
  if (params.s.size() != h.cols() || params.e.size() != h.cols()) {
    throw Error(ErrorCode::kShapeMismatch,
                "span head dimension " + std::to_string(params.s.size()) + "/" +
                    std::to_string(params.e.size()) + " vs embedding " + std::to_string(h.cols()));
  }
  if (h.rows() == 0) throw Error(ErrorCode::kShapeMismatch, "no span positions");
}

void check_label(const SpanExample& ex) {
  const auto n = static_cast<std::size_t>(ex.h.rows());
  if (ex.label.end < ex.label.start || ex.label.end >= n) {
    throw Error(ErrorCode::kOutOfBounds, "span label outside the positions");
  }
}

}  // namespace

SpanLabel normalize_label(const RawLabel& raw, std::size_t question_length) {
  if (raw.translatable) return {0, 0};
  if (question_length == 0) throw Error(ErrorCode::kOutOfBounds, "untranslatable empty question");
  if (!raw.span) return {1, question_length};
  const auto [s, t] = *raw.span;
  if (s > t || t >= question_length) {
    throw Error(ErrorCode::kOutOfBounds, "span (" + std::to_string(s) + ", " + std::to_string(t) +
                                             ") outside a question of " +
                                             std::to_string(question_length) + " tokens");
  }
  return {s + 1, t + 1};
}

SpanHeadParams SpanHeadParams::zeros(int dim) {
  return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Zero(dim)};
}

Eigen::MatrixXd span_positions(const EmbeddingOutput& embedding, const InputEncoding& encoding) {
  const auto rows = static_cast<Eigen::Index>(encoding.question_end);
  if (encoding.question_begin != 1 || embedding.h_input.rows() < rows) {
    throw Error(ErrorCode::kShapeMismatch, "encoding does not start with [CLS] and the question");
  }
  return embedding.h_input.topRows(rows);
}

SpanDistribution score_spans(const Eigen::MatrixXd& h, const SpanHeadParams& params) {
  check_shapes(h, params);
  return {softmax(h * params.s), softmax(h * params.e)};
}

SpanLabel predict_span(const Eigen::MatrixXd& h, const SpanHeadParams& params) {
  check_shapes(h, params);
  const Eigen::VectorXd a = h * params.s;
  const Eigen::VectorXd b = h * params.e;
  // best start over i <= j, carried left to right
  SpanLabel best;
  double best_score = -std::numeric_limits<double>::infinity();
  std::size_t arg_i = 0;
  for (Eigen::Index j = 0; j < h.rows(); ++j) {
    if (a(j) > a(static_cast<Eigen::Index>(arg_i))) arg_i = static_cast<std::size_t>(j);
    const double score = a(static_cast<Eigen::Index>(arg_i)) + b(j);
    if (score > best_score) {
      best_score = score;
      best = {arg_i, static_cast<std::size_t>(j)};
    } else if (score == best_score && arg_i < best.start) {
      best = {arg_i, static_cast<std::size_t>(j)};
    }
  }
  return best;
}

SpanExample make_span_example(std::string_view question, const DatabaseSchema& schema,
                              const Embedder& embedder, SpanLabel label) {
  const InputEncoding enc =
      serialize(tokenize_question(question), schema, match_picklists(question, schema));
  return {span_positions(embedder.embed(enc), enc), label};
}

Classification classify(std::string_view question, const DatabaseSchema& schema,
                        const Embedder& embedder, const SpanHeadParams& params) {
  const SpanExample ex = make_span_example(question, schema, embedder, {});
  const SpanLabel label = predict_span(ex.h, params);
  return {label.translatable(), label.translatable() ? SpanLabel{} : label};
}

double span_objective(const std::vector<SpanExample>& data, const SpanHeadParams& params) {
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "empty training set");
  double total = 0;
  for (const auto& ex : data) {
    check_shapes(ex.h, params);
    check_label(ex);
    const Eigen::VectorXd a = ex.h * params.s;
    const Eigen::VectorXd b = ex.h * params.e;
    total += a(static_cast<Eigen::Index>(ex.label.start)) - log_sum_exp(a);
    total += b(static_cast<Eigen::Index>(ex.label.end)) - log_sum_exp(b);
  }
  return total / static_cast<double>(data.size());
}

SpanHeadParams span_gradient(const std::vector<SpanExample>& data, const SpanHeadParams& params) {
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "empty training set");
  SpanHeadParams g = SpanHeadParams::zeros(static_cast<int>(params.s.size()));
  for (const auto& ex : data) {
    check_shapes(ex.h, params);
    check_label(ex);
    const SpanDistribution d = score_spans(ex.h, params);
    g.s += ex.h.row(static_cast<Eigen::Index>(ex.label.start)).transpose() - ex.h.transpose() * d.p_start;
    g.e += ex.h.row(static_cast<Eigen::Index>(ex.label.end)).transpose() - ex.h.transpose() * d.p_end;
  }
  g.s /= static_cast<double>(data.size());
  g.e /= static_cast<double>(data.size());
  return g;
}

SpanHeadParams train_span_head(const std::vector<SpanExample>& data, SpanHeadParams init,
                               const SpanTrainOptions& options,
                               std::vector<double>* objective_trace) {
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "empty training set");
  SpanHeadParams p = std::move(init);
  for (std::size_t step = 0; step < options.steps; ++step) {
    const double obj = span_objective(data, p);
    if (!std::isfinite(obj)) {
      throw Error(ErrorCode::kNonFiniteLoss, "objective is not finite at step " + std::to_string(step));
    }
    if (objective_trace != nullptr) objective_trace->push_back(obj);
    const SpanHeadParams g = span_gradient(data, p);
    p.s += options.learning_rate * g.s;
    p.e += options.learning_rate * g.e;
  }
  if (!p.s.allFinite() || !p.e.allFinite()) {
    throw Error(ErrorCode::kNonFiniteLoss, "parameters are not finite");
  }
  if (objective_trace != nullptr) objective_trace->push_back(span_objective(data, p));
  return p;
}

ResponseStrategy response_strategy(const SpanLabel& label, std::size_t question_length) {
  if (label.translatable()) {
    throw Error(ErrorCode::kInvalidForTranslatable, "no strategy for a translatable label");
  }
  if (label.end < label.start || label.end > question_length) {
    throw Error(ErrorCode::kOutOfBounds, "span outside the question");
  }
  return label.length() <= kMaxCorrectableSpan ? ResponseStrategy::kConfirmCorrection
                                               : ResponseStrategy::kNeedRephrase;
}

std::string span_head_text(const SpanHeadParams& params) {
  std::ostringstream out;
  out << std::setprecision(17) << "span_head " << params.s.size() << "\n";
  for (const Eigen::VectorXd* v : {&params.s, &params.e}) {
    for (Eigen::Index i = 0; i < v->size(); ++i) out << (i ? " " : "") << (*v)(i);
    out << "\n";
  }
  return out.str();
}

SpanHeadParams parse_span_head(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string magic;
  long dim = -1;
  if (!(in >> magic >> dim) || magic != "span_head" || dim <= 0) {
    throw Error(ErrorCode::kInvalidDocument, "missing span_head header");
  }
  SpanHeadParams p = SpanHeadParams::zeros(static_cast<int>(dim));
  for (Eigen::VectorXd* v : {&p.s, &p.e}) {
    for (long i = 0; i < dim; ++i) {
      if (!(in >> (*v)(i))) throw Error(ErrorCode::kInvalidDocument, "truncated span head");
    }
  }
  std::string rest;
  if (in >> rest) throw Error(ErrorCode::kInvalidDocument, "trailing data in span head");
  if (!p.s.allFinite() || !p.e.allFinite()) {
    throw Error(ErrorCode::kInvalidDocument, "non-finite span head entry");
  }
  return p;
}

void save_span_head(const SpanHeadParams& params, const std::filesystem::path& path) {
  std::ofstream out(path);
  out << span_head_text(params);
  if (!out) throw Error(ErrorCode::kIOFailure, "cannot write " + path.string());
}

SpanHeadParams load_span_head(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIOFailure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_span_head(ss.str());
}

}  // namespace nlidb
