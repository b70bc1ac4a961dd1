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

#ifndef NLIDB_CONFUSION_H_
#define NLIDB_CONFUSION_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nlidb/encoding.h"
#include "nlidb/schema.h"

namespace nlidb {

// Offsets over [CLS] (0) followed by the question tokens (1..n). (0, 0)
// marks a translatable question.
struct SpanLabel {
  std::size_t start = 0;
  std::size_t end = 0;

  bool translatable() const { return start == 0; }
  std::size_t length() const { return end - start + 1; }
  bool operator==(const SpanLabel&) const = default;
};

struct RawLabel {
  bool translatable = true;
  // 0-based inclusive token range over the question.
  std::optional<std::pair<std::size_t, std::size_t>> span;
};

// translatable -> (0, 0); span (s, t) -> (s + 1, t + 1); no span -> (1, n).
// Throws Error(kOutOfBounds) for spans outside the question or an
// untranslatable empty question.
SpanLabel normalize_label(const RawLabel& raw, std::size_t question_length);

struct SpanHeadParams {
  Eigen::VectorXd s;
  Eigen::VectorXd e;

  static SpanHeadParams zeros(int dim);
  bool operator==(const SpanHeadParams& o) const { return s == o.s && e == o.e; }
};

struct SpanDistribution {
  Eigen::VectorXd p_start;
  Eigen::VectorXd p_end;
};

// Rows of `embedding` for [CLS] and the question tokens.
Eigen::MatrixXd span_positions(const EmbeddingOutput& embedding, const InputEncoding& encoding);

// Softmax of s.h_i and e.h_i over the rows of h. Throws Error(kShapeMismatch).
SpanDistribution score_spans(const Eigen::MatrixXd& h, const SpanHeadParams& params);

// argmax over j >= i of s.h_i + e.h_j; ties take the smaller i, then j.
SpanLabel predict_span(const Eigen::MatrixXd& h, const SpanHeadParams& params);

struct Classification {
  bool translatable = true;
  SpanLabel label;
};

Classification classify(std::string_view question, const DatabaseSchema& schema,
                        const Embedder& embedder, const SpanHeadParams& params);

struct SpanExample {
  Eigen::MatrixXd h;  // CLS + question rows
  SpanLabel label;
};

// Embeds a question against a schema and keeps the span rows.
SpanExample make_span_example(std::string_view question, const DatabaseSchema& schema,
                              const Embedder& embedder, SpanLabel label);

struct SpanTrainOptions {
  double learning_rate = 0.1;
  std::size_t steps = 500;
};

// Mean over examples of log p_start(start) + log p_end(end).
double span_objective(const std::vector<SpanExample>& data, const SpanHeadParams& params);
SpanHeadParams span_gradient(const std::vector<SpanExample>& data, const SpanHeadParams& params);

// Full-batch gradient ascent from `init`. Throws Error(kInvalidArgument) on
// an empty data set and Error(kNonFiniteLoss) if the objective diverges.
SpanHeadParams train_span_head(const std::vector<SpanExample>& data, SpanHeadParams init,
                               const SpanTrainOptions& options = {},
                               std::vector<double>* objective_trace = nullptr);

enum class ResponseStrategy { kConfirmCorrection, kNeedRephrase };

inline constexpr std::size_t kMaxCorrectableSpan = 5;

// Throws Error(kInvalidForTranslatable) for (0, 0).
ResponseStrategy response_strategy(const SpanLabel& label, std::size_t question_length);

// Text format: "span_head <d>" then one line of s and one line of e.
void save_span_head(const SpanHeadParams& params, const std::filesystem::path& path);
SpanHeadParams load_span_head(const std::filesystem::path& path);
std::string span_head_text(const SpanHeadParams& params);
SpanHeadParams parse_span_head(std::string_view text);

}  // namespace nlidb

#endif  // NLIDB_CONFUSION_H_
