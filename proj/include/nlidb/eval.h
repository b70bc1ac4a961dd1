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

#ifndef NLIDB_EVAL_H_
#define NLIDB_EVAL_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlidb/confusion.h"

namespace nlidb {

// Percent of examples whose translatable bit agrees. Throws
// Error(kLengthMismatch).
double eval_translatability(const std::vector<SpanLabel>& predicted,
                            const std::vector<SpanLabel>& gold);

// Token-overlap F1 of one prediction; 1 iff both are (0, 0) when either is.
double span_f1(const SpanLabel& predicted, const SpanLabel& gold);

struct SpanScores {
  double accuracy = 0;  // percent
  double f1 = 0;        // percent
  std::size_t count = 0;
};

struct SpanReport {
  SpanScores all;
  SpanScores translatable;    // gold (0, 0)
  SpanScores untranslatable;  // gold with a span
};

SpanReport eval_span(const std::vector<SpanLabel>& predicted, const std::vector<SpanLabel>& gold);

struct EmReport {
  double accuracy = 0;  // percent over all examples
  std::size_t total = 0;
  std::size_t matched = 0;
  std::size_t prediction_parse_failures = 0;
  std::size_t gold_parse_failures = 0;
};

// Unparsable predictions count as misses.
EmReport eval_em(const std::vector<std::string>& predicted, const std::vector<std::string>& gold,
                 bool with_values);

struct EvalReport {
  std::optional<double> translatability_accuracy;
  std::optional<SpanReport> span;
  std::optional<EmReport> em;
  std::map<std::string, std::size_t> counts;
};

std::string format_report(const EvalReport& report);

// Labels from dataset or prediction records: {"label": {"start", "end"}}
// or {"translatable": bool}, where false reads as the span (1, 1).
SpanLabel label_from_record(const nlohmann::json& record);
// Query text from {"query"} or {"sql"}.
std::string query_from_record(const nlohmann::json& record);

std::vector<nlohmann::json> read_json_lines(const std::string& path);

}  // namespace nlidb

#endif  // NLIDB_EVAL_H_
