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

#include "nlidb/eval.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nlidb/error.h"
#include "nlidb/sql.h"

namespace nlidb {
namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(a) + " predictions for " + std::to_string(b) + " gold records");
  }
}

double percent(double sum, std::size_t n) {
  return n == 0 ? 0.0 : 100.0 * sum / static_cast<double>(n);
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%7.2f", v);
  return buf;
}

std::string row(const std::string& name, const std::string& value) {
  std::string out = name;
  out.resize(std::max<std::size_t>(out.size(), 28), ' ');
  return out + value + "\n";
}

}  // namespace

double eval_translatability(const std::vector<SpanLabel>& predicted,
                            const std::vector<SpanLabel>& gold) {
  check_lengths(predicted.size(), gold.size());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (predicted[i].translatable() == gold[i].translatable()) ++correct;
  }
  return percent(static_cast<double>(correct), gold.size());
}

double span_f1(const SpanLabel& predicted, const SpanLabel& gold) {
  if (predicted.translatable() || gold.translatable()) {
    return predicted.translatable() && gold.translatable() ? 1.0 : 0.0;
  }
  const std::size_t lo = std::max(predicted.start, gold.start);
  const std::size_t hi = std::min(predicted.end, gold.end);
  if (hi < lo) return 0.0;
  const double overlap = static_cast<double>(hi - lo + 1);
  return 2.0 * overlap / static_cast<double>(predicted.length() + gold.length());
}

SpanReport eval_span(const std::vector<SpanLabel>& predicted, const std::vector<SpanLabel>& gold) {
  check_lengths(predicted.size(), gold.size());
  struct Sum {
    double acc = 0, f1 = 0;
    std::size_t n = 0;
    SpanScores scores() const { return {percent(acc, n), percent(f1, n), n}; }
  } all, tran, untran;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const double acc = predicted[i] == gold[i] ? 1.0 : 0.0;
    const double f1 = span_f1(predicted[i], gold[i]);
    for (Sum* s : {&all, gold[i].translatable() ? &tran : &untran}) {
      s->acc += acc;
      s->f1 += f1;
      ++s->n;
    }
  }
  return {all.scores(), tran.scores(), untran.scores()};
}

EmReport eval_em(const std::vector<std::string>& predicted, const std::vector<std::string>& gold,
                 bool with_values) {
  check_lengths(predicted.size(), gold.size());
  EmReport r;
  r.total = gold.size();
  for (std::size_t i = 0; i < gold.size(); ++i) {
    std::optional<SqlQuery> g, p;
    try {
      g = parse_sql(gold[i]);
    } catch (const Error&) {
      ++r.gold_parse_failures;
    }
    try {
      p = parse_sql(predicted[i]);
    } catch (const Error&) {
      ++r.prediction_parse_failures;
    }
    if (g && p && exact_set_match(*p, *g, with_values)) ++r.matched;
  }
  r.accuracy = percent(static_cast<double>(r.matched), r.total);
  return r;
}

std::string format_report(const EvalReport& report) {
  std::string out;
  if (report.translatability_accuracy) {
    out += row("Tran Acc", fixed(*report.translatability_accuracy));
  }
  if (report.span) {
    const SpanReport& s = *report.span;
    out += row("Span Acc", fixed(s.all.accuracy));
    out += row("Span F1", fixed(s.all.f1));
    out += row("Span Acc (translatable)", fixed(s.translatable.accuracy));
    out += row("Span F1 (translatable)", fixed(s.translatable.f1));
    out += row("Span Acc (untranslatable)", fixed(s.untranslatable.accuracy));
    out += row("Span F1 (untranslatable)", fixed(s.untranslatable.f1));
  }
  if (report.em) {
    out += row("EM Acc", fixed(report.em->accuracy));
    out += row("prediction parse failures", std::to_string(report.em->prediction_parse_failures));
    out += row("gold parse failures", std::to_string(report.em->gold_parse_failures));
  }
  for (const auto& [name, n] : report.counts) out += row(name, std::to_string(n));
  return out;
}

SpanLabel label_from_record(const nlohmann::json& record) {
  try {
    if (auto it = record.find("label"); it != record.end()) {
      return {it->at("start").get<std::size_t>(), it->at("end").get<std::size_t>()};
    }
    if (auto it = record.find("translatable"); it != record.end()) {
      return it->get<bool>() ? SpanLabel{} : SpanLabel{1, 1};
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidDocument, std::string("bad label: ") + e.what());
  }
  throw Error(ErrorCode::kInvalidDocument, "record has no label: " + record.dump());
}

std::string query_from_record(const nlohmann::json& record) {
  for (const char* key : {"query", "sql"}) {
    if (auto it = record.find(key); it != record.end() && it->is_string()) return it->get<std::string>();
  }
  throw Error(ErrorCode::kInvalidDocument, "record has no query: " + record.dump());
}

std::vector<nlohmann::json> read_json_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIOFailure, "cannot read " + path);
  std::vector<nlohmann::json> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidDocument,
                  path + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace nlidb
