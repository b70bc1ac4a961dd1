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

// Command-line front end: check, execute, translate, forge, train-span,
// eval and serve.

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nlidb/confusion.h"
#include "nlidb/decoder.h"
#include "nlidb/error.h"
#include "nlidb/eval.h"
#include "nlidb/executor.h"
#include "nlidb/forge.h"
#include "nlidb/schema.h"
#include "nlidb/service.h"
#include "nlidb/sql.h"
#include "nlidb/static_checker.h"

namespace {

using nlidb::Error;
using nlidb::ErrorCode;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIOFailure, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const std::string& path) {
  try {
    return nlohmann::json::parse(slurp(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidDocument, path + ": " + e.what());
  }
}

nlidb::DatabaseSchema schema_from_file(const std::string& path) {
  return nlidb::load_schema(std::string_view(slurp(path)));
}

std::map<std::string, nlidb::DatabaseSchema> spider_schemas(const std::string& tables_json) {
  std::map<std::string, nlidb::DatabaseSchema> out;
  for (const auto& entry : read_json(tables_json)) {
    try {
      auto schema = nlidb::load_spider_schema(entry);
      out.emplace(schema.db_id, std::move(schema));
    } catch (const Error& e) {
      std::cerr << "skipping schema: " << e.what() << "\n";
    }
  }
  return out;
}

std::vector<nlidb::SourceExample> spider_examples(const std::string& path,
                                                  const std::map<std::string, nlidb::DatabaseSchema>& schemas,
                                                  std::size_t* skipped) {
  std::vector<nlidb::SourceExample> out;
  for (const auto& e : read_json(path)) {
    const std::string db_id = e.value("db_id", "");
    if (!schemas.contains(db_id)) {
      ++*skipped;
      continue;
    }
    try {
      out.push_back({db_id, e.at("question").get<std::string>(), nlidb::parse_sql(e.at("query").get<std::string>())});
    } catch (const std::exception&) {
      ++*skipped;
    }
  }
  return out;
}

int run_check(const std::string& schema_path, const std::string& sql, bool strict) {
  nlidb::CheckOptions options;
  options.strict_paper_rules = strict;
  const auto violations = nlidb::check(sql, schema_from_file(schema_path), options);
  if (violations.empty()) {
    std::cout << "OK\n";
    return 0;
  }
  for (const auto& v : violations) {
    std::cout << nlidb::rule_name(v.rule) << " " << v.location << ": " << v.message << "\n";
  }
  return 1;
}

int run_execute(const std::string& bundle, const std::string& sql) {
  const nlidb::Database db = nlidb::load_bundle(nlidb::read_bundle_directory(bundle));
  const auto q = nlidb::parse_sql(sql);
  const auto violations = nlidb::check(q, *db.schema);
  if (!violations.empty()) {
    for (const auto& v : violations) {
      std::cerr << nlidb::rule_name(v.rule) << " " << v.location << ": " << v.message << "\n";
    }
    return 1;
  }
  std::cout << nlidb::result_json(nlidb::execute(q, db)).dump(2) << "\n";
  return 0;
}

struct TranslateArgs {
  std::string schema;
  std::string bundle;
  std::string question;
  std::string exemplars;
  std::string span_head;
  std::size_t beam = nlidb::kDefaultBeamWidth;
  double theta = nlidb::kDefaultMatchThreshold;
};

int run_translate(const TranslateArgs& a) {
  nlidb::DatabaseSchema schema;
  if (!a.bundle.empty()) {
    schema = *nlidb::load_bundle(nlidb::read_bundle_directory(a.bundle)).schema;
  } else {
    schema = schema_from_file(a.schema);
  }
  auto embedder = std::make_shared<const nlidb::ReferenceEmbedder>();
  if (!a.span_head.empty()) {
    const auto c = nlidb::classify(a.question, schema, *embedder, nlidb::load_span_head(a.span_head));
    if (!c.translatable) {
      std::cout << "UNTRANSLATABLE\n";
      return 0;
    }
  }
  auto scorer = std::make_shared<nlidb::ExemplarScorer>(std::make_shared<const nlidb::FeatureScorer>());
  if (!a.exemplars.empty()) {
    for (const auto& j : nlidb::read_json_lines(a.exemplars)) {
      scorer->add(j.at("db_id").get<std::string>(), j.at("question").get<std::string>(),
                  nlidb::parse_sql(nlidb::query_from_record(j)));
    }
  }
  nlidb::TranslatorOptions options;
  options.beam_width = a.beam;
  options.theta = a.theta;
  const nlidb::Translator translator(embedder, scorer, options);
  const auto q = translator.translate(a.question, schema);
  std::cout << (q ? nlidb::format_sql(*q) : "UNTRANSLATABLE") << "\n";
  return 0;
}

struct ForgeArgs {
  std::string spider_dir;
  std::string split = "train_spider.json";
  std::string out;
  double ratio = nlidb::kDefaultUntranslatableRatio;
  std::size_t rounds = 3;
  double tau = 0.9;
  std::uint64_t seed = 0;
  std::string paraphraser = "identity";
};

int run_forge(const ForgeArgs& a) {
  const auto schemas = spider_schemas(a.spider_dir + "/tables.json");
  std::size_t skipped = 0;
  const auto sources = spider_examples(a.spider_dir + "/" + a.split, schemas, &skipped);
  nlidb::ForgeOptions options;
  options.ratio = a.ratio;
  options.filter.rounds = a.rounds;
  options.filter.tau = a.tau;
  options.seed = a.seed;
  if (a.paraphraser == "builtin") {
    options.paraphraser = std::make_shared<nlidb::PhraseTableParaphraser>(nlidb::PhraseTableParaphraser::builtin());
  }
  const auto examples = nlidb::forge_dataset(schemas, sources, options);
  nlidb::write_dataset(examples, std::filesystem::path(a.out));
  std::size_t untranslatable = 0;
  for (const auto& e : examples) untranslatable += e.translatable() ? 0 : 1;
  std::cout << "wrote " << examples.size() << " examples (" << untranslatable
            << " untranslatable), skipped " << skipped << " source examples\n";
  return 0;
}

struct TrainArgs {
  std::string dataset;
  std::string tables;
  std::string out;
  std::size_t steps = 500;
  double lr = 0.1;
};

int run_train_span(const TrainArgs& a) {
  const auto schemas = spider_schemas(a.tables);
  const nlidb::ReferenceEmbedder embedder;
  std::vector<nlidb::SpanExample> data;
  for (const auto& ex : nlidb::read_dataset(std::filesystem::path(a.dataset))) {
    auto it = schemas.find(ex.db_id);
    if (it == schemas.end()) continue;
    data.push_back(nlidb::make_span_example(ex.question, nlidb::example_schema(ex, it->second), embedder, ex.label));
  }
  nlidb::SpanTrainOptions options;
  options.steps = a.steps;
  options.learning_rate = a.lr;
  std::vector<double> trace;
  const auto params = nlidb::train_span_head(data, nlidb::SpanHeadParams::zeros(embedder.dim()), options, &trace);
  nlidb::save_span_head(params, a.out);
  std::cout << "trained on " << data.size() << " examples, objective " << trace.front() << " -> "
            << trace.back() << "\n";
  return 0;
}

int run_eval(const std::string& task, const std::string& pred_path, const std::string& gold_path,
             bool with_values) {
  const auto pred = nlidb::read_json_lines(pred_path);
  const auto gold = nlidb::read_json_lines(gold_path);
  nlidb::EvalReport report;
  report.counts["examples"] = gold.size();
  if (task == "em") {
    std::vector<std::string> p, g;
    for (const auto& r : pred) p.push_back(nlidb::query_from_record(r));
    for (const auto& r : gold) g.push_back(nlidb::query_from_record(r));
    report.em = nlidb::eval_em(p, g, with_values);
  } else {
    std::vector<nlidb::SpanLabel> p, g;
    for (const auto& r : pred) p.push_back(nlidb::label_from_record(r));
    for (const auto& r : gold) g.push_back(nlidb::label_from_record(r));
    std::size_t untranslatable = 0;
    for (const auto& l : g) untranslatable += l.translatable() ? 0 : 1;
    report.counts["untranslatable"] = untranslatable;
    report.counts["translatable"] = g.size() - untranslatable;
    report.translatability_accuracy = nlidb::eval_translatability(p, g);
    if (task == "span") report.span = nlidb::eval_span(p, g);
  }
  std::cout << nlidb::format_report(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Natural-language interface to relational databases"};
  app.require_subcommand(1);

  std::string schema_path, sql;
  bool strict = false;
  auto* check = app.add_subcommand("check", "Statically check a SQL query against a schema");
  check->add_option("--schema", schema_path, "schema.json")->required();
  check->add_option("--sql", sql, "query text")->required();
  check->add_flag("--strict", strict, "scope SELECT items only");

  std::string bundle;
  auto* exec = app.add_subcommand("execute", "Run a SQL query over a bundle directory");
  exec->add_option("--bundle", bundle, "directory with schema.json and CSV files")->required();
  exec->add_option("--sql", sql, "query text")->required();

  TranslateArgs ta;
  auto* translate = app.add_subcommand("translate", "Translate a question to SQL");
  auto* schema_opt = translate->add_option("--schema", ta.schema, "schema.json");
  auto* bundle_opt = translate->add_option("--bundle", ta.bundle, "bundle directory (adds picklists)");
  schema_opt->excludes(bundle_opt);
  translate->add_option("--question", ta.question, "question text")->required();
  translate->add_option("--beam", ta.beam, "beam width")->check(CLI::PositiveNumber);
  translate->add_option("--theta", ta.theta, "picklist threshold")->check(CLI::Range(0.0, 1.0));
  translate->add_option("--exemplars", ta.exemplars, "JSON lines of {db_id, question, query}");
  translate->add_option("--span-head", ta.span_head, "span head parameters for classification");

  ForgeArgs fa;
  auto* forge = app.add_subcommand("forge", "Synthesize an untranslatable-question dataset");
  forge->add_option("--spider-dir", fa.spider_dir, "directory with tables.json")->required();
  forge->add_option("--split", fa.split, "examples file inside the directory");
  forge->add_option("--out", fa.out, "output JSON lines")->required();
  forge->add_option("--ratio", fa.ratio, "untranslatable fraction")->check(CLI::Range(0.0, 0.99));
  forge->add_option("--rounds", fa.rounds, "adversarial filtering rounds");
  forge->add_option("--tau", fa.tau, "easiness threshold")->check(CLI::Range(0.0, 1.0));
  forge->add_option("--seed", fa.seed, "random seed");
  forge->add_option("--paraphraser", fa.paraphraser, "identity or builtin")
      ->check(CLI::IsMember({"identity", "builtin"}));

  TrainArgs tr;
  auto* train = app.add_subcommand("train-span", "Train the confusion span head");
  train->add_option("--dataset", tr.dataset, "JSON lines from forge")->required();
  train->add_option("--tables", tr.tables, "Spider tables.json")->required();
  train->add_option("--out", tr.out, "parameter file")->required();
  train->add_option("--steps", tr.steps, "gradient steps");
  train->add_option("--lr", tr.lr, "learning rate");

  std::string task, pred, gold;
  bool no_values = false;
  auto* eval = app.add_subcommand("eval", "Score predictions");
  eval->add_option("--task", task, "tran, span or em")->required()->check(CLI::IsMember({"tran", "span", "em"}));
  eval->add_option("--pred", pred, "predictions, one JSON record per line")->required();
  eval->add_option("--gold", gold, "gold records, one JSON record per line")->required();
  eval->add_flag("--no-values", no_values, "ignore literal values in EM");

  nlidb::ServiceConfig sc;
  std::vector<std::string> confidential;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--host", sc.host, "listen address");
  serve->add_option("--port", sc.port, "listen port");
  serve->add_option("--data-dir", sc.data_dir, "database and model directory");
  serve->add_option("--beam", sc.beam_width, "beam width")->check(CLI::PositiveNumber);
  serve->add_option("--theta", sc.theta, "picklist threshold")->check(CLI::Range(0.0, 1.0));
  serve->add_option("--max-rounds", sc.max_rounds, "correction rounds");
  serve->add_option("--confidential", confidential, "table.column or db.table.column");
  serve->add_option("--seed", sc.seed, "embedder seed");

  try {
    // Environment values act as defaults; explicit flags win.
    sc = nlidb::ServiceConfig::from_env(sc);
    CLI11_PARSE(app, argc, argv);
    if (*check) return run_check(schema_path, sql, strict);
    if (*exec) return run_execute(bundle, sql);
    if (*translate) {
      if (ta.schema.empty() && ta.bundle.empty()) throw CLI::RequiredError("--schema or --bundle");
      return run_translate(ta);
    }
    if (*forge) return run_forge(fa);
    if (*train) return run_train_span(tr);
    if (*eval) return run_eval(task, pred, gold, !no_values);
    if (*serve) {
      if (!confidential.empty()) sc.confidential_fields = confidential;
      sc.validate();
      nlidb::Service service(sc);
      std::cerr << "listening on " << sc.host << ":" << sc.port << "\n";
      return service.listen() ? 0 : 1;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
