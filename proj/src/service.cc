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

#include "nlidb/service.h"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>

#include "httplib.h"
#include "nlidb/error.h"
#include "nlidb/sql.h"
#include "nlidb/text.h"

namespace nlidb {

struct Service::Http {
  httplib::Server server;
};

namespace {

ApiResponse error_response(const Error& e) {
  int status = 400;
  switch (e.code()) {
    case ErrorCode::kUnknownSession:
    case ErrorCode::kUnknownDatabase: status = 404; break;
    case ErrorCode::kNoDatabaseSelected: status = 409; break;
    case ErrorCode::kIOFailure: status = 500; break;
    default: break;
  }
  return {status, {{"code", error_code_name(e.code())}, {"message", e.what()}}};
}

ApiResponse plain_error(int status, std::string code, std::string message) {
  return {status, {{"code", std::move(code)}, {"message", std::move(message)}}};
}

std::vector<std::string> split_path(std::string_view path) {
  if (auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
  std::vector<std::string> parts;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      if (!cur.empty()) parts.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) parts.push_back(std::move(cur));
  return parts;
}

nlohmann::json parse_body(const std::string& body) {
  try {
    nlohmann::json j = nlohmann::json::parse(body.empty() ? "{}" : body);
    if (!j.is_object()) throw Error(ErrorCode::kInvalidDocument, "request body must be an object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidDocument, std::string("malformed JSON: ") + e.what());
  }
}

std::string string_field(const nlohmann::json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("missing string field '") + key + "'");
  }
  return it->get<std::string>();
}

bool safe_db_id(const std::string& id) {
  if (id.empty() || id.size() > 128 || id[0] == '.') return false;
  for (char c : id) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  }
  return true;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string base_name(const std::string& name) {
  return std::filesystem::path(name).filename().string();
}

std::string env_or(const char* name) {
  const char* v = std::getenv(name);
  return v == nullptr ? std::string() : std::string(v);
}

template <typename T>
T parse_env_number(const char* name, const std::string& text) {
  try {
    std::size_t used = 0;
    T value;
    if constexpr (std::is_floating_point_v<T>) {
      value = static_cast<T>(std::stod(text, &used));
    } else {
      value = static_cast<T>(std::stoll(text, &used));
    }
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, std::string(name) + " is not a number: '" + text + "'");
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ServiceConfig ServiceConfig::from_env(ServiceConfig c) {
  if (auto v = env_or("PHOTON_PORT"); !v.empty()) c.port = parse_env_number<int>("PHOTON_PORT", v);
  if (auto v = env_or("PHOTON_DATA_DIR"); !v.empty()) c.data_dir = v;
  if (auto v = env_or("PHOTON_BEAM"); !v.empty()) {
    const auto beam = parse_env_number<long long>("PHOTON_BEAM", v);
    if (beam < 1) throw Error(ErrorCode::kInvalidArgument, "PHOTON_BEAM must be at least 1");
    c.beam_width = static_cast<std::size_t>(beam);
  }
  if (auto v = env_or("PHOTON_THETA"); !v.empty()) c.theta = parse_env_number<double>("PHOTON_THETA", v);
  if (auto v = env_or("PHOTON_MAX_ROUNDS"); !v.empty()) {
    const auto rounds = parse_env_number<long long>("PHOTON_MAX_ROUNDS", v);
    if (rounds < 0) throw Error(ErrorCode::kInvalidArgument, "PHOTON_MAX_ROUNDS must be non-negative");
    c.max_rounds = static_cast<std::size_t>(rounds);
  }
  c.validate();
  return c;
}

ServiceConfig ServiceConfig::from_env() { return from_env(ServiceConfig{}); }

void ServiceConfig::validate() const {
  if (beam_width < 1) throw Error(ErrorCode::kInvalidArgument, "beam width must be at least 1");
  if (!(theta >= 0.0 && theta <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "theta must lie in [0, 1]");
  if (port < 0 || port > 65535) throw Error(ErrorCode::kInvalidArgument, "port out of range");
}

std::shared_ptr<Engine> make_default_engine(const ServiceConfig& config) {
  auto embedder = std::make_shared<const ReferenceEmbedder>(config.seed);
  SpanHeadParams head = SpanHeadParams::zeros(embedder->dim());
  const auto head_path = config.data_dir / "span_head.txt";
  if (std::filesystem::exists(head_path)) {
    head = load_span_head(head_path);
    if (head.s.size() != embedder->dim()) {
      throw Error(ErrorCode::kShapeMismatch, "span head dimension does not match the embedder");
    }
  }
  auto exemplars = std::make_shared<ExemplarScorer>(std::make_shared<const FeatureScorer>());
  const auto exemplar_path = config.data_dir / "exemplars.jsonl";
  if (std::filesystem::exists(exemplar_path)) {
    std::istringstream in(read_text(exemplar_path));
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        exemplars->add(j.at("db_id").get<std::string>(), j.at("question").get<std::string>(),
                       parse_sql(j.at("query").get<std::string>()));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kInvalidDocument, std::string("bad exemplar line: ") + e.what());
      }
    }
  }
  TranslatorOptions topt;
  topt.beam_width = config.beam_width;
  topt.theta = config.theta;
  topt.seed = config.seed;
  auto engine = std::make_shared<Engine>();
  engine->classifier = std::make_shared<const SpanHeadClassifier>(embedder, std::move(head));
  engine->translator = std::make_shared<const Translator>(embedder, exemplars, topt);
  engine->mask_scorer = std::make_shared<const ReferenceMaskScorer>(embedder);
  engine->max_rounds = config.max_rounds;
  return engine;
}

Service::Service(ServiceConfig config, std::shared_ptr<Engine> engine)
    : config_(std::move(config)), engine_(std::move(engine)), http_(std::make_unique<Http>()) {
  config_.validate();
  if (!engine_) engine_ = make_default_engine(config_);
  load_persisted();
}

Service::~Service() { stop(); }

SchemaLoadOptions Service::load_options(const std::string& schema_json) const {
  SchemaLoadOptions options;
  if (config_.confidential_fields.empty()) return options;
  const DatabaseSchema schema = load_schema(std::string_view(schema_json));
  for (const auto& entry : config_.confidential_fields) {
    std::vector<std::string> parts;
    std::stringstream ss(to_lower(entry));
    for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
    if (parts.size() == 3) {
      if (parts[0] != to_lower(schema.db_id)) continue;
      parts.erase(parts.begin());
    }
    if (parts.size() != 2 || schema.find_field(parts[0], parts[1]) == nullptr) continue;
    options.confidential_fields.push_back(parts[0] + "." + parts[1]);
  }
  return options;
}

std::string Service::register_database(const BundleFiles& files, bool persist) {
  auto db = std::make_shared<const Database>(load_bundle(files, load_options(files.schema_json)));
  const std::string id = db->schema->db_id;
  if (!safe_db_id(id)) {
    throw Error(ErrorCode::kInvalidDocument, "db_id '" + id + "' is not a safe directory name");
  }
  if (persist) write_bundle_directory(files, config_.data_dir / "databases" / id);
  std::unique_lock lock(db_mutex_);
  databases_[id] = std::move(db);
  return id;
}

void Service::load_persisted() {
  const auto root = config_.data_dir / "databases";
  std::error_code ec;
  if (!std::filesystem::is_directory(root, ec)) return;
  for (const auto& entry : std::filesystem::directory_iterator(root)) {
    if (entry.is_directory()) register_database(read_bundle_directory(entry.path()), false);
  }
}

std::string Service::add_database(const BundleFiles& files) {
  return register_database(files, true);
}

std::shared_ptr<const Database> Service::database(const std::string& db_id) const {
  std::shared_lock lock(db_mutex_);
  auto it = databases_.find(db_id);
  if (it == databases_.end()) throw Error(ErrorCode::kUnknownDatabase, "no database '" + db_id + "'");
  return it->second;
}

std::vector<std::string> Service::database_ids() const {
  std::shared_lock lock(db_mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, db] : databases_) ids.push_back(id);
  return ids;
}

ApiResponse Service::dispatch(const ApiRequest& request) {
  try {
    const auto parts = split_path(request.path);
    const std::string& m = request.method;
    if (parts.size() == 1 && parts[0] == "health" && m == "GET") return {200, {{"status", "ok"}}};
    if (!parts.empty() && parts[0] == "sessions") {
      if (parts.size() == 1 && m == "POST") return create_session(parse_body(request.body));
      if (parts.size() == 3 && parts[2] == "messages" && m == "POST") {
        return post_message(parts[1], parse_body(request.body));
      }
      if (parts.size() == 3 && parts[2] == "history" && m == "GET") return history(parts[1]);
    }
    if (!parts.empty() && parts[0] == "databases") {
      if (parts.size() == 1 && m == "GET") return list_databases();
      if (parts.size() == 1 && m == "POST") return upload_database(request);
      if (parts.size() == 3 && parts[2] == "graph" && m == "GET") return graph(parts[1]);
    }
    return plain_error(404, "NotFound", "no route for " + m + " " + request.path);
  } catch (const Error& e) {
    return error_response(e);
  }
}

ApiResponse Service::create_session(const nlohmann::json& body) {
  const std::string db_id = string_field(body, "db_id");
  database(db_id);
  return {200, {{"session_id", sessions_.create(db_id)}}};
}

ApiResponse Service::post_message(const std::string& id, const nlohmann::json& body) {
  const std::string text = string_field(body, "text");
  return sessions_.with_session(id, [&](DialogueSession& session) -> ApiResponse {
    std::shared_ptr<const Database> db;
    if (!session.db_id.empty()) db = database(session.db_id);
    return {200, response_json(handle_message(session, text, db.get(), *engine_))};
  });
}

ApiResponse Service::history(const std::string& id) {
  return sessions_.with_session(id, [&](DialogueSession& session) -> ApiResponse {
    nlohmann::json turns = nlohmann::json::array();
    for (const auto& t : session.history) turns.push_back(turn_json(t));
    return {200, {{"session_id", id}, {"db_id", session.db_id}, {"turns", std::move(turns)}}};
  });
}

ApiResponse Service::list_databases() {
  nlohmann::json out = nlohmann::json::array();
  std::shared_lock lock(db_mutex_);
  for (const auto& [id, db] : databases_) {
    out.push_back({{"db_id", id}, {"table_count", db->schema->tables.size()}});
  }
  return {200, out};
}

ApiResponse Service::upload_database(const ApiRequest& request) {
  BundleFiles files;
  bool have_schema = false;
  if (!request.files.empty()) {
    for (const auto& f : request.files) {
      const std::string name = base_name(f.filename.empty() ? f.name : f.filename);
      if (f.name == "schema" || ends_with(name, ".json")) {
        files.schema_json = f.content;
        have_schema = true;
      } else if (ends_with(name, ".csv")) {
        files.csv_text[name.substr(0, name.size() - 4)] = f.content;
      } else {
        files.csv_text[name] = f.content;
      }
    }
  } else {
    const nlohmann::json body = parse_body(request.body);
    auto schema = body.find("schema");
    if (schema != body.end()) {
      files.schema_json = schema->is_string() ? schema->get<std::string>() : schema->dump();
      have_schema = true;
    }
    if (auto tables = body.find("tables"); tables != body.end()) {
      if (!tables->is_object()) throw Error(ErrorCode::kInvalidDocument, "'tables' must map names to CSV text");
      for (const auto& [name, csv] : tables->items()) {
        if (!csv.is_string()) throw Error(ErrorCode::kInvalidDocument, "CSV for '" + name + "' must be a string");
        files.csv_text[name] = csv.get<std::string>();
      }
    }
  }
  if (!have_schema) throw Error(ErrorCode::kInvalidDocument, "bundle has no schema.json");
  return {200, {{"db_id", add_database(files)}}};
}

ApiResponse Service::graph(const std::string& id) {
  return {200, schema_graph(*database(id)->schema)};
}

void Service::install_routes() {
  if (routes_installed_) return;
  routes_installed_ = true;
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    ApiRequest api;
    api.method = req.method;
    api.path = req.path;
    api.body = req.body;
    for (const auto& [name, file] : req.files) {
      api.files.push_back({name, file.filename, file.content});
    }
    const ApiResponse out = dispatch(api);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  };
  http_->server.Get(".*", handler);
  http_->server.Post(".*", handler);
}

bool Service::listen() {
  install_routes();
  return http_->server.listen(config_.host, config_.port);
}

int Service::bind_ephemeral() {
  install_routes();
  return http_->server.bind_to_any_port(config_.host);
}

bool Service::listen_after_bind() { return http_->server.listen_after_bind(); }

void Service::stop() {
  if (http_) http_->server.stop();
}

}  // namespace nlidb
