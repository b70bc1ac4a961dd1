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

#ifndef NLIDB_SERVICE_H_
#define NLIDB_SERVICE_H_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlidb/dialogue.h"
#include "nlidb/executor.h"

namespace nlidb {

struct ServiceConfig {
  std::string host = "0.0.0.0";
  int port = 8080;
  std::filesystem::path data_dir = "nlidb-data";
  double theta = kDefaultMatchThreshold;
  std::size_t beam_width = kDefaultBeamWidth;
  std::size_t max_rounds = kDefaultMaxRounds;
  // "table.column" for every database, or "db_id.table.column".
  std::vector<std::string> confidential_fields;
  std::uint64_t seed = 0;

  // Overrides from PHOTON_PORT, PHOTON_DATA_DIR, PHOTON_BEAM, PHOTON_THETA
  // and PHOTON_MAX_ROUNDS. Throws Error(kInvalidArgument) on bad values.
  static ServiceConfig from_env(ServiceConfig base);
  static ServiceConfig from_env();
  void validate() const;
};

struct UploadedFile {
  std::string name;      // form field
  std::string filename;  // may be empty
  std::string content;
};

struct ApiRequest {
  std::string method;
  std::string path;
  std::string body;
  std::vector<UploadedFile> files;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

// Databases live under <data_dir>/databases/<db_id>/ and are reloaded at
// start-up. <data_dir>/span_head.txt and <data_dir>/exemplars.jsonl
// ({"db_id", "question", "query"} per line), when present, configure the
// default engine.
class Service {
 public:
  explicit Service(ServiceConfig config, std::shared_ptr<Engine> engine = nullptr);
  ~Service();

  ApiResponse dispatch(const ApiRequest& request);

  // Validates, persists and registers a bundle; returns its db_id.
  std::string add_database(const BundleFiles& files);
  std::shared_ptr<const Database> database(const std::string& db_id) const;
  std::vector<std::string> database_ids() const;

  const Engine& engine() const { return *engine_; }
  const ServiceConfig& config() const { return config_; }

  // Serves HTTP until stop(). Returns false if the socket cannot be bound.
  bool listen();
  // Binds to an ephemeral port and returns it, or -1.
  int bind_ephemeral();
  bool listen_after_bind();
  void stop();

 private:
  SchemaLoadOptions load_options(const std::string& schema_json) const;
  std::string register_database(const BundleFiles& files, bool persist);
  void load_persisted();

  ApiResponse create_session(const nlohmann::json& body);
  ApiResponse post_message(const std::string& id, const nlohmann::json& body);
  ApiResponse history(const std::string& id);
  ApiResponse list_databases();
  ApiResponse upload_database(const ApiRequest& request);
  ApiResponse graph(const std::string& id);

  ServiceConfig config_;
  std::shared_ptr<Engine> engine_;
  mutable std::shared_mutex db_mutex_;
  std::map<std::string, std::shared_ptr<const Database>> databases_;
  SessionStore sessions_;
  void install_routes();

  struct Http;
  std::unique_ptr<Http> http_;
  bool routes_installed_ = false;
};

// Builds the default engine from a configuration.
std::shared_ptr<Engine> make_default_engine(const ServiceConfig& config);

}  // namespace nlidb

#endif  // NLIDB_SERVICE_H_
