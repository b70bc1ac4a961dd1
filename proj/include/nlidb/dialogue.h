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

#ifndef NLIDB_DIALOGUE_H_
#define NLIDB_DIALOGUE_H_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "nlidb/confusion.h"
#include "nlidb/corrector.h"
#include "nlidb/decoder.h"
#include "nlidb/executor.h"
#include "nlidb/static_checker.h"

namespace nlidb {

enum class SessionState { kInit, kConfirmResult, kConfirmCorrection, kNeedRephrase, kInvalidQuery };

std::string_view state_name(SessionState state);  // "INIT", "CONFIRM_RESULT", ...

struct Turn {
  std::string speaker;  // "user" or "system"
  std::string text;
  SessionState state = SessionState::kInit;
  std::int64_t timestamp_ms = 0;
};

struct PendingCorrection {
  std::string question;
  SpanLabel span;
  std::vector<CorrectionCandidate> candidates;  // ranked
  std::size_t chosen = 0;
  std::string corrected;
};

struct DialogueSession {
  std::string session_id;
  std::string db_id;
  SessionState state = SessionState::kInit;
  std::optional<PendingCorrection> pending;
  std::size_t correction_rounds = 0;
  std::vector<Turn> history;
};

struct Response {
  SessionState state = SessionState::kInit;
  std::string text;
  std::optional<ResultSet> result;
  std::vector<CorrectionCandidate> suggestions;
  std::optional<std::string> sql;
  std::optional<SpanLabel> span;
};

nlohmann::json response_json(const Response& response);
nlohmann::json turn_json(const Turn& turn);

bool detect_sql_input(std::string_view text);

// Slots: CONFIRM_RESULT needs "sql", CONFIRM_CORRECTION needs "corrected".
// Throws Error(kMissingSlot), or Error(kInvalidArgument) for INIT.
std::string render_template(SessionState state, const std::map<std::string, std::string>& slots);

class TranslatabilityClassifier {
 public:
  virtual ~TranslatabilityClassifier() = default;
  virtual Classification classify(std::string_view question, const DatabaseSchema& schema) const = 0;
};

class SpanHeadClassifier : public TranslatabilityClassifier {
 public:
  SpanHeadClassifier(std::shared_ptr<const Embedder> embedder, SpanHeadParams params);
  Classification classify(std::string_view question, const DatabaseSchema& schema) const override;

 private:
  std::shared_ptr<const Embedder> embedder_;
  SpanHeadParams params_;
};

inline constexpr std::size_t kDefaultMaxRounds = 3;

// Everything a session needs besides its own state. All members are shared
// read-only; only the execution counter changes.
struct Engine {
  std::shared_ptr<const TranslatabilityClassifier> classifier;
  std::shared_ptr<const Translator> translator;
  std::shared_ptr<const MaskFillScorer> mask_scorer;
  CheckOptions check;
  std::size_t max_rounds = kDefaultMaxRounds;
  mutable std::atomic<std::size_t> executions{0};

  ResultSet run(const SqlQuery& query, const Database& db) const;
};

// Advances the state machine by one user message and appends both turns to
// the history. Throws Error(kNoDatabaseSelected) when `db` is null.
Response handle_message(DialogueSession& session, std::string_view text, const Database* db,
                        const Engine& engine);

// Sessions keyed by id; each session is handled under its own lock.
class SessionStore {
 public:
  std::string create(const std::string& db_id);
  bool contains(const std::string& id) const;

  // Throws Error(kUnknownSession).
  template <typename Fn>
  auto with_session(const std::string& id, Fn&& fn) {
    std::shared_ptr<Slot> slot = find(id);
    std::lock_guard<std::mutex> lock(slot->mutex);
    return fn(slot->session);
  }

 private:
  struct Slot {
    std::mutex mutex;
    DialogueSession session;
  };
  std::shared_ptr<Slot> find(const std::string& id) const;

  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::uint64_t next_ = 1;
};

}  // namespace nlidb

#endif  // NLIDB_DIALOGUE_H_
