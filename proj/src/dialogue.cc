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

#include "nlidb/dialogue.h"

#include <algorithm>
#include <chrono>

#include "nlidb/error.h"
#include "nlidb/sql.h"
#include "nlidb/text.h"

namespace nlidb {
namespace {

constexpr std::size_t kSuggestionCount = 5;

const std::vector<std::string_view> kAffirmative = {"yes", "y", "yeah", "correct", "ok"};
const std::vector<std::string_view> kNegative = {"no", "n", "nope"};

bool is_reply(std::string_view text, const std::vector<std::string_view>& set) {
  auto words = question_words(text);
  if (words.size() != 1) return false;
  return std::find(set.begin(), set.end(), words.front()) != set.end();
}

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

class Turnkeeper {
 public:
  Turnkeeper(DialogueSession& session, const Database& db, const Engine& engine)
      : session_(session), db_(db), engine_(engine), schema_(*db.schema) {}

  Response fresh(std::string_view text) {
    session_.pending.reset();
    session_.correction_rounds = 0;
    if (detect_sql_input(text)) return run_sql(parse_sql(text));
    return question(text);
  }

  Response question(std::string_view text) {
    const Classification c = engine_.classifier->classify(text, schema_);
    if (c.translatable) {
      std::optional<SqlQuery> q = engine_.translator->translate(text, schema_);
      if (!q) return invalid(std::nullopt);
      return run_sql(std::move(*q));
    }
    const auto tokens = tokenize_question(text);
    if (response_strategy(c.label, tokens.size()) == ResponseStrategy::kNeedRephrase ||
        session_.correction_rounds >= engine_.max_rounds) {
      return rephrase();
    }
    PendingCorrection p;
    p.question = std::string(text);
    p.span = c.label;
    p.candidates = score_candidates(mask_span(tokens, c.label), candidate_list(schema_),
                                    *engine_.mask_scorer);
    return offer(std::move(p), 0);
  }

  Response reply_no() {
    PendingCorrection p = std::move(*session_.pending);
    session_.pending.reset();
    const std::size_t next = p.chosen + 1;
    if (session_.correction_rounds < engine_.max_rounds && next < p.candidates.size()) {
      return offer(std::move(p), next);
    }
    return rephrase();
  }

  Response reply_yes() {
    const std::string corrected = session_.pending->corrected;
    session_.pending.reset();
    return question(corrected);
  }

 private:
  Response offer(PendingCorrection p, std::size_t chosen) {
    p.chosen = chosen;
    p.corrected = apply_correction(p.question, p.span, p.candidates[chosen]);
    ++session_.correction_rounds;
    Response r;
    r.state = SessionState::kConfirmCorrection;
    r.text = render_template(r.state, {{"corrected", p.corrected}});
    r.span = p.span;
    const std::size_t end = std::min(p.candidates.size(), chosen + kSuggestionCount);
    r.suggestions.assign(p.candidates.begin() + static_cast<std::ptrdiff_t>(chosen),
                         p.candidates.begin() + static_cast<std::ptrdiff_t>(end));
    session_.pending = std::move(p);
    return r;
  }

  Response rephrase() {
    session_.correction_rounds = 0;
    Response r;
    r.state = SessionState::kNeedRephrase;
    r.text = render_template(r.state, {});
    return r;
  }

  Response invalid(std::optional<std::string> sql) {
    Response r;
    r.state = SessionState::kInvalidQuery;
    r.text = render_template(r.state, {});
    r.sql = std::move(sql);
    return r;
  }

  Response run_sql(SqlQuery q) {
    const std::string sql = format_sql(q);
    if (!check(q, schema_, engine_.check).empty()) return invalid(sql);
    try {
      ResultSet rs = engine_.run(q, db_);
      Response r;
      r.state = SessionState::kConfirmResult;
      r.text = render_template(r.state, {{"sql", rs.sql_text}});
      r.sql = rs.sql_text;
      r.result = std::move(rs);
      return r;
    } catch (const Error&) {
      return invalid(sql);
    }
  }

  DialogueSession& session_;
  const Database& db_;
  const Engine& engine_;
  const DatabaseSchema& schema_;
};

}  // namespace

std::string_view state_name(SessionState state) {
  switch (state) {
    case SessionState::kInit: return "INIT";
    case SessionState::kConfirmResult: return "CONFIRM_RESULT";
    case SessionState::kConfirmCorrection: return "CONFIRM_CORRECTION";
    case SessionState::kNeedRephrase: return "NEED_REPHRASE";
    case SessionState::kInvalidQuery: return "INVALID_QUERY";
  }
  return "INIT";
}

nlohmann::json response_json(const Response& r) {
  nlohmann::json j = {{"state", state_name(r.state)}, {"text", r.text}};
  if (r.result) j["result"] = result_json(*r.result);
  if (r.sql) j["sql"] = *r.sql;
  if (r.span) j["span"] = {{"start", r.span->start}, {"end", r.span->end}};
  if (!r.suggestions.empty()) {
    nlohmann::json s = nlohmann::json::array();
    for (const auto& c : r.suggestions) {
      s.push_back({{"surface", c.surface},
                   {"score", c.score},
                   {"source", c.source == CorrectionCandidate::Source::kTable ? "table" : "column"}});
    }
    j["suggestions"] = std::move(s);
  }
  return j;
}

nlohmann::json turn_json(const Turn& t) {
  return {{"speaker", t.speaker},
          {"text", t.text},
          {"state", state_name(t.state)},
          {"timestamp", t.timestamp_ms}};
}

bool detect_sql_input(std::string_view text) {
  try {
    parse_sql(text);
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::string render_template(SessionState state, const std::map<std::string, std::string>& slots) {
  auto slot = [&](const std::string& name) -> const std::string& {
    auto it = slots.find(name);
    if (it == slots.end()) {
      throw Error(ErrorCode::kMissingSlot, std::string(state_name(state)) + " needs slot '" + name + "'");
    }
    return it->second;
  };
  switch (state) {
    case SessionState::kConfirmResult: return "Here is the result of: " + slot("sql");
    case SessionState::kConfirmCorrection: return "Did you mean: " + slot("corrected") + "? (yes/no)";
    case SessionState::kNeedRephrase:
      return "I could not map that to a database query. Could you rephrase?";
    case SessionState::kInvalidQuery:
      return "The generated query could not be executed on this database.";
    case SessionState::kInit: break;
  }
  throw Error(ErrorCode::kInvalidArgument, "INIT has no response template");
}

SpanHeadClassifier::SpanHeadClassifier(std::shared_ptr<const Embedder> embedder,
                                       SpanHeadParams params)
    : embedder_(std::move(embedder)), params_(std::move(params)) {
  if (!embedder_) throw Error(ErrorCode::kInvalidArgument, "classifier needs an embedder");
}

Classification SpanHeadClassifier::classify(std::string_view question,
                                            const DatabaseSchema& schema) const {
  return nlidb::classify(question, schema, *embedder_, params_);
}

ResultSet Engine::run(const SqlQuery& query, const Database& db) const {
  ++executions;
  return execute(query, db);
}

Response handle_message(DialogueSession& session, std::string_view text, const Database* db,
                        const Engine& engine) {
  if (db == nullptr || session.db_id.empty()) {
    throw Error(ErrorCode::kNoDatabaseSelected, "session has no database");
  }
  if (!engine.classifier || !engine.translator || !engine.mask_scorer) {
    throw Error(ErrorCode::kInvalidArgument, "engine is incomplete");
  }
  session.history.push_back({"user", std::string(text), session.state, now_ms()});
  Turnkeeper keeper(session, *db, engine);
  Response r;
  if (session.state == SessionState::kConfirmCorrection && session.pending &&
      is_reply(text, kAffirmative)) {
    r = keeper.reply_yes();
  } else if (session.state == SessionState::kConfirmCorrection && session.pending &&
             is_reply(text, kNegative)) {
    r = keeper.reply_no();
  } else {
    r = keeper.fresh(text);
  }
  session.state = r.state;
  if (r.state != SessionState::kConfirmCorrection) {
    session.pending.reset();
    session.correction_rounds = 0;
  }
  session.history.push_back({"system", r.text, r.state, now_ms()});
  return r;
}

std::string SessionStore::create(const std::string& db_id) {
  std::lock_guard<std::mutex> lock(mutex_);
  const std::string id = "s" + std::to_string(next_++);
  auto slot = std::make_shared<Slot>();
  slot->session.session_id = id;
  slot->session.db_id = db_id;
  sessions_[id] = std::move(slot);
  return id;
}

bool SessionStore::contains(const std::string& id) const {
  std::lock_guard<std::mutex> lock(mutex_);
  return sessions_.contains(id);
}

std::shared_ptr<SessionStore::Slot> SessionStore::find(const std::string& id) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::kUnknownSession, "no session '" + id + "'");
  return it->second;
}

}  // namespace nlidb
