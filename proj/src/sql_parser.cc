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

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <map>
#include <set>

#include "nlidb/error.h"
#include "nlidb/sql.h"
#include "nlidb/text.h"

namespace nlidb {
namespace {

struct Lexeme {
  enum class Kind { kIdent, kNumber, kString, kSymbol, kEnd };
  Kind kind = Kind::kEnd;
  std::string text;
  std::size_t offset = 0;  // 0-based
  bool quoted_ident = false;
};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

std::vector<Lexeme> lex(std::string_view text) {
  std::vector<Lexeme> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Lexeme lx;
    lx.offset = i;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      lx.kind = Lexeme::Kind::kIdent;
      lx.text = std::string(text.substr(i, j - i));
      i = j;
    } else if (c == '`') {
      std::size_t j = text.find('`', i + 1);
      if (j == std::string_view::npos) {
        throw SyntaxError(i + 1, "unterminated quoted identifier");
      }
      lx.kind = Lexeme::Kind::kIdent;
      lx.text = std::string(text.substr(i + 1, j - i - 1));
      lx.quoted_ident = true;
      if (lx.text.empty()) throw SyntaxError(i + 1, "empty quoted identifier");
      i = j + 1;
    } else if (digit(c)) {
      std::size_t j = i;
      while (j < text.size() && digit(text[j])) ++j;
      if (j + 1 < text.size() && text[j] == '.' && digit(text[j + 1])) {
        ++j;
        while (j < text.size() && digit(text[j])) ++j;
      }
      if (j < text.size() && ident_char(text[j])) {
        throw SyntaxError(j + 1, "malformed number");
      }
      lx.kind = Lexeme::Kind::kNumber;
      lx.text = std::string(text.substr(i, j - i));
      i = j;
    } else if (c == '\'' || c == '"') {
      std::string body;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < text.size()) {
        if (text[j] == c) {
          if (j + 1 < text.size() && text[j + 1] == c) {
            body.push_back(c);
            j += 2;
            continue;
          }
          closed = true;
          break;
        }
        body.push_back(text[j]);
        ++j;
      }
      if (!closed) throw SyntaxError(i + 1, "unterminated string literal");
      lx.kind = Lexeme::Kind::kString;
      lx.text = std::move(body);
      i = j + 1;
    } else {
      static const char* kTwo[] = {"<=", ">=", "!=", "<>"};
      bool matched = false;
      for (const char* sym : kTwo) {
        if (text.substr(i, 2) == sym) {
          lx.kind = Lexeme::Kind::kSymbol;
          lx.text = std::string(sym) == "<>" ? "!=" : sym;
          i += 2;
          matched = true;
          break;
        }
      }
      if (!matched) {
        if (std::string_view("=<>(),.*;-").find(c) == std::string_view::npos) {
          throw SyntaxError(i + 1, std::string("unexpected character '") + c + "'");
        }
        lx.kind = Lexeme::Kind::kSymbol;
        lx.text = std::string(1, c);
        ++i;
      }
    }
    out.push_back(std::move(lx));
  }
  Lexeme end;
  end.kind = Lexeme::Kind::kEnd;
  end.offset = text.size();
  out.push_back(end);
  return out;
}

const std::set<std::string, std::less<>>& reserved_words() {
  static const std::set<std::string, std::less<>> kWords = {
      "SELECT", "FROM",  "WHERE",   "GROUP",     "BY",     "HAVING",
      "ORDER",  "LIMIT", "UNION",   "INTERSECT", "EXCEPT", "JOIN",
      "ON",     "AS",    "AND",     "OR",        "NOT",    "IN",
      "LIKE",   "BETWEEN", "DISTINCT", "ASC",    "DESC"};
  return kWords;
}

std::optional<Aggregate> aggregate_from(std::string_view word) {
  const std::string w = to_upper(word);
  if (w == "COUNT") return Aggregate::kCount;
  if (w == "SUM") return Aggregate::kSum;
  if (w == "AVG") return Aggregate::kAvg;
  if (w == "MIN") return Aggregate::kMin;
  if (w == "MAX") return Aggregate::kMax;
  return std::nullopt;
}

constexpr int kMaxDepth = 48;

class Parser {
 public:
  explicit Parser(std::string_view text) : lexemes_(lex(text)) {}

  SqlQuery parse_statement() {
    SqlQuery q = parse_query();
    if (is_symbol(";")) advance();
    if (peek().kind != Lexeme::Kind::kEnd) fail("unexpected trailing input");
    return q;
  }

 private:
  const Lexeme& peek(std::size_t ahead = 0) const {
    const std::size_t i = std::min(pos_ + ahead, lexemes_.size() - 1);
    return lexemes_[i];
  }
  const Lexeme& advance() {
    const Lexeme& lx = lexemes_[pos_];
    if (pos_ + 1 < lexemes_.size()) ++pos_;
    return lx;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw SyntaxError(peek().offset + 1, message);
  }

  bool is_keyword(std::string_view kw, std::size_t ahead = 0) const {
    const Lexeme& lx = peek(ahead);
    return lx.kind == Lexeme::Kind::kIdent && !lx.quoted_ident &&
           to_upper(lx.text) == kw;
  }
  bool is_symbol(std::string_view sym, std::size_t ahead = 0) const {
    const Lexeme& lx = peek(ahead);
    return lx.kind == Lexeme::Kind::kSymbol && lx.text == sym;
  }
  void expect_keyword(std::string_view kw) {
    if (!is_keyword(kw)) fail("expected " + std::string(kw));
    advance();
  }
  void expect_symbol(std::string_view sym) {
    if (!is_symbol(sym)) fail("expected '" + std::string(sym) + "'");
    advance();
  }
  bool accept_keyword(std::string_view kw) {
    if (!is_keyword(kw)) return false;
    advance();
    return true;
  }

  std::string expect_identifier() {
    const Lexeme& lx = peek();
    if (lx.kind != Lexeme::Kind::kIdent) fail("expected identifier");
    if (!lx.quoted_ident && reserved_words().contains(to_upper(lx.text))) {
      fail("expected identifier, found keyword " + to_upper(lx.text));
    }
    return to_lower(advance().text);
  }

  bool at_aggregate_call() const {
    return peek().kind == Lexeme::Kind::kIdent && !peek().quoted_ident &&
           aggregate_from(peek().text).has_value() && is_symbol("(", 1);
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : parser(p) {
      if (++parser.depth_ > kMaxDepth) parser.fail("query nested too deeply");
    }
    ~DepthGuard() { --parser.depth_; }
    Parser& parser;
  };

  SqlQuery parse_query() {
    DepthGuard guard(*this);
    SqlQuery q = parse_core();
    std::optional<SetOpKind> kind;
    if (is_keyword("UNION")) kind = SetOpKind::kUnion;
    if (is_keyword("INTERSECT")) kind = SetOpKind::kIntersect;
    if (is_keyword("EXCEPT")) kind = SetOpKind::kExcept;
    if (kind) {
      advance();
      q.set_op = SetOp{*kind, Box<SqlQuery>(parse_query())};
    }
    return q;
  }

  ColumnRef parse_column_ref() {
    ColumnRef ref;
    std::string first = expect_identifier();
    if (is_symbol(".")) {
      advance();
      ref.table = std::move(first);
      if (is_symbol("*")) {
        advance();
        ref.column = std::string(kStar);
      } else {
        ref.column = expect_identifier();
      }
    } else {
      ref.column = std::move(first);
    }
    return ref;
  }

  // agg '(' [DISTINCT] (colref | '*') ')'
  void parse_aggregate_call(std::optional<Aggregate>& agg, bool& distinct,
                            ColumnRef& target) {
    agg = aggregate_from(advance().text);
    expect_symbol("(");
    distinct = accept_keyword("DISTINCT");
    if (is_symbol("*")) {
      if (*agg != Aggregate::kCount) fail("only COUNT accepts '*'");
      if (distinct) fail("COUNT(DISTINCT *) is not allowed");
      advance();
      target.column = std::string(kStar);
    } else {
      target = parse_column_ref();
      if (target.is_star() && *agg != Aggregate::kCount) {
        fail("only COUNT accepts '*'");
      }
    }
    expect_symbol(")");
  }

  SelectItem parse_select_item() {
    SelectItem item;
    if (at_aggregate_call()) {
      parse_aggregate_call(item.aggregate, item.distinct, item.target);
    } else if (is_symbol("*")) {
      advance();
      item.target.column = std::string(kStar);
    } else {
      item.target = parse_column_ref();
    }
    return item;
  }

  Literal parse_literal() {
    bool negative = false;
    if (is_symbol("-")) {
      advance();
      negative = true;
      if (peek().kind != Lexeme::Kind::kNumber) fail("expected number after '-'");
    }
    const Lexeme& lx = peek();
    if (lx.kind == Lexeme::Kind::kNumber) {
      double v = 0;
      const char* first = lx.text.data();
      const char* last = first + lx.text.size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) fail("malformed number");
      advance();
      return Literal::Number(negative ? -v : v);
    }
    if (lx.kind == Lexeme::Kind::kString) {
      return Literal::String(advance().text);
    }
    fail("expected literal");
  }

  Operand parse_operand() {
    if (is_symbol("(") && is_keyword("SELECT", 1)) {
      advance();
      SqlQuery sub = parse_query();
      expect_symbol(")");
      return Box<SqlQuery>(std::move(sub));
    }
    return parse_literal();
  }

  Predicate parse_predicate() {
    Predicate p;
    if (at_aggregate_call()) {
      bool distinct = false;
      parse_aggregate_call(p.aggregate, distinct, p.column);
      if (distinct) fail("DISTINCT aggregates are not supported in conditions");
    } else {
      p.column = parse_column_ref();
      if (p.column.is_star()) fail("'*' is only allowed in select lists and COUNT");
    }
    const Lexeme& lx = peek();
    if (lx.kind == Lexeme::Kind::kSymbol) {
      static const std::map<std::string, CompareOp, std::less<>> kOps = {
          {"=", CompareOp::kEq}, {"!=", CompareOp::kNe}, {"<", CompareOp::kLt},
          {"<=", CompareOp::kLe}, {">", CompareOp::kGt}, {">=", CompareOp::kGe}};
      auto it = kOps.find(lx.text);
      if (it == kOps.end()) fail("expected comparison operator");
      advance();
      p.op = it->second;
      p.value = parse_operand();
      return p;
    }
    if (accept_keyword("NOT")) {
      expect_keyword("IN");
      p.op = CompareOp::kNotIn;
    } else if (accept_keyword("IN")) {
      p.op = CompareOp::kIn;
    } else if (accept_keyword("LIKE")) {
      p.op = CompareOp::kLike;
      if (peek().kind != Lexeme::Kind::kString) fail("LIKE expects a string pattern");
      p.value = Literal::String(advance().text);
      return p;
    } else if (accept_keyword("BETWEEN")) {
      p.op = CompareOp::kBetween;
      p.value = parse_literal();
      expect_keyword("AND");
      p.upper = parse_literal();
      return p;
    } else {
      fail("expected comparison operator");
    }
    // IN / NOT IN
    if (!(is_symbol("(") && is_keyword("SELECT", 1))) fail("IN expects a subquery");
    p.value = parse_operand();
    return p;
  }

  static void splice(Condition::Kind kind, std::vector<Condition>& into,
                     Condition c) {
    if (c.kind == kind) {
      for (auto& child : c.children) into.push_back(std::move(child));
    } else {
      into.push_back(std::move(c));
    }
  }

  Condition parse_or() {
    DepthGuard guard(*this);
    Condition first = parse_and();
    if (!is_keyword("OR")) return first;
    std::vector<Condition> children;
    splice(Condition::Kind::kOr, children, std::move(first));
    while (accept_keyword("OR")) {
      splice(Condition::Kind::kOr, children, parse_and());
    }
    return Condition::Node(Condition::Kind::kOr, std::move(children));
  }

  Condition parse_and() {
    Condition first = parse_atom();
    if (!is_keyword("AND")) return first;
    std::vector<Condition> children;
    splice(Condition::Kind::kAnd, children, std::move(first));
    while (accept_keyword("AND")) {
      splice(Condition::Kind::kAnd, children, parse_atom());
    }
    return Condition::Node(Condition::Kind::kAnd, std::move(children));
  }

  Condition parse_atom() {
    if (is_symbol("(") && !is_keyword("SELECT", 1)) {
      advance();
      Condition c = parse_or();
      expect_symbol(")");
      return c;
    }
    return Condition::Leaf(parse_predicate());
  }

  OrderKey parse_order_key() {
    OrderKey key;
    if (at_aggregate_call()) {
      bool distinct = false;
      parse_aggregate_call(key.aggregate, distinct, key.column);
      if (distinct) fail("DISTINCT aggregates are not supported in ORDER BY");
    } else {
      key.column = parse_column_ref();
      if (key.column.is_star()) fail("cannot order by '*'");
    }
    if (accept_keyword("DESC")) {
      key.descending = true;
    } else {
      accept_keyword("ASC");
    }
    return key;
  }

  std::int64_t parse_limit() {
    const Lexeme& lx = peek();
    if (lx.kind != Lexeme::Kind::kNumber || lx.text.find('.') != std::string::npos) {
      fail("LIMIT expects a non-negative integer");
    }
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(lx.text.data(), lx.text.data() + lx.text.size(), v);
    if (ec != std::errc()) fail("LIMIT out of range");
    advance();
    return v;
  }

  void parse_table_ref(FromClause& from, std::map<std::string, std::string>& aliases) {
    const std::size_t at = peek().offset;
    std::string name = expect_identifier();
    for (const auto& t : from.tables) {
      if (t == name) {
        throw SyntaxError(at + 1, "table '" + name + "' listed twice in FROM");
      }
    }
    if (accept_keyword("AS") ||
        (peek().kind == Lexeme::Kind::kIdent &&
         !reserved_words().contains(to_upper(peek().text)))) {
      aliases[expect_identifier()] = name;
    }
    from.tables.push_back(std::move(name));
  }

  SqlQuery parse_core() {
    SqlQuery q;
    expect_keyword("SELECT");
    q.select.distinct = accept_keyword("DISTINCT");
    q.select.items.push_back(parse_select_item());
    while (is_symbol(",")) {
      advance();
      q.select.items.push_back(parse_select_item());
    }
    expect_keyword("FROM");
    std::map<std::string, std::string> aliases;
    parse_table_ref(q.from, aliases);
    while (accept_keyword("JOIN")) {
      parse_table_ref(q.from, aliases);
      if (accept_keyword("ON")) {
        do {
          JoinCondition jc;
          jc.left = parse_column_ref();
          expect_symbol("=");
          jc.right = parse_column_ref();
          if (jc.left.is_star() || jc.right.is_star()) fail("cannot join on '*'");
          jc.position = q.from.tables.size() - 1;
          q.from.joins.push_back(std::move(jc));
        } while (accept_keyword("AND"));
      }
    }
    if (accept_keyword("WHERE")) q.where = parse_or();
    if (accept_keyword("GROUP")) {
      expect_keyword("BY");
      do {
        ColumnRef ref = parse_column_ref();
        if (ref.is_star()) fail("cannot group by '*'");
        q.group_by.push_back(std::move(ref));
      } while (is_symbol(",") && (advance(), true));
    }
    if (accept_keyword("HAVING")) q.having = parse_or();
    if (accept_keyword("ORDER")) {
      expect_keyword("BY");
      q.order_by.keys.push_back(parse_order_key());
      while (is_symbol(",")) {
        advance();
        q.order_by.keys.push_back(parse_order_key());
      }
    }
    if (accept_keyword("LIMIT")) q.order_by.limit = parse_limit();
    resolve_aliases(q, aliases);
    return q;
  }

  static void resolve(ColumnRef& ref, const std::map<std::string, std::string>& aliases) {
    if (!ref.table) return;
    auto it = aliases.find(*ref.table);
    if (it != aliases.end()) ref.table = it->second;
  }

  static void resolve(Condition& c, const std::map<std::string, std::string>& aliases) {
    if (c.kind == Condition::Kind::kPredicate) {
      resolve(c.predicate.column, aliases);
      return;
    }
    for (auto& child : c.children) resolve(child, aliases);
  }

  static void resolve_aliases(SqlQuery& q,
                              const std::map<std::string, std::string>& aliases) {
    if (aliases.empty()) return;
    for (auto& item : q.select.items) resolve(item.target, aliases);
    for (auto& jc : q.from.joins) {
      resolve(jc.left, aliases);
      resolve(jc.right, aliases);
    }
    if (q.where) resolve(*q.where, aliases);
    for (auto& g : q.group_by) resolve(g, aliases);
    if (q.having) resolve(*q.having, aliases);
    for (auto& k : q.order_by.keys) resolve(k.column, aliases);
  }

  std::vector<Lexeme> lexemes_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace

SqlQuery parse_sql(std::string_view text) {
  Parser parser(text);
  return parser.parse_statement();
}

std::string_view aggregate_keyword(Aggregate agg) {
  switch (agg) {
    case Aggregate::kCount: return "COUNT";
    case Aggregate::kSum: return "SUM";
    case Aggregate::kAvg: return "AVG";
    case Aggregate::kMin: return "MIN";
    case Aggregate::kMax: return "MAX";
  }
  return "COUNT";
}

std::string_view compare_op_text(CompareOp op) {
  switch (op) {
    case CompareOp::kEq: return "=";
    case CompareOp::kNe: return "!=";
    case CompareOp::kLt: return "<";
    case CompareOp::kLe: return "<=";
    case CompareOp::kGt: return ">";
    case CompareOp::kGe: return ">=";
    case CompareOp::kLike: return "LIKE";
    case CompareOp::kIn: return "IN";
    case CompareOp::kNotIn: return "NOT IN";
    case CompareOp::kBetween: return "BETWEEN";
  }
  return "=";
}

std::string_view set_op_keyword(SetOpKind kind) {
  switch (kind) {
    case SetOpKind::kUnion: return "UNION";
    case SetOpKind::kIntersect: return "INTERSECT";
    case SetOpKind::kExcept: return "EXCEPT";
  }
  return "UNION";
}

bool has_aggregate(const SqlQuery& query) {
  for (const auto& item : query.select.items) {
    if (item.aggregate) return true;
  }
  return false;
}

}  // namespace nlidb
