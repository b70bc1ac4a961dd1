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

#include "nlidb/text.h"

#include <cctype>

namespace nlidb {
namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)); }

// Non-ASCII bytes are treated as word characters so UTF-8 words stay whole.
bool is_word_char(char c) {
  return is_alnum(c) || static_cast<unsigned char>(c) >= 0x80;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::vector<QuestionToken> tokenize_question(std::string_view text) {
  std::vector<QuestionToken> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_char(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size()) {
      if (is_word_char(text[j])) {
        ++j;
        continue;
      }
      const bool inner = j + 1 < text.size();
      if (inner && text[j] == '.' && is_digit(text[j - 1]) &&
          is_digit(text[j + 1])) {
        ++j;
        continue;
      }
      if (inner && (text[j] == '\'' || text[j] == '-') && is_alpha(text[j - 1]) &&
          is_alpha(text[j + 1])) {
        ++j;
        continue;
      }
      break;
    }
    QuestionToken token;
    token.surface = std::string(text.substr(i, j - i));
    token.normalized = to_lower(token.surface);
    token.begin = i;
    token.end = j;
    tokens.push_back(std::move(token));
    i = j;
  }
  return tokens;
}

std::vector<std::string> question_words(std::string_view text) {
  std::vector<std::string> words;
  for (auto& token : tokenize_question(text)) {
    words.push_back(std::move(token.normalized));
  }
  return words;
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string to_upper(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> display_tokens_from_name(std::string_view name) {
  std::vector<std::string> out;
  std::string current;
  for (char c : name) {
    if (c == '_' || c == ' ' || c == '-') {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

std::string light_stem(std::string_view word) {
  std::string w = to_lower(word);
  if (w.size() > 4 && ends_with(w, "ies")) {
    return w.substr(0, w.size() - 3) + "y";
  }
  if (w.size() > 3 && (ends_with(w, "ses") || ends_with(w, "xes") ||
                       ends_with(w, "zes") || ends_with(w, "ches") ||
                       ends_with(w, "shes"))) {
    return w.substr(0, w.size() - 2);
  }
  if (w.size() > 3 && ends_with(w, "s") && !ends_with(w, "ss") &&
      !ends_with(w, "us") && !ends_with(w, "is")) {
    return w.substr(0, w.size() - 1);
  }
  return w;
}

}  // namespace nlidb
