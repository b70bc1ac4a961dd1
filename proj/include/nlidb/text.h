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

#ifndef NLIDB_TEXT_H_
#define NLIDB_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace nlidb {

// A word of a natural-language question. `surface` is the verbatim text,
// `normalized` its lowercase form; [begin, end) are byte offsets into the
// source string.
struct QuestionToken {
  std::string surface;
  std::string normalized;
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Splits on whitespace and punctuation. Digits keep an inner '.', letters
// keep an inner apostrophe or hyphen. Punctuation-only runs are dropped.
std::vector<QuestionToken> tokenize_question(std::string_view text);

// Normalized forms only.
std::vector<std::string> question_words(std::string_view text);

std::string to_lower(std::string_view text);
std::string to_upper(std::string_view text);

// "singer_name" -> {"singer", "name"}; also splits on spaces.
std::vector<std::string> display_tokens_from_name(std::string_view name);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Crude plural stripping: "countries" -> "country", "regions" -> "region".
std::string light_stem(std::string_view word);

}  // namespace nlidb

#endif  // NLIDB_TEXT_H_
