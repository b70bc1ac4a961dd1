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

#ifndef NLIDB_ERROR_H_
#define NLIDB_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nlidb {

enum class ErrorCode {
  kDuplicateName,
  kUnresolvedForeignKey,
  kEmptySchema,
  kColumnMismatch,
  kInvalidDocument,
  kSyntaxError,
  kTypeCoercionError,
  kArityError,
  kExecutionError,
  kShapeMismatch,
  kMalformedActionSequence,
  kUncopyableLiteral,
  kOutOfBounds,
  kNonFiniteLoss,
  kInvalidForTranslatable,
  kNoLinkedSpan,
  kNoDistractorAvailable,
  kNotDroppable,
  kGeneratorExhausted,
  kIOFailure,
  kInvalidSpan,
  kNoMask,
  kEmptyCandidates,
  kUnknownSession,
  kUnknownDatabase,
  kNoDatabaseSelected,
  kMissingSlot,
  kLengthMismatch,
  kInvalidArgument,
};

// Stable name used in CLI output and HTTP error bodies, e.g. "DuplicateName".
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Parse failure; offset is 1-based into the input text.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& message)
      : Error(ErrorCode::kSyntaxError,
              "syntax error at offset " + std::to_string(offset) + ": " +
                  message),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace nlidb

#endif  // NLIDB_ERROR_H_
