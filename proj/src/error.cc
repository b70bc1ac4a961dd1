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

#include "nlidb/error.h"

namespace nlidb {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDuplicateName: return "DuplicateName";
    case ErrorCode::kUnresolvedForeignKey: return "UnresolvedForeignKey";
    case ErrorCode::kEmptySchema: return "EmptySchema";
    case ErrorCode::kColumnMismatch: return "ColumnMismatch";
    case ErrorCode::kInvalidDocument: return "InvalidDocument";
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kTypeCoercionError: return "TypeCoercionError";
    case ErrorCode::kArityError: return "ArityError";
    case ErrorCode::kExecutionError: return "ExecutionError";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kMalformedActionSequence: return "MalformedActionSequence";
    case ErrorCode::kUncopyableLiteral: return "UncopyableLiteral";
    case ErrorCode::kOutOfBounds: return "OutOfBounds";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kInvalidForTranslatable: return "InvalidForTranslatable";
    case ErrorCode::kNoLinkedSpan: return "NoLinkedSpan";
    case ErrorCode::kNoDistractorAvailable: return "NoDistractorAvailable";
    case ErrorCode::kNotDroppable: return "NotDroppable";
    case ErrorCode::kGeneratorExhausted: return "GeneratorExhausted";
    case ErrorCode::kIOFailure: return "IOFailure";
    case ErrorCode::kInvalidSpan: return "InvalidSpan";
    case ErrorCode::kNoMask: return "NoMask";
    case ErrorCode::kEmptyCandidates: return "EmptyCandidates";
    case ErrorCode::kUnknownSession: return "UnknownSession";
    case ErrorCode::kUnknownDatabase: return "UnknownDatabase";
    case ErrorCode::kNoDatabaseSelected: return "NoDatabaseSelected";
    case ErrorCode::kMissingSlot: return "MissingSlot";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace nlidb
