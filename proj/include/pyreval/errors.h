// Copyright 2026 The pyreval Authors.
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

#ifndef PYREVAL_ERRORS_H_
#define PYREVAL_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pyreval {

// Documented validation failure codes. The names returned by ErrorCodeName()
// appear verbatim in error messages and are part of the CLI contract.
enum class ErrorCode {
  kMalformedJson,
  kMissingField,
  kWrongType,
  kUnsupportedSchemaVersion,
  kDuplicateExampleId,
  kDuplicateUnitId,
  kDuplicateSentenceId,
  kDuplicateKey,
  kNoReferences,
  kEmptyText,
  kNonPositiveWeight,
  kWeightExceedsReferences,
  kUnknownSourceSentence,
  kUnknownPresenceUnit,
  kBadReferenceIndex,
  kSpanOutOfRange,
  kBadSpanOrder,
  kMalformedParseTree,
  kParseTreeMismatch,
  kEmptyVotes,
  kInvalidValue,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// Raised when input data breaks a documented invariant. Maps to CLI exit
// code 1.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(ErrorCode code, std::string message, std::size_t line = 0,
                  std::string example_id = {}, std::string field = {});

  ErrorCode code() const { return code_; }
  // 1-based line of the offending record, 0 when not tied to a file line.
  std::size_t line() const { return line_; }
  const std::string& example_id() const { return example_id_; }
  const std::string& field() const { return field_; }

 private:
  ErrorCode code_;
  std::size_t line_;
  std::string example_id_;
  std::string field_;
};

// An entailment backend failed or answered out of contract.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A correlation is undefined for the given inputs (e.g. a constant vector).
class UndefinedCorrelation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pyreval

#endif  // PYREVAL_ERRORS_H_
