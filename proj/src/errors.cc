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

#include "pyreval/errors.h"

#include <utility>

namespace pyreval {
namespace {

std::string Decorate(ErrorCode code, const std::string& message,
                     std::size_t line, const std::string& example_id,
                     const std::string& field) {
  std::string out(ErrorCodeName(code));
  if (line > 0) out += " at line " + std::to_string(line);
  if (!example_id.empty()) out += " (example " + example_id + ")";
  if (!field.empty()) out += " [" + field + "]";
  out += ": " + message;
  return out;
}

}  // namespace

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedJson: return "malformed_json";
    case ErrorCode::kMissingField: return "missing_field";
    case ErrorCode::kWrongType: return "wrong_type";
    case ErrorCode::kUnsupportedSchemaVersion: return "unsupported_schema_version";
    case ErrorCode::kDuplicateExampleId: return "duplicate_example_id";
    case ErrorCode::kDuplicateUnitId: return "duplicate_unit_id";
    case ErrorCode::kDuplicateSentenceId: return "duplicate_sentence_id";
    case ErrorCode::kDuplicateKey: return "duplicate_key";
    case ErrorCode::kNoReferences: return "no_references";
    case ErrorCode::kEmptyText: return "empty_text";
    case ErrorCode::kNonPositiveWeight: return "non_positive_weight";
    case ErrorCode::kWeightExceedsReferences: return "weight_exceeds_references";
    case ErrorCode::kUnknownSourceSentence: return "unknown_source_sentence";
    case ErrorCode::kUnknownPresenceUnit: return "unknown_presence_unit";
    case ErrorCode::kBadReferenceIndex: return "bad_reference_index";
    case ErrorCode::kSpanOutOfRange: return "span_out_of_range";
    case ErrorCode::kBadSpanOrder: return "bad_span_order";
    case ErrorCode::kMalformedParseTree: return "malformed_parse_tree";
    case ErrorCode::kParseTreeMismatch: return "parse_tree_mismatch";
    case ErrorCode::kEmptyVotes: return "empty_votes";
    case ErrorCode::kInvalidValue: return "invalid_value";
    case ErrorCode::kIo: return "io_error";
  }
  return "unknown";
}

ValidationError::ValidationError(ErrorCode code, std::string message,
                                 std::size_t line, std::string example_id,
                                 std::string field)
    : std::runtime_error(Decorate(code, message, line, example_id, field)),
      code_(code),
      line_(line),
      example_id_(std::move(example_id)),
      field_(std::move(field)) {}

}  // namespace pyreval
