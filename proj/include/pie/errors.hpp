// Copyright 2026 The PIE Authors
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

#ifndef PIE_ERRORS_HPP
#define PIE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pie {

enum class ErrorKind {
  // Schema validation.
  CycleError,
  UnknownTargetError,
  KindTargetMismatchError,
  DuplicateLayerError,
  InvalidLayerName,
  // Document construction.
  OffsetOutOfBounds,
  DanglingReference,
  SelfReference,
  KindMismatch,
  DuplicateAnnotation,
  UnknownLayer,
  InvalidState,
  // Parsing and corpus IO.
  ParseError,
  SchemaMismatch,
  ForwardReference,
  VersionMismatch,
  FormatError,
  OffsetMismatch,
  MalformedLine,
  // Alignment and task modules.
  AlignmentError,
  IndexOutOfRange,
  OverlapError,
  MultiLabelError,
  UnknownLabel,
  TagVocabularyError,
  // Models and configuration.
  EmptyTrainingSet,
  InvalidConfig,
};

inline const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::CycleError: return "CycleError";
    case ErrorKind::UnknownTargetError: return "UnknownTargetError";
    case ErrorKind::KindTargetMismatchError: return "KindTargetMismatchError";
    case ErrorKind::DuplicateLayerError: return "DuplicateLayerError";
    case ErrorKind::InvalidLayerName: return "InvalidLayerName";
    case ErrorKind::OffsetOutOfBounds: return "OffsetOutOfBounds";
    case ErrorKind::DanglingReference: return "DanglingReference";
    case ErrorKind::SelfReference: return "SelfReference";
    case ErrorKind::KindMismatch: return "KindMismatch";
    case ErrorKind::DuplicateAnnotation: return "DuplicateAnnotation";
    case ErrorKind::UnknownLayer: return "UnknownLayer";
    case ErrorKind::InvalidState: return "InvalidState";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::ForwardReference: return "ForwardReference";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::OffsetMismatch: return "OffsetMismatch";
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::AlignmentError: return "AlignmentError";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::OverlapError: return "OverlapError";
    case ErrorKind::MultiLabelError: return "MultiLabelError";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::TagVocabularyError: return "TagVocabularyError";
    case ErrorKind::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "UnknownError";
}

/// All library failures are reported as Error; kind() identifies the rule
/// that was violated and what() carries the offending names and offsets.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace pie

#endif  // PIE_ERRORS_HPP
