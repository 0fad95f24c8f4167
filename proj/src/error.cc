// Copyright 2026 The coatseg Authors.
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

#include "coatseg/error.h"

#include <utility>

namespace coatseg {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kRange: return "range";
    case ErrorCode::kZeroNorm: return "zero-norm";
    case ErrorCode::kEmptyMask: return "empty-mask";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kBadMagic: return "bad-magic";
    case ErrorCode::kBadVersion: return "bad-version";
    case ErrorCode::kBadRank: return "bad-rank";
    case ErrorCode::kUnknownDtype: return "unknown-dtype";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kTrailingBytes: return "trailing-bytes";
    case ErrorCode::kOrphanIds: return "orphan-ids";
    case ErrorCode::kDuplicateId: return "duplicate-id";
    case ErrorCode::kInvalidPanoptic: return "invalid-panoptic";
    case ErrorCode::kVocabularyMismatch: return "vocabulary-mismatch";
    case ErrorCode::kPacking: return "packing";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kParse: return "parse";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

Error::Error(ErrorCode code, const std::string& message, std::uint64_t offset)
    : std::runtime_error(message + " (at byte offset " +
                         std::to_string(offset) + ")"),
      code_(code),
      has_offset_(true),
      offset_(offset) {}

Error::Error(ErrorCode code, const std::string& message,
             std::vector<std::uint64_t> ids)
    : std::runtime_error(message), code_(code), ids_(std::move(ids)) {}

}  // namespace coatseg
