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

#ifndef COATSEG_ERROR_H_
#define COATSEG_ERROR_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace coatseg {

enum class ErrorCode {
  kInvalidArgument,
  kShape,
  kRange,
  kZeroNorm,
  kEmptyMask,
  kDegenerate,
  kBadMagic,
  kBadVersion,
  kBadRank,
  kUnknownDtype,
  kTruncated,
  kTrailingBytes,
  kOrphanIds,
  kDuplicateId,
  kInvalidPanoptic,
  kVocabularyMismatch,
  kPacking,
  kNotFound,
  kIo,
  kParse,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library. `offset()` is only meaningful for
// tensor container errors; `ids()` carries the offending indices or segment
// ids for errors that name them (zero-norm rows, orphan/duplicate ids).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  Error(ErrorCode code, const std::string& message, std::uint64_t offset);
  Error(ErrorCode code, const std::string& message,
        std::vector<std::uint64_t> ids);

  ErrorCode code() const { return code_; }
  bool has_offset() const { return has_offset_; }
  std::uint64_t offset() const { return offset_; }
  const std::vector<std::uint64_t>& ids() const { return ids_; }

 private:
  ErrorCode code_;
  bool has_offset_ = false;
  std::uint64_t offset_ = 0;
  std::vector<std::uint64_t> ids_;
};

}  // namespace coatseg

#endif  // COATSEG_ERROR_H_
