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


// OVRT tensor container. Layout (all integers little-endian):
//
//   offset  size       field
//   0       4          magic "OVRT"
//   4       2          version (u16, currently 1)
//   6       1          rank (u8, 1..4)
//   7       4 * rank   dims (u32 each)
//   7+4r    1          dtype tag (0 = float32, 1 = float64, 2 = uint32)
//   8+4r    n * size   payload, row-major
//
// Values are held as double in memory. float32 payloads are widened on read
// and narrowed on write; uint32 values must be integral and in range.

#ifndef COATSEG_TENSOR_IO_H_
#define COATSEG_TENSOR_IO_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "coatseg/types.h"

namespace coatseg {

enum class DType : std::uint8_t { kFloat32 = 0, kFloat64 = 1, kUint32 = 2 };

std::size_t DTypeSize(DType dtype);

struct Tensor {
  std::vector<std::uint32_t> dims;
  DType dtype = DType::kFloat32;
  std::vector<double> values;

  std::size_t numel() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

inline constexpr std::uint16_t kTensorVersion = 1;

std::vector<std::uint8_t> EncodeTensor(const Tensor& t);
Tensor DecodeTensor(std::span<const std::uint8_t> bytes);

void WriteTensor(const Tensor& t, const std::filesystem::path& path);
Tensor ReadTensor(const std::filesystem::path& path);

// Conversions between containers and domain types. Shapes:
//   FeatureMap   H x W x E
//   MaskLogits   N x H x W   (N may be 0)
//   Matrix       rows x cols (rows may be 0)
Tensor ToTensor(const FeatureMap& f, DType dtype = DType::kFloat32);
Tensor ToTensor(const MaskLogits& m, DType dtype = DType::kFloat32);
Tensor ToTensor(const Matrix& m, DType dtype = DType::kFloat32);
FeatureMap FeatureMapFromTensor(const Tensor& t);
MaskLogits MaskLogitsFromTensor(const Tensor& t);
Matrix MatrixFromTensor(const Tensor& t);

}  // namespace coatseg

#endif  // COATSEG_TENSOR_IO_H_
