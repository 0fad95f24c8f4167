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


#include "coatseg/tensor_io.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "coatseg/error.h"

namespace coatseg {
namespace {

constexpr char kMagic[4] = {'O', 'V', 'R', 'T'};

template <typename U>
void PutLe(std::vector<std::uint8_t>& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

template <typename U>
U GetLe(std::span<const std::uint8_t> bytes, std::size_t offset) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    v |= static_cast<U>(bytes[offset + i]) << (8 * i);
  }
  return v;
}

std::string DimsString(const std::vector<std::uint32_t>& dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    s += (i ? "x" : "") + std::to_string(dims[i]);
  }
  return s;
}

void RequireRank(const Tensor& t, std::size_t rank, const char* what) {
  if (t.dims.size() != rank) {
    throw Error(ErrorCode::kShape, std::string(what) + " expects a rank-" +
                                       std::to_string(rank) +
                                       " tensor, got dims " +
                                       DimsString(t.dims));
  }
}

}  // namespace

std::size_t DTypeSize(DType dtype) {
  switch (dtype) {
    case DType::kFloat32: return 4;
    case DType::kFloat64: return 8;
    case DType::kUint32: return 4;
  }
  return 0;
}

std::size_t Tensor::numel() const {
  std::size_t n = 1;
  for (std::uint32_t d : dims) n *= d;
  return n;
}

std::vector<std::uint8_t> EncodeTensor(const Tensor& t) {
  if (t.dims.empty() || t.dims.size() > 4) {
    throw Error(ErrorCode::kBadRank,
                "rank must lie in [1, 4], got " + std::to_string(t.dims.size()));
  }
  if (t.values.size() != t.numel()) {
    throw Error(ErrorCode::kShape, "tensor holds " +
                                       std::to_string(t.values.size()) +
                                       " values for dims " + DimsString(t.dims));
  }
  std::vector<std::uint8_t> out;
  out.reserve(8 + 4 * t.dims.size() + t.values.size() * DTypeSize(t.dtype));
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  PutLe<std::uint16_t>(out, kTensorVersion);
  out.push_back(static_cast<std::uint8_t>(t.dims.size()));
  for (std::uint32_t d : t.dims) PutLe<std::uint32_t>(out, d);
  out.push_back(static_cast<std::uint8_t>(t.dtype));
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    const double v = t.values[i];
    switch (t.dtype) {
      case DType::kFloat32:
        if (!std::isfinite(v)) {
          throw Error(ErrorCode::kRange,
                      "non-finite value at element " + std::to_string(i));
        }
        PutLe<std::uint32_t>(out,
                             std::bit_cast<std::uint32_t>(static_cast<float>(v)));
        break;
      case DType::kFloat64:
        if (!std::isfinite(v)) {
          throw Error(ErrorCode::kRange,
                      "non-finite value at element " + std::to_string(i));
        }
        PutLe<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
        break;
      case DType::kUint32:
        if (!(v >= 0.0 && v <= 4294967295.0) || std::floor(v) != v) {
          throw Error(ErrorCode::kRange, "value at element " +
                                             std::to_string(i) +
                                             " is not a uint32");
        }
        PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(v));
        break;
    }
  }
  return out;
}

Tensor DecodeTensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "missing OVRT magic", 0);
  }
  if (bytes.size() < 7) {
    throw Error(ErrorCode::kTruncated, "header truncated", bytes.size());
  }
  const auto version = GetLe<std::uint16_t>(bytes, 4);
  if (version != kTensorVersion) {
    throw Error(ErrorCode::kBadVersion,
                "unsupported version " + std::to_string(version), 4);
  }
  const std::uint8_t rank = bytes[6];
  if (rank < 1 || rank > 4) {
    throw Error(ErrorCode::kBadRank,
                "rank must lie in [1, 4], got " + std::to_string(rank), 6);
  }
  const std::size_t dtype_offset = 7 + 4 * static_cast<std::size_t>(rank);
  if (bytes.size() < dtype_offset + 1) {
    throw Error(ErrorCode::kTruncated, "header truncated", bytes.size());
  }
  Tensor t;
  for (std::size_t i = 0; i < rank; ++i) {
    t.dims.push_back(GetLe<std::uint32_t>(bytes, 7 + 4 * i));
  }
  const std::uint8_t tag = bytes[dtype_offset];
  if (tag > 2) {
    throw Error(ErrorCode::kUnknownDtype,
                "unknown dtype tag " + std::to_string(tag), dtype_offset);
  }
  t.dtype = static_cast<DType>(tag);
  const std::size_t payload_offset = dtype_offset + 1;
  const std::size_t n = t.numel();
  const std::size_t width = DTypeSize(t.dtype);
  const std::size_t available = bytes.size() - payload_offset;
  if (available < n * width) {
    throw Error(ErrorCode::kTruncated,
                "payload holds " + std::to_string(available) +
                    " bytes, dims " + DimsString(t.dims) + " need " +
                    std::to_string(n * width),
                bytes.size());
  }
  if (available > n * width) {
    throw Error(ErrorCode::kTrailingBytes,
                std::to_string(available - n * width) +
                    " bytes follow the payload",
                payload_offset + n * width);
  }
  t.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t at = payload_offset + i * width;
    switch (t.dtype) {
      case DType::kFloat32:
        t.values[i] = std::bit_cast<float>(GetLe<std::uint32_t>(bytes, at));
        break;
      case DType::kFloat64:
        t.values[i] = std::bit_cast<double>(GetLe<std::uint64_t>(bytes, at));
        break;
      case DType::kUint32:
        t.values[i] = GetLe<std::uint32_t>(bytes, at);
        break;
    }
  }
  return t;
}

void WriteTensor(const Tensor& t, const std::filesystem::path& path) {
  const auto bytes = EncodeTensor(t);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

Tensor ReadTensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return DecodeTensor(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

Tensor ToTensor(const FeatureMap& f, DType dtype) {
  return {{static_cast<std::uint32_t>(f.height),
           static_cast<std::uint32_t>(f.width),
           static_cast<std::uint32_t>(f.dim)},
          dtype,
          f.values};
}

Tensor ToTensor(const MaskLogits& m, DType dtype) {
  return {{static_cast<std::uint32_t>(m.count),
           static_cast<std::uint32_t>(m.height),
           static_cast<std::uint32_t>(m.width)},
          dtype,
          m.values};
}

Tensor ToTensor(const Matrix& m, DType dtype) {
  return {{static_cast<std::uint32_t>(m.rows()),
           static_cast<std::uint32_t>(m.cols())},
          dtype,
          m.data()};
}

FeatureMap FeatureMapFromTensor(const Tensor& t) {
  RequireRank(t, 3, "feature map");
  FeatureMap f{static_cast<int>(t.dims[0]), static_cast<int>(t.dims[1]),
               static_cast<int>(t.dims[2]), t.values};
  ThrowIfInvalid(ValidateFeatureMap(f), "feature map");
  return f;
}

MaskLogits MaskLogitsFromTensor(const Tensor& t) {
  RequireRank(t, 3, "mask logits");
  return {static_cast<int>(t.dims[0]), static_cast<int>(t.dims[1]),
          static_cast<int>(t.dims[2]), t.values};
}

Matrix MatrixFromTensor(const Tensor& t) {
  RequireRank(t, 2, "matrix");
  return Matrix(t.dims[0], t.dims[1], t.values);
}

}  // namespace coatseg
