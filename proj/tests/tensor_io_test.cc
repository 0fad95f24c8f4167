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


#include <cstdint>
#include <cstring>
#include <filesystem>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "coatseg/error.h"
#include "coatseg/panoptic_io.h"
#include "coatseg/tensor_io.h"
#include "test_util.h"

namespace coatseg {
namespace {

// Hand-assembled OVRT header, independent of the encoder.
std::vector<std::uint8_t> Header(const std::vector<std::uint32_t>& dims,
                                 std::uint8_t dtype) {
  std::vector<std::uint8_t> out = {'O', 'V', 'R', 'T', 1, 0,
                                   static_cast<std::uint8_t>(dims.size())};
  for (std::uint32_t d : dims) {
    for (int b = 0; b < 4; ++b) out.push_back((d >> (8 * b)) & 0xFF);
  }
  out.push_back(dtype);
  return out;
}

ErrorCode DecodeError(const std::vector<std::uint8_t>& bytes,
                      std::uint64_t* offset = nullptr) {
  try {
    DecodeTensor(bytes);
  } catch (const Error& e) {
    if (offset != nullptr) *offset = e.has_offset() ? e.offset() : ~0ull;
    return e.code();
  }
  ADD_FAILURE() << "decoding succeeded unexpectedly";
  return ErrorCode::kInvalidArgument;
}

Tensor RandomTensor(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> rank_dist(1, 4), dtype_dist(0, 2);
  Tensor t;
  t.dtype = static_cast<DType>(dtype_dist(rng));
  const int rank = rank_dist(rng);
  // Keep every dim <= 64 and the element count modest.
  std::size_t budget = 4096;
  for (int r = 0; r < rank; ++r) {
    const int cap = static_cast<int>(std::min<std::size_t>(64, budget));
    const std::uint32_t d = std::uniform_int_distribution<int>(1, cap)(rng);
    t.dims.push_back(d);
    budget = std::max<std::size_t>(1, budget / d);
  }
  t.values.resize(t.numel());
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (double& v : t.values) {
    switch (t.dtype) {
      case DType::kFloat32: v = static_cast<float>(u(rng)); break;
      case DType::kFloat64: v = u(rng); break;
      case DType::kUint32: v = static_cast<std::uint32_t>(rng()); break;
    }
  }
  return t;
}

std::filesystem::path ScratchDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("coatseg_tensor_io_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

TEST(TensorIoTest, Float32VectorLayoutAndRoundTrip) {
  Tensor t{{3}, DType::kFloat32, {1.0, 2.0, 3.0}};
  const auto bytes = EncodeTensor(t);
  auto expected = Header({3}, 0);
  for (float f : {1.0f, 2.0f, 3.0f}) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    for (int b = 0; b < 4; ++b) expected.push_back((bits >> (8 * b)) & 0xFF);
  }
  EXPECT_EQ(bytes, expected);
  EXPECT_EQ(DecodeTensor(bytes), t);
}

TEST(TensorIoTest, EmptyInputIsBadMagicAtZero) {
  std::uint64_t offset = 1;
  EXPECT_EQ(DecodeError({}, &offset), ErrorCode::kBadMagic);
  EXPECT_EQ(offset, 0u);
}

TEST(TensorIoTest, ShortPayloadIsTruncation) {
  auto bytes = Header({2, 2}, 0);
  bytes.resize(bytes.size() + 12, 0);
  EXPECT_EQ(DecodeError(bytes), ErrorCode::kTruncated);
}

TEST(TensorIoTest, HeaderFieldErrorsCarryOffsets) {
  std::uint64_t offset = 0;
  auto bad_version = Header({1}, 0);
  bad_version[4] = 2;
  bad_version.resize(bad_version.size() + 4, 0);
  EXPECT_EQ(DecodeError(bad_version, &offset), ErrorCode::kBadVersion);
  EXPECT_EQ(offset, 4u);

  auto bad_rank = Header({}, 0);
  EXPECT_EQ(DecodeError(bad_rank, &offset), ErrorCode::kBadRank);
  EXPECT_EQ(offset, 6u);
  auto rank5 = Header({1, 1, 1, 1, 1}, 0);
  EXPECT_EQ(DecodeError(rank5, &offset), ErrorCode::kBadRank);

  auto bad_dtype = Header({1, 1}, 7);
  bad_dtype.resize(bad_dtype.size() + 8, 0);
  EXPECT_EQ(DecodeError(bad_dtype, &offset), ErrorCode::kUnknownDtype);
  EXPECT_EQ(offset, 7u + 4u * 2u);

  auto trailing = Header({1}, 2);
  trailing.resize(trailing.size() + 5, 0);
  EXPECT_EQ(DecodeError(trailing), ErrorCode::kTrailingBytes);

  std::vector<std::uint8_t> wrong_magic = {'O', 'V', 'R', 'X'};
  EXPECT_EQ(DecodeError(wrong_magic, &offset), ErrorCode::kBadMagic);
  EXPECT_EQ(offset, 0u);
}

TEST(TensorIoTest, RandomRoundTripsAreBitExact) {
  std::mt19937_64 rng(2026);
  for (int trial = 0; trial < 1000; ++trial) {
    const Tensor t = RandomTensor(rng);
    const auto bytes = EncodeTensor(t);
    const Tensor back = DecodeTensor(bytes);
    ASSERT_EQ(back, t) << "trial " << trial;
    ASSERT_EQ(EncodeTensor(back), bytes) << "trial " << trial;
  }
}

TEST(TensorIoTest, FileRoundTrip) {
  const auto dir = ScratchDir("file");
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor t = RandomTensor(rng);
    WriteTensor(t, dir / "t.ovrt");
    EXPECT_EQ(ReadTensor(dir / "t.ovrt"), t);
  }
  EXPECT_THROW(ReadTensor(dir / "missing.ovrt"), Error);
}

TEST(TensorIoTest, TypedConversionsCheckRank) {
  FeatureMap f{2, 3, 4, std::vector<double>(24, 0.25)};
  const Tensor t = ToTensor(f, DType::kFloat64);
  EXPECT_EQ(t.dims, (std::vector<std::uint32_t>{2, 3, 4}));
  const FeatureMap back = FeatureMapFromTensor(t);
  EXPECT_EQ(back.values, f.values);
  EXPECT_EQ(back.dim, 4);
  EXPECT_THROW(MatrixFromTensor(t), Error);
  EXPECT_THROW(MaskLogitsFromTensor(Tensor{{2, 2}, DType::kFloat32, {0, 0, 0, 0}}),
               Error);
}

TEST(TensorIoTest, Float32NarrowsOnWrite) {
  const Tensor t{{1}, DType::kFloat32, {0.1}};
  EXPECT_EQ(DecodeTensor(EncodeTensor(t)).values[0],
            static_cast<double>(0.1f));
}

TEST(SegmentIdTest, KnownEncodings) {
  EXPECT_EQ(EncodeSegmentId(0), (Rgb{0, 0, 0}));
  EXPECT_EQ(EncodeSegmentId(257), (Rgb{1, 1, 0}));
  EXPECT_EQ(EncodeSegmentId(70000), (Rgb{112, 17, 1}));
}

TEST(SegmentIdTest, OutOfRangeIdIsRejected) {
  try {
    EncodeSegmentId(1u << 24);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRange);
  }
}

TEST(SegmentIdTest, BijectionOnSampleAndBoundaries) {
  std::vector<std::uint32_t> ids = {0, 255, 256, 65535, 65536, 16777215};
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::uint32_t> u(0, kMaxSegmentId);
  for (int i = 0; i < 100000; ++i) ids.push_back(u(rng));
  for (std::uint32_t id : ids) {
    const Rgb rgb = EncodeSegmentId(id);
    ASSERT_EQ(rgb[0] + 256u * rgb[1] + 65536u * rgb[2], id);
    ASSERT_EQ(DecodeSegmentId(rgb), id);
  }
  for (int i = 0; i < 100000; ++i) {
    const Rgb rgb = {static_cast<std::uint8_t>(rng()),
                     static_cast<std::uint8_t>(rng()),
                     static_cast<std::uint8_t>(rng())};
    ASSERT_EQ(EncodeSegmentId(DecodeSegmentId(rgb)), rgb);
  }
}

std::vector<std::uint8_t> RasterPng(const std::vector<std::uint32_t>& ids,
                                    int h, int w) {
  std::vector<std::uint8_t> rgb;
  for (std::uint32_t id : ids) {
    rgb.push_back(id & 0xFF);
    rgb.push_back((id >> 8) & 0xFF);
    rgb.push_back((id >> 16) & 0xFF);
  }
  return EncodePng(rgb, h, w);
}

TEST(PanopticIoTest, SingleSegmentRoundTrip) {
  PanopticMap m = PanopticMap::AllVoid(2, 2);
  m.segment_ids = {1, 1, 1, 1};
  m.segments = {{1, 0, false}};
  const std::vector<Category> vocab = {{"wall", true, false}};
  const auto dir = ScratchDir("single");
  WritePanoptic(m, vocab, {dir / "p.png", dir / "p.json"});
  const PanopticFile back = ReadPanoptic({dir / "p.png", dir / "p.json"});
  EXPECT_EQ(back.map, m);
  EXPECT_EQ(back.vocabulary, vocab);
}

TEST(PanopticIoTest, OrphanRasterIdIsNamed) {
  PanopticMap listed = PanopticMap::AllVoid(2, 2);
  listed.segments = {{1, 0, true}};
  const auto png = RasterPng({1, 1, 5, 0}, 2, 2);
  try {
    ParsePanoptic(png, SidecarToJson(listed, {{"car", true, true}}));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOrphanIds);
    EXPECT_EQ(e.ids(), std::vector<std::uint64_t>{5});
    EXPECT_NE(std::string(e.what()).find('5'), std::string::npos);
  }
}

TEST(PanopticIoTest, DuplicateSidecarIdIsRejected) {
  PanopticMap listed = PanopticMap::AllVoid(1, 2);
  listed.segments = {{1, 0, true}, {1, 0, true}};
  const auto png = RasterPng({1, 1}, 1, 2);
  try {
    ParsePanoptic(png, SidecarToJson(listed, {{"car", true, true}}));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateId);
    EXPECT_EQ(e.ids(), std::vector<std::uint64_t>{1});
  }
}

TEST(PanopticIoTest, AllVoidIsValid) {
  const PanopticMap m = PanopticMap::AllVoid(3, 2);
  const auto png = RasterPng(m.segment_ids, 3, 2);
  const PanopticFile back = ParsePanoptic(png, SidecarToJson(m, {}));
  EXPECT_EQ(back.map, m);
  EXPECT_TRUE(back.map.segments.empty());
}

TEST(PanopticIoTest, ListedSegmentWithoutPixelsIsRejected) {
  PanopticMap listed = PanopticMap::AllVoid(1, 2);
  listed.segment_ids = {1, 1};
  listed.segments = {{1, 0, true}, {2, 0, true}};
  const auto png = RasterPng(listed.segment_ids, 1, 2);
  EXPECT_THROW(ParsePanoptic(png, SidecarToJson(listed, {{"car", true, true}})),
               Error);
}

TEST(PanopticIoTest, MalformedSidecarIsParseError) {
  const auto png = RasterPng({0}, 1, 1);
  try {
    ParsePanoptic(png, "{not json");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
}

TEST(PanopticIoTest, RandomRoundTripsAreBitExact) {
  std::mt19937_64 rng(17);
  const auto cats = testing::TestCategories(7, 4);
  std::uniform_int_distribution<int> dim(1, 64), nrect(0, 12);
  for (int trial = 0; trial < 1000; ++trial) {
    const int h = dim(rng), w = dim(rng);
    const PanopticMap m = testing::RandomPanoptic(rng, h, w, nrect(rng), 7, cats);
    std::vector<std::uint8_t> rgb;
    for (std::uint32_t id : m.segment_ids) {
      const Rgb c = EncodeSegmentId(id);
      rgb.insert(rgb.end(), c.begin(), c.end());
    }
    const auto png = EncodePng(rgb, h, w);
    const std::string sidecar = SidecarToJson(m, cats);
    const PanopticFile back = ParsePanoptic(png, sidecar);
    ASSERT_EQ(back.map, m) << "trial " << trial;
    ASSERT_EQ(back.vocabulary, cats);
    ASSERT_EQ(SidecarToJson(back.map, back.vocabulary), sidecar);
  }
}

TEST(PanopticIoTest, VocabularyJsonAcceptsBothForms) {
  const std::vector<Category> vocab = {{"wall", true, false}, {"zebra", false, true}};
  EXPECT_EQ(ParseVocabularyJson(VocabularyToJson(vocab)), vocab);
  EXPECT_EQ(ParseVocabularyJson(
                R"([{"name":"wall","seen":true,"thing":false},)"
                R"({"name":"zebra","seen":false,"thing":true}])"),
            vocab);
}

}  // namespace
}  // namespace coatseg
