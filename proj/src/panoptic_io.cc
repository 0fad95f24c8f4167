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


#include "coatseg/panoptic_io.h"

#include <png.h>

#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "coatseg/error.h"

namespace coatseg {
namespace {

using nlohmann::json;

std::vector<std::uint8_t> ReadBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string JoinIds(const std::vector<std::uint64_t>& ids) {
  std::string s;
  for (auto id : ids) s += (s.empty() ? "" : ", ") + std::to_string(id);
  return s;
}

json CategoriesJson(const std::vector<Category>& vocabulary) {
  json arr = json::array();
  for (const Category& c : vocabulary) {
    arr.push_back({{"name", c.name}, {"seen", c.seen}, {"thing", c.thing}});
  }
  return arr;
}

std::vector<Category> CategoriesFromJson(const json& arr) {
  std::vector<Category> out;
  for (const json& c : arr) {
    out.push_back({c.at("name").get<std::string>(), c.value("seen", true),
                   c.value("thing", true)});
  }
  return out;
}

}  // namespace

Rgb EncodeSegmentId(std::uint32_t id) {
  if (id > kMaxSegmentId) {
    throw Error(ErrorCode::kRange,
                "segment id " + std::to_string(id) + " exceeds 2^24 - 1");
  }
  return {static_cast<std::uint8_t>(id & 0xff),
          static_cast<std::uint8_t>((id >> 8) & 0xff),
          static_cast<std::uint8_t>((id >> 16) & 0xff)};
}

std::uint32_t DecodeSegmentId(const Rgb& rgb) {
  return rgb[0] + 256u * rgb[1] + 65536u * rgb[2];
}

std::vector<std::uint8_t> EncodePng(std::span<const std::uint8_t> rgb,
                                    int height, int width) {
  if (height < 1 || width < 1 ||
      rgb.size() != static_cast<std::size_t>(height) * width * 3) {
    throw Error(ErrorCode::kShape, "raster size does not match dimensions");
  }
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, rgb.data(), 0,
                                 nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kIo, "png encode failed: " + msg);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, rgb.data(), 0,
                                 nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kIo, "png encode failed: " + msg);
  }
  out.resize(size);
  return out;
}

std::vector<std::uint8_t> DecodePng(std::span<const std::uint8_t> png,
                                    int& height, int& width) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, png.data(), png.size())) {
    throw Error(ErrorCode::kParse, std::string("png decode failed: ") +
                                       image.message);
  }
  if (image.format & (PNG_FORMAT_FLAG_ALPHA | PNG_FORMAT_FLAG_LINEAR)) {
    png_image_free(&image);
    throw Error(ErrorCode::kParse,
                "panoptic raster must be 8-bit RGB without alpha");
  }
  image.format = PNG_FORMAT_RGB;
  height = static_cast<int>(image.height);
  width = static_cast<int>(image.width);
  std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgb.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kParse, "png decode failed: " + msg);
  }
  return rgb;
}

std::string SidecarToJson(const PanopticMap& map,
                          const std::vector<Category>& vocabulary) {
  json doc;
  doc["segments"] = json::array();
  for (const Segment& s : map.segments) {
    doc["segments"].push_back(
        {{"id", s.id}, {"category", s.category}, {"thing", s.thing}});
  }
  doc["vocabulary"] = CategoriesJson(vocabulary);
  return doc.dump(2) + "\n";
}

PanopticFile ParsePanoptic(std::span<const std::uint8_t> png,
                           const std::string& sidecar_json) {
  PanopticFile out;
  int height = 0;
  int width = 0;
  const auto rgb = DecodePng(png, height, width);
  out.map.height = height;
  out.map.width = width;
  out.map.segment_ids.resize(static_cast<std::size_t>(height) * width);
  for (std::size_t i = 0; i < out.map.segment_ids.size(); ++i) {
    out.map.segment_ids[i] =
        DecodeSegmentId({rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]});
  }

  json doc;
  try {
    doc = json::parse(sidecar_json);
    std::set<std::uint32_t> seen_ids;
    std::vector<std::uint64_t> duplicates;
    for (const json& s : doc.at("segments")) {
      Segment seg{s.at("id").get<std::uint32_t>(), s.at("category").get<int>(),
                  s.value("thing", false)};
      if (!seen_ids.insert(seg.id).second) duplicates.push_back(seg.id);
      out.map.segments.push_back(seg);
    }
    if (!duplicates.empty()) {
      throw Error(ErrorCode::kDuplicateId,
                  "duplicate sidecar segment ids: " + JoinIds(duplicates),
                  duplicates);
    }
    if (doc.contains("vocabulary")) {
      out.vocabulary = CategoriesFromJson(doc.at("vocabulary"));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad sidecar: ") + e.what());
  }

  std::set<std::uint32_t> listed;
  for (const Segment& s : out.map.segments) listed.insert(s.id);
  std::set<std::uint64_t> orphans;
  for (std::uint32_t id : out.map.segment_ids) {
    if (id != 0 && !listed.count(id)) orphans.insert(id);
  }
  if (!orphans.empty()) {
    std::vector<std::uint64_t> ids(orphans.begin(), orphans.end());
    throw Error(ErrorCode::kOrphanIds,
                "raster ids missing from sidecar: " + JoinIds(ids), ids);
  }
  const int n_cls =
      out.vocabulary.empty() ? -1 : static_cast<int>(out.vocabulary.size());
  const auto report = ValidatePanoptic(out.map, n_cls);
  if (!report.empty()) {
    std::string message = "inconsistent panoptic annotation:";
    for (const Violation& v : report) message += " " + v.reason + ";";
    throw Error(ErrorCode::kInvalidPanoptic, message);
  }
  return out;
}

void WritePanoptic(const PanopticMap& map,
                   const std::vector<Category>& vocabulary,
                   const PanopticPaths& paths) {
  ThrowIfInvalid(ValidatePanoptic(map, vocabulary.empty()
                                           ? -1
                                           : static_cast<int>(vocabulary.size())),
                 "panoptic map");
  std::vector<std::uint8_t> rgb(map.pixels() * 3);
  for (std::size_t i = 0; i < map.pixels(); ++i) {
    const Rgb c = EncodeSegmentId(map.segment_ids[i]);
    rgb[3 * i] = c[0];
    rgb[3 * i + 1] = c[1];
    rgb[3 * i + 2] = c[2];
  }
  const auto png = EncodePng(rgb, map.height, map.width);
  std::ofstream out(paths.png, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + paths.png.string());
  out.write(reinterpret_cast<const char*>(png.data()),
            static_cast<std::streamsize>(png.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + paths.png.string());
  WriteTextFile(paths.json, SidecarToJson(map, vocabulary));
}

PanopticFile ReadPanoptic(const PanopticPaths& paths) {
  const auto png = ReadBytes(paths.png);
  const std::string sidecar = ReadTextFile(paths.json);
  try {
    return ParsePanoptic(png, sidecar);
  } catch (const Error& e) {
    throw Error(e.code(), paths.png.string() + ": " + e.what(), e.ids());
  }
}

std::vector<Category> ParseVocabularyJson(const std::string& json_text) {
  try {
    const json doc = json::parse(json_text);
    return CategoriesFromJson(doc.is_array() ? doc : doc.at("vocabulary"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad vocabulary: ") + e.what());
  }
}

std::string VocabularyToJson(const std::vector<Category>& vocabulary) {
  json doc;
  doc["vocabulary"] = CategoriesJson(vocabulary);
  return doc.dump(2) + "\n";
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace coatseg
