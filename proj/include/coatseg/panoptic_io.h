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


// COCO-style panoptic annotations: an 8-bit RGB PNG raster whose pixels
// encode segment ids as R + 256 * G + 65536 * B, plus a JSON sidecar
//
//   { "segments":   [ {"id": 1, "category": 3, "thing": true}, ... ],
//     "vocabulary": [ {"name": "wall", "seen": true, "thing": false}, ... ] }
//
// Id 0 is void. Every nonzero raster id must appear in "segments".

#ifndef COATSEG_PANOPTIC_IO_H_
#define COATSEG_PANOPTIC_IO_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "coatseg/types.h"

namespace coatseg {

inline constexpr std::uint32_t kMaxSegmentId = (1u << 24) - 1;

using Rgb = std::array<std::uint8_t, 3>;

Rgb EncodeSegmentId(std::uint32_t id);
std::uint32_t DecodeSegmentId(const Rgb& rgb);

struct PanopticFile {
  PanopticMap map;
  std::vector<Category> vocabulary;

  friend bool operator==(const PanopticFile&, const PanopticFile&) = default;
};

struct PanopticPaths {
  std::filesystem::path png;
  std::filesystem::path json;
};

// In-memory raster codec. `rgb` is H * W * 3 bytes, row-major.
std::vector<std::uint8_t> EncodePng(std::span<const std::uint8_t> rgb,
                                    int height, int width);
std::vector<std::uint8_t> DecodePng(std::span<const std::uint8_t> png,
                                    int& height, int& width);

std::string SidecarToJson(const PanopticMap& map,
                          const std::vector<Category>& vocabulary);

// Combines a decoded raster with sidecar JSON text, checking consistency.
PanopticFile ParsePanoptic(std::span<const std::uint8_t> png,
                           const std::string& sidecar_json);

void WritePanoptic(const PanopticMap& map,
                   const std::vector<Category>& vocabulary,
                   const PanopticPaths& paths);
PanopticFile ReadPanoptic(const PanopticPaths& paths);

// Parses only the vocabulary entries of a sidecar-style document.
std::vector<Category> ParseVocabularyJson(const std::string& json_text);
std::string VocabularyToJson(const std::vector<Category>& vocabulary);

std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, const std::string& text);

}  // namespace coatseg

#endif  // COATSEG_PANOPTIC_IO_H_
