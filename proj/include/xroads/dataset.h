/* Copyright 2026 The xroads Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef XROADS_DATASET_H_
#define XROADS_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "xroads/geometry.h"
#include "xroads/image.h"

namespace xroads {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One entry of an annotation document. image_path is relative to the
// directory holding the document unless absolute.
struct AnnotationRecord {
  std::string tile_id;
  std::string image_path;
  std::vector<Box> boxes;

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

// Parses the annotation JSON without touching images. Errors carry the line
// number for syntax problems and the record index and field for schema
// problems.
std::vector<AnnotationRecord> ParseAnnotationRecords(const std::string& text);
std::vector<AnnotationRecord> LoadAnnotationRecords(const std::filesystem::path& path);
std::string SerializeAnnotationRecords(std::span<const AnnotationRecord> records);

// Loads records and their PNG tiles. A record whose image is absent fails with
// a message naming the tile id.
std::vector<AnnotatedTile> LoadAnnotations(const std::filesystem::path& path);

// Writes each tile to <dir of path>/<image_dir>/<tile id>.png and the
// annotation document to path.
void SaveAnnotations(std::span<const AnnotatedTile> items, const std::filesystem::path& path,
                     const std::string& image_dir = "tiles");

struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> test;
  std::uint64_t seed = 0;

  friend bool operator==(const DatasetSplit&, const DatasetSplit&) = default;
};

// Seeded shuffle, then the first floor(test_fraction * n) ids go to test.
// Both lists keep the input order. Requires at least 5 ids.
DatasetSplit SplitTrainTest(std::span<const std::string> ids, std::uint64_t seed,
                            double test_fraction = 0.2);
DatasetSplit SplitTrainTest(std::span<const AnnotatedTile> items, std::uint64_t seed,
                            double test_fraction = 0.2);

DatasetSplit LoadSplit(const std::filesystem::path& path);
void SaveSplit(const DatasetSplit& split, const std::filesystem::path& path);

// Returns the items whose tile id is in ids, in the order of ids.
std::vector<AnnotatedTile> SelectTiles(std::span<const AnnotatedTile> items,
                                       std::span<const std::string> ids);

}  // namespace xroads

#endif  // XROADS_DATASET_H_
