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
#include "xroads/dataset.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "xroads/rng.h"
#include "xroads/text_io.h"

namespace xroads {

using nlohmann::json;

namespace {

std::size_t LineOfOffset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

std::string RecordContext(std::size_t index, const std::string& field) {
  return "annotation record " + std::to_string(index) + ", field '" + field + "'";
}

}  // namespace

std::vector<AnnotationRecord> ParseAnnotationRecords(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DatasetError("annotation parse error at line " +
                       std::to_string(LineOfOffset(text, e.byte == 0 ? 0 : e.byte - 1)) + ": " +
                       e.what());
  }
  if (!doc.is_array()) throw DatasetError("annotation document must be a JSON array");

  std::vector<AnnotationRecord> records;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& item = doc[i];
    if (!item.is_object()) throw DatasetError("annotation record " + std::to_string(i) + " is not an object");
    for (const auto& [key, _] : item.items()) {
      if (key != "tile_id" && key != "image_path" && key != "boxes") {
        throw DatasetError(RecordContext(i, key) + ": unknown field");
      }
    }
    AnnotationRecord rec;
    if (!item.contains("tile_id") || !item["tile_id"].is_string()) {
      throw DatasetError(RecordContext(i, "tile_id") + ": missing or not a string");
    }
    rec.tile_id = item["tile_id"].get<std::string>();
    if (rec.tile_id.empty()) throw DatasetError(RecordContext(i, "tile_id") + ": empty");
    if (!seen.insert(rec.tile_id).second) {
      throw DatasetError(RecordContext(i, "tile_id") + ": duplicate id '" + rec.tile_id + "'");
    }
    if (!item.contains("image_path") || !item["image_path"].is_string()) {
      throw DatasetError(RecordContext(i, "image_path") + ": missing or not a string");
    }
    rec.image_path = item["image_path"].get<std::string>();
    if (!item.contains("boxes") || !item["boxes"].is_array()) {
      throw DatasetError(RecordContext(i, "boxes") + ": missing or not an array");
    }
    const json& boxes = item["boxes"];
    for (std::size_t b = 0; b < boxes.size(); ++b) {
      const json& bj = boxes[b];
      const std::string where = RecordContext(i, "boxes") + "[" + std::to_string(b) + "]";
      if (!bj.is_array() || bj.size() != 4) throw DatasetError(where + ": expected [cx,cy,w,h]");
      double v[4];
      for (int k = 0; k < 4; ++k) {
        if (!bj[k].is_number()) throw DatasetError(where + ": non-numeric coordinate");
        v[k] = bj[k].get<double>();
      }
      Box box{v[0], v[1], v[2], v[3]};
      if (!box.valid()) throw DatasetError(where + ": width and height must be positive");
      rec.boxes.push_back(box);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<AnnotationRecord> LoadAnnotationRecords(const std::filesystem::path& path) {
  std::string text;
  try {
    text = ReadTextFile(path);
  } catch (const std::exception& e) {
    throw DatasetError(e.what());
  }
  try {
    return ParseAnnotationRecords(text);
  } catch (const DatasetError& e) {
    throw DatasetError(path.string() + ": " + e.what());
  }
}

std::string SerializeAnnotationRecords(std::span<const AnnotationRecord> records) {
  json doc = json::array();
  for (const AnnotationRecord& rec : records) {
    json boxes = json::array();
    for (const Box& b : rec.boxes) boxes.push_back({b.cx, b.cy, b.w, b.h});
    doc.push_back({{"tile_id", rec.tile_id}, {"image_path", rec.image_path}, {"boxes", boxes}});
  }
  return doc.dump(1) + "\n";
}

std::vector<AnnotatedTile> LoadAnnotations(const std::filesystem::path& path) {
  const std::vector<AnnotationRecord> records = LoadAnnotationRecords(path);
  const std::filesystem::path base = path.parent_path();
  std::vector<AnnotatedTile> items;
  items.reserve(records.size());
  for (const AnnotationRecord& rec : records) {
    std::filesystem::path image_path(rec.image_path);
    if (image_path.is_relative()) image_path = base / image_path;
    if (!std::filesystem::exists(image_path)) {
      throw DatasetError("tile '" + rec.tile_id + "': image file " + image_path.string() +
                         " does not exist");
    }
    AnnotatedTile item;
    item.tile.id = rec.tile_id;
    try {
      item.tile.image = ReadPng(image_path);
    } catch (const std::exception& e) {
      throw DatasetError("tile '" + rec.tile_id + "': " + e.what());
    }
    item.ground_truths = rec.boxes;
    try {
      ValidateAnnotatedTile(item);
    } catch (const std::invalid_argument& e) {
      throw DatasetError(e.what());
    }
    items.push_back(std::move(item));
  }
  return items;
}

void SaveAnnotations(std::span<const AnnotatedTile> items, const std::filesystem::path& path,
                     const std::string& image_dir) {
  const std::filesystem::path base = path.parent_path();
  std::filesystem::create_directories(base / image_dir);
  std::vector<AnnotationRecord> records;
  records.reserve(items.size());
  for (const AnnotatedTile& item : items) {
    const std::string rel = image_dir + "/" + item.tile.id + ".png";
    WritePng(item.tile.image, base / rel);
    records.push_back({item.tile.id, rel, item.ground_truths});
  }
  WriteTextFile(path, SerializeAnnotationRecords(records));
}

DatasetSplit SplitTrainTest(std::span<const std::string> ids, std::uint64_t seed,
                            double test_fraction) {
  if (ids.size() < 5) throw std::invalid_argument("train/test split needs at least 5 items");
  if (!(test_fraction > 0 && test_fraction < 1)) {
    throw std::invalid_argument("test fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> order(ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(DeriveSeed(seed, "split"));
  rng.Shuffle(order);

  const auto n_test = static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(ids.size()) + 1e-9));
  std::vector<bool> is_test(ids.size(), false);
  for (std::size_t i = 0; i < n_test; ++i) is_test[order[i]] = true;

  DatasetSplit split;
  split.seed = seed;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    (is_test[i] ? split.test : split.train).push_back(ids[i]);
  }
  return split;
}

DatasetSplit SplitTrainTest(std::span<const AnnotatedTile> items, std::uint64_t seed,
                            double test_fraction) {
  std::vector<std::string> ids;
  ids.reserve(items.size());
  for (const AnnotatedTile& item : items) ids.push_back(item.tile.id);
  return SplitTrainTest(std::span<const std::string>(ids), seed, test_fraction);
}

DatasetSplit LoadSplit(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(ReadTextFile(path));
    DatasetSplit split;
    split.seed = doc.at("seed").get<std::uint64_t>();
    split.train = doc.at("train").get<std::vector<std::string>>();
    split.test = doc.at("test").get<std::vector<std::string>>();
    std::set<std::string> train(split.train.begin(), split.train.end());
    for (const std::string& id : split.test) {
      if (train.count(id)) throw DatasetError("id '" + id + "' is in both train and test");
    }
    return split;
  } catch (const DatasetError& e) {
    throw DatasetError(path.string() + ": " + e.what());
  } catch (const std::exception& e) {
    throw DatasetError(path.string() + ": bad split manifest: " + e.what());
  }
}

void SaveSplit(const DatasetSplit& split, const std::filesystem::path& path) {
  json doc = {{"seed", split.seed}, {"train", split.train}, {"test", split.test}};
  WriteTextFile(path, doc.dump(1) + "\n");
}

std::vector<AnnotatedTile> SelectTiles(std::span<const AnnotatedTile> items,
                                       std::span<const std::string> ids) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < items.size(); ++i) index.emplace(items[i].tile.id, i);
  std::vector<AnnotatedTile> out;
  out.reserve(ids.size());
  for (const std::string& id : ids) {
    auto it = index.find(id);
    if (it == index.end()) throw DatasetError("tile id '" + id + "' not found in dataset");
    out.push_back(items[it->second]);
  }
  return out;
}

}  // namespace xroads
