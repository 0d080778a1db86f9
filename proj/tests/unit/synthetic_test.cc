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
#include "xroads/synthetic.h"

#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "xroads/rng.h"

namespace xroads {
namespace {

bool IsInk(const Rgb& p) { return p[0] < 128 && p[1] < 128 && p[2] < 128; }

TEST_CASE("synthetic tiles are deterministic in config, id and seed") {
  const SyntheticConfig config;
  CHECK(GenerateSyntheticTile(config, "a", 5) == GenerateSyntheticTile(config, "a", 5));
  CHECK(GenerateSyntheticTile(config, "a", 5) != GenerateSyntheticTile(config, "a", 6));
}

TEST_CASE("dataset tiles are named and seeded per index") {
  const SyntheticConfig config;
  const auto tiles = GenerateSyntheticDataset(config, 12, 99);
  REQUIRE(tiles.size() == 12);
  for (int i = 0; i < 12; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "syn_%04d", i);
    CHECK(tiles[i].tile.id == id);
    CHECK(tiles[i] == GenerateSyntheticTile(config, id, DeriveSeed(99, "synthetic", i)));
  }
}

TEST_CASE("boxes are full size, inside the tile, well separated and on ink") {
  const SyntheticConfig config;
  const auto tiles = GenerateSyntheticDataset(config, 150, 3);
  std::size_t total_boxes = 0;
  for (const AnnotatedTile& t : tiles) {
    ValidateAnnotatedTile(t);
    CHECK(t.tile.width() == config.tile_size);
    CHECK(t.tile.height() == config.tile_size);
    total_boxes += t.ground_truths.size();
    for (std::size_t i = 0; i < t.ground_truths.size(); ++i) {
      const Box& b = t.ground_truths[i];
      CHECK(b.w == config.box_size);
      CHECK(b.h == config.box_size);
      const Corners c = b.corners();
      CHECK(c.x1 >= 0);
      CHECK(c.y1 >= 0);
      CHECK(c.x2 <= config.tile_size);
      CHECK(c.y2 <= config.tile_size);
      for (std::size_t j = i + 1; j < t.ground_truths.size(); ++j) {
        const Box& o = t.ground_truths[j];
        CHECK(std::hypot(b.cx - o.cx, b.cy - o.cy) >= config.min_crossing_separation);
      }
      // A crossing always has road ink within a few pixels of its center.
      bool ink = false;
      for (int y = static_cast<int>(b.cy) - 3; y <= static_cast<int>(b.cy) + 3; ++y) {
        for (int x = static_cast<int>(b.cx) - 3; x <= static_cast<int>(b.cx) + 3; ++x) {
          ink = ink || IsInk(t.tile.image.pixel(x, y));
        }
      }
      CHECK(ink);
    }
  }
  // Two or three random roads usually cross at least once.
  CHECK(total_boxes >= tiles.size());
}

TEST_CASE("distractor arcs use a non-road color") {
  const auto tiles = GenerateSyntheticDataset(SyntheticConfig{}, 30, 4);
  int brown = 0;
  for (const AnnotatedTile& t : tiles) {
    for (int y = 0; y < t.tile.height(); ++y) {
      for (int x = 0; x < t.tile.width(); ++x) brown += t.tile.image.pixel(x, y) == Rgb{165, 110, 60};
    }
  }
  CHECK(brown > 0);
}

TEST_CASE("synthetic config validation") {
  SyntheticConfig c;
  c.Validate();
  c.min_roads = -1;
  CHECK_THROWS_AS(c.Validate(), std::invalid_argument);
  c = {};
  c.max_roads = 1;
  CHECK_THROWS_AS(c.Validate(), std::invalid_argument);
  c = {};
  c.double_line_probability = 1.5;
  CHECK_THROWS_AS(c.Validate(), std::invalid_argument);
  c = {};
  c.box_size = 0;
  CHECK_THROWS_AS(c.Validate(), std::invalid_argument);
  c = {};
  c.tile_size = 4;
  CHECK_THROWS_AS(c.Validate(), std::invalid_argument);
  c = {};
  c.double_line_gap = 0.5;
  CHECK_THROWS_AS(c.Validate(), std::invalid_argument);
  c = {};
  c.min_road_clearance = -1;
  CHECK_THROWS_AS(c.Validate(), std::invalid_argument);
}

}  // namespace
}  // namespace xroads
