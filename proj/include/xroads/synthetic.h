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
#ifndef XROADS_SYNTHETIC_H_
#define XROADS_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "xroads/image.h"

namespace xroads {

// Map-like test tiles: straight roads crossing a white sheet, drawn either as
// one solid stroke or as two thin parallel strokes, plus brown contour arcs
// that never carry an annotation.
struct SyntheticConfig {
  int tile_size = 100;
  int min_roads = 2;
  int max_roads = 3;
  double double_line_probability = 0.5;
  double single_line_width = 2.0;
  double double_line_gap = 5.0;    // distance between the two stroke centers
  double double_line_width = 1.0;  // each stroke
  double min_crossing_angle_deg = 20.0;
  double min_crossing_separation = 24.0;
  double min_road_clearance = 12.0;  // for roads that do not cross in the tile
  double box_size = 16.0;
  int max_distractors = 2;

  void Validate() const;
};

// Deterministic in (config, id, seed). Crossings with an acute angle below the
// minimum, too close to another crossing, or too near the border to fit a
// full box are avoided by redrawing the offending road, as are roads that
// come close to another without crossing it inside the tile.
AnnotatedTile GenerateSyntheticTile(const SyntheticConfig& config, const std::string& id,
                                    std::uint64_t seed);

// Tiles "syn_0000", "syn_0001", ...; tile i draws from DeriveSeed(seed,
// "synthetic", i).
std::vector<AnnotatedTile> GenerateSyntheticDataset(const SyntheticConfig& config, int count,
                                                    std::uint64_t seed);

}  // namespace xroads

#endif  // XROADS_SYNTHETIC_H_
