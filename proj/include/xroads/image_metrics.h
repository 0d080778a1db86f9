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
#ifndef XROADS_IMAGE_METRICS_H_
#define XROADS_IMAGE_METRICS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "xroads/image.h"

namespace xroads {

// Tile complexity measures. All filters clamp at the border and work on the
// BT.601 luminance of the tile.
struct TileMetrics {
  double edge_density = 0;      // mean Sobel magnitude per pixel
  std::int64_t rgb_diversity = 0;  // distinct (r, g, b) triples
  double sharpness = 0;         // population variance of the 4-neighbor Laplacian
};

// Inputs smaller than 3x3 are rejected for the two filter metrics.
double EdgeDensity(const Image& image);
std::int64_t RgbDiversity(const Image& image);
double Sharpness(const Image& image);
TileMetrics ComputeTileMetrics(const Image& image);

struct TileMetricsRow {
  std::string tile_id;
  TileMetrics metrics;
};

// tile_id,edge_density,rgb_diversity,sharpness
std::string TileMetricsCsv(const std::vector<TileMetricsRow>& rows);
std::vector<TileMetricsRow> ParseTileMetricsCsv(const std::string& text);

}  // namespace xroads

#endif  // XROADS_IMAGE_METRICS_H_
