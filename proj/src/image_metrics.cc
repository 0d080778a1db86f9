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
#include "xroads/image_metrics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "xroads/text_io.h"

namespace xroads {

namespace {

void RequireFilterable(const Image& image) {
  if (image.width() < 3 || image.height() < 3) {
    throw std::invalid_argument("image must be at least 3x3 for filter metrics");
  }
}

// Clamped-border view of a grayscale raster.
class Gray {
 public:
  explicit Gray(const Image& image)
      : w_(image.width()), h_(image.height()), v_(image.Grayscale()) {}
  double operator()(int x, int y) const {
    return v_[static_cast<std::size_t>(std::clamp(y, 0, h_ - 1)) * w_ + std::clamp(x, 0, w_ - 1)];
  }

 private:
  int w_, h_;
  std::vector<double> v_;
};

// The 3x3 kernels are written as sums of differences so a constant
// neighborhood cancels exactly instead of leaving rounding residue.
double SobelX(const Gray& g, int x, int y) {
  return (g(x + 1, y - 1) - g(x - 1, y - 1)) + 2 * (g(x + 1, y) - g(x - 1, y)) +
         (g(x + 1, y + 1) - g(x - 1, y + 1));
}

double SobelY(const Gray& g, int x, int y) {
  return (g(x - 1, y + 1) - g(x - 1, y - 1)) + 2 * (g(x, y + 1) - g(x, y - 1)) +
         (g(x + 1, y + 1) - g(x + 1, y - 1));
}

// 4-neighbor Laplacian [[0, 1, 0], [1, -4, 1], [0, 1, 0]].
double Laplacian(const Gray& g, int x, int y) {
  const double c = g(x, y);
  return (g(x, y - 1) - c) + (g(x - 1, y) - c) + (g(x + 1, y) - c) + (g(x, y + 1) - c);
}

}  // namespace

double EdgeDensity(const Image& image) {
  RequireFilterable(image);
  const Gray gray(image);
  const int w = image.width(), h = image.height();
  double sum = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = SobelX(gray, x, y);
      const double gy = SobelY(gray, x, y);
      sum += std::sqrt(gx * gx + gy * gy);
    }
  }
  return sum / (static_cast<double>(w) * h);
}

std::int64_t RgbDiversity(const Image& image) {
  std::vector<std::uint32_t> keys;
  keys.reserve(static_cast<std::size_t>(image.width()) * image.height());
  const auto& d = image.data();
  for (std::size_t i = 0; i + 2 < d.size(); i += 3) {
    keys.push_back((std::uint32_t{d[i]} << 16) | (std::uint32_t{d[i + 1]} << 8) | d[i + 2]);
  }
  std::sort(keys.begin(), keys.end());
  return std::unique(keys.begin(), keys.end()) - keys.begin();
}

double Sharpness(const Image& image) {
  RequireFilterable(image);
  const Gray gray(image);
  const int w = image.width(), h = image.height();
  std::vector<double> response(static_cast<std::size_t>(w) * h);
  double mean = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double r = Laplacian(gray, x, y);
      response[static_cast<std::size_t>(y) * w + x] = r;
      mean += r;
    }
  }
  mean /= static_cast<double>(response.size());
  double var = 0;
  for (double r : response) var += (r - mean) * (r - mean);
  return var / static_cast<double>(response.size());
}

TileMetrics ComputeTileMetrics(const Image& image) {
  return {EdgeDensity(image), RgbDiversity(image), Sharpness(image)};
}

std::string TileMetricsCsv(const std::vector<TileMetricsRow>& rows) {
  std::string out = "tile_id,edge_density,rgb_diversity,sharpness\n";
  for (const TileMetricsRow& r : rows) {
    out += r.tile_id + "," + FormatDouble(r.metrics.edge_density) + "," +
           std::to_string(r.metrics.rgb_diversity) + "," + FormatDouble(r.metrics.sharpness) + "\n";
  }
  return out;
}

std::vector<TileMetricsRow> ParseTileMetricsCsv(const std::string& text) {
  const CsvTable table = ParseCsv(text);
  const std::size_t id = table.Column("tile_id");
  const std::size_t ed = table.Column("edge_density");
  const std::size_t rd = table.Column("rgb_diversity");
  const std::size_t sh = table.Column("sharpness");
  std::vector<TileMetricsRow> rows;
  for (const auto& r : table.rows) {
    rows.push_back({r[id], {ParseDouble(r[ed]), ParseInt(r[rd]), ParseDouble(r[sh])}});
  }
  return rows;
}

}  // namespace xroads
