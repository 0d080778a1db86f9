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
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "xroads/rng.h"

namespace xroads {

namespace {

constexpr Rgb kInk = {20, 20, 20};
constexpr Rgb kPaper = {255, 255, 255};
constexpr Rgb kContour = {165, 110, 60};

// Infinite line through (px, py) with unit direction (dx, dy).
struct Road {
  double px, py, dx, dy;
  bool double_line;

  double SignedDistance(double x, double y) const { return (x - px) * dy - (y - py) * dx; }
};

struct Point {
  double x, y;
};

std::optional<Point> Intersect(const Road& a, const Road& b) {
  const double det = a.dx * b.dy - a.dy * b.dx;
  if (std::abs(det) < 1e-12) return std::nullopt;
  const double t = ((b.px - a.px) * b.dy - (b.py - a.py) * b.dx) / det;
  return Point{a.px + t * a.dx, a.py + t * a.dy};
}

// Acute angle between two roads in degrees.
double CrossingAngle(const Road& a, const Road& b) {
  const double c = std::abs(a.dx * b.dx + a.dy * b.dy);
  return std::acos(std::min(1.0, c)) * 180.0 / std::numbers::pi;
}

// Smallest distance from the part of road a inside the tile to road b.
double ClearanceInside(const Road& a, const Road& b, double size) {
  double best = std::numeric_limits<double>::infinity();
  const double reach = 2 * size;
  for (double t = -reach; t <= reach; t += 0.5) {
    const double x = a.px + t * a.dx, y = a.py + t * a.dy;
    if (x < 0 || x > size || y < 0 || y > size) continue;
    best = std::min(best, std::abs(b.SignedDistance(x, y)));
  }
  return best;
}

// Paints pixels whose center lies within [lo, hi] of the road's signed offset.
void PaintBand(Image& img, const Road& r, double lo, double hi, Rgb color) {
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double d = r.SignedDistance(x + 0.5, y + 0.5);
      if (d >= lo && d <= hi) img.set_pixel(x, y, color);
    }
  }
}

void PaintArc(Image& img, double cx, double cy, double radius, double a0, double a1) {
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
      if (std::abs(std::hypot(dx, dy) - radius) > 0.6) continue;
      double a = std::atan2(dy, dx);
      if (a < a0) a += 2 * std::numbers::pi;
      if (a <= a1) img.set_pixel(x, y, kContour);
    }
  }
}

}  // namespace

void SyntheticConfig::Validate() const {
  if (tile_size < kMinTileSide) throw std::invalid_argument("synthetic tile_size too small");
  if (min_roads < 0 || max_roads < min_roads) throw std::invalid_argument("synthetic road counts invalid");
  if (!(double_line_probability >= 0 && double_line_probability <= 1)) {
    throw std::invalid_argument("double_line_probability must lie in [0, 1]");
  }
  if (!(box_size > 0) || box_size >= tile_size) throw std::invalid_argument("synthetic box_size invalid");
  if (!(min_crossing_angle_deg >= 0 && min_crossing_angle_deg < 90)) {
    throw std::invalid_argument("min_crossing_angle_deg must lie in [0, 90)");
  }
  if (!(single_line_width > 0 && double_line_width > 0 && double_line_gap > double_line_width)) {
    throw std::invalid_argument("synthetic stroke widths must be positive and narrower than the gap");
  }
  if (!(min_crossing_separation >= 0 && min_road_clearance >= 0)) {
    throw std::invalid_argument("synthetic separations must be non-negative");
  }
  if (max_distractors < 0) throw std::invalid_argument("max_distractors must be non-negative");
}

AnnotatedTile GenerateSyntheticTile(const SyntheticConfig& config, const std::string& id,
                                    std::uint64_t seed) {
  config.Validate();
  Rng rng(seed);
  const double size = config.tile_size;
  const double half_box = config.box_size / 2;
  const int n_roads = config.min_roads + static_cast<int>(rng.Below(
                                             static_cast<std::uint64_t>(config.max_roads - config.min_roads + 1)));

  std::vector<Road> roads;
  std::vector<Point> crossings;
  constexpr int kMaxAttempts = 200;
  for (int r = 0; r < n_roads; ++r) {
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      const double theta = rng.Uniform(0, std::numbers::pi);
      Road road{rng.Uniform(0.2 * size, 0.8 * size), rng.Uniform(0.2 * size, 0.8 * size), std::cos(theta),
                std::sin(theta), rng.Uniform() < config.double_line_probability};
      std::vector<Point> added;
      bool ok = true;
      for (const Road& other : roads) {
        const std::optional<Point> p = Intersect(road, other);
        const bool inside = p && p->x >= 0 && p->x <= size && p->y >= 0 && p->y <= size;
        if (!inside) {
          // Near misses read as crossings; keep non-crossing roads apart.
          if (ClearanceInside(road, other, size) < config.min_road_clearance ||
              ClearanceInside(other, road, size) < config.min_road_clearance) {
            ok = false;
            break;
          }
          continue;
        }
        const bool fits = p->x >= half_box && p->x <= size - half_box && p->y >= half_box &&
                          p->y <= size - half_box;
        if (!fits || CrossingAngle(road, other) < config.min_crossing_angle_deg) {
          ok = false;
          break;
        }
        added.push_back(*p);
      }
      for (std::size_t i = 0; ok && i < added.size(); ++i) {
        auto far = [&](const Point& q) {
          return std::hypot(q.x - added[i].x, q.y - added[i].y) >= config.min_crossing_separation;
        };
        for (const Point& q : crossings) ok = ok && far(q);
        for (std::size_t j = 0; j < i; ++j) ok = ok && far(added[j]);
      }
      if (!ok) continue;
      roads.push_back(road);
      crossings.insert(crossings.end(), added.begin(), added.end());
      break;
    }
  }

  AnnotatedTile out;
  out.tile.id = id;
  out.tile.image = Image(config.tile_size, config.tile_size, kPaper);
  Image& img = out.tile.image;

  const int n_arcs = static_cast<int>(rng.Below(static_cast<std::uint64_t>(config.max_distractors + 1)));
  for (int a = 0; a < n_arcs; ++a) {
    const double radius = rng.Uniform(0.3 * size, 0.9 * size);
    const double cx = rng.Uniform(-0.3 * size, 1.3 * size), cy = rng.Uniform(-0.3 * size, 1.3 * size);
    const double a0 = rng.Uniform(-std::numbers::pi, std::numbers::pi);
    PaintArc(img, cx, cy, radius, a0, a0 + rng.Uniform(0.5, 2.0));
  }

  // Double-line roads: outer strokes first, then the paper between them, so
  // crossings between double-line roads stay open like on a printed sheet.
  const double g = config.double_line_gap / 2, w = config.double_line_width / 2;
  for (const Road& r : roads) {
    if (!r.double_line) continue;
    PaintBand(img, r, -g - w, -g + w, kInk);
    PaintBand(img, r, g - w, g + w, kInk);
  }
  for (const Road& r : roads) {
    if (r.double_line) PaintBand(img, r, -g + w + 1e-9, g - w - 1e-9, kPaper);
  }
  const double s = config.single_line_width / 2;
  for (const Road& r : roads) {
    if (!r.double_line) PaintBand(img, r, -s, s, kInk);
  }

  for (const Point& p : crossings) {
    out.ground_truths.push_back(Box{p.x, p.y, config.box_size, config.box_size});
  }
  return out;
}

std::vector<AnnotatedTile> GenerateSyntheticDataset(const SyntheticConfig& config, int count,
                                                    std::uint64_t seed) {
  if (count < 0) throw std::invalid_argument("synthetic tile count must be non-negative");
  std::vector<AnnotatedTile> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "syn_%04d", i);
    out.push_back(GenerateSyntheticTile(config, id, DeriveSeed(seed, "synthetic", static_cast<std::uint64_t>(i))));
  }
  return out;
}

}  // namespace xroads
