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
#include "xroads/augment.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "xroads/rng.h"

namespace xroads {

namespace {

std::uint8_t ToByte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

}  // namespace

std::string_view TransformName(Transform t) {
  switch (t) {
    case Transform::kFlipH: return "flip_h";
    case Transform::kFlipV: return "flip_v";
    case Transform::kRotate: return "rotate";
    case Transform::kBlur: return "blur";
    case Transform::kDownscale: return "downscale";
  }
  return "unknown";
}

AnnotatedTile FlipHorizontal(const AnnotatedTile& t) {
  const Image& src = t.tile.image;
  AnnotatedTile out{{t.tile.id, Image(src.width(), src.height())}, {}};
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      out.tile.image.set_pixel(src.width() - 1 - x, y, src.pixel(x, y));
    }
  }
  for (Box b : t.ground_truths) {
    b.cx = src.width() - b.cx;
    out.ground_truths.push_back(b);
  }
  return out;
}

AnnotatedTile FlipVertical(const AnnotatedTile& t) {
  const Image& src = t.tile.image;
  AnnotatedTile out{{t.tile.id, Image(src.width(), src.height())}, {}};
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      out.tile.image.set_pixel(x, src.height() - 1 - y, src.pixel(x, y));
    }
  }
  for (Box b : t.ground_truths) {
    b.cy = src.height() - b.cy;
    out.ground_truths.push_back(b);
  }
  return out;
}

AnnotatedTile Rotate(const AnnotatedTile& t, double theta_degrees) {
  if (theta_degrees == 0.0) return t;
  const double rad = theta_degrees * std::numbers::pi / 180.0;
  double c = std::cos(rad);
  double s = std::sin(rad);
  // Snap values that are zero up to rounding so right angles stay exact.
  if (std::abs(c) < 1e-12) c = 0.0;
  if (std::abs(s) < 1e-12) s = 0.0;

  const Image& src = t.tile.image;
  const double w = src.width();
  const double h = src.height();
  const int new_w = static_cast<int>(std::ceil(std::abs(w * c) + std::abs(h * s) - 1e-9));
  const int new_h = static_cast<int>(std::ceil(std::abs(w * s) + std::abs(h * c) - 1e-9));
  const double scx = w / 2, scy = h / 2;
  const double dcx = new_w / 2.0, dcy = new_h / 2.0;

  // Forward: u' = u c + v s, v' = -u s + v c.
  auto forward = [&](double x, double y) {
    const double u = x - scx, v = y - scy;
    return std::pair{u * c + v * s + dcx, -u * s + v * c + dcy};
  };

  AnnotatedTile out{{t.tile.id, Image(new_w, new_h)}, {}};
  for (int y = 0; y < new_h; ++y) {
    for (int x = 0; x < new_w; ++x) {
      const double up = x + 0.5 - dcx, vp = y + 0.5 - dcy;
      const double sx = up * c - vp * s + scx;
      const double sy = up * s + vp * c + scy;
      const int ix = static_cast<int>(std::floor(sx));
      const int iy = static_cast<int>(std::floor(sy));
      if (ix >= 0 && iy >= 0 && ix < src.width() && iy < src.height()) {
        out.tile.image.set_pixel(x, y, src.pixel(ix, iy));
      }
    }
  }

  for (const Box& b : t.ground_truths) {
    const Corners k = b.corners();
    const std::pair<double, double> pts[4] = {forward(k.x1, k.y1), forward(k.x2, k.y1),
                                              forward(k.x1, k.y2), forward(k.x2, k.y2)};
    Corners hull{pts[0].first, pts[0].second, pts[0].first, pts[0].second};
    for (const auto& [px, py] : pts) {
      hull.x1 = std::min(hull.x1, px);
      hull.y1 = std::min(hull.y1, py);
      hull.x2 = std::max(hull.x2, px);
      hull.y2 = std::max(hull.y2, py);
    }
    out.ground_truths.push_back(Box::FromCorners(hull));
  }
  return out;
}

std::vector<double> GaussianKernel(double sigma) {
  if (!(sigma > 0)) throw std::invalid_argument("gaussian sigma must be positive");
  const int radius = static_cast<int>(std::ceil(3 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-(i * i) / (2 * sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

Image GaussianBlurImage(const Image& image, double sigma) {
  const std::vector<double> k = GaussianKernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);
  const int w = image.width(), h = image.height();
  std::vector<double> tmp(static_cast<std::size_t>(w) * h * 3);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int ch = 0; ch < 3; ++ch) {
        double acc = 0;
        for (int i = -radius; i <= radius; ++i) {
          acc += k[i + radius] * image.at(std::clamp(x + i, 0, w - 1), y, ch);
        }
        tmp[(static_cast<std::size_t>(y) * w + x) * 3 + ch] = acc;
      }
    }
  }
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int ch = 0; ch < 3; ++ch) {
        double acc = 0;
        for (int i = -radius; i <= radius; ++i) {
          acc += k[i + radius] * tmp[(static_cast<std::size_t>(std::clamp(y + i, 0, h - 1)) * w + x) * 3 + ch];
        }
        out.at(x, y, ch) = ToByte(acc);
      }
    }
  }
  return out;
}

AnnotatedTile GaussianBlur(const AnnotatedTile& t, double sigma) {
  return {{t.tile.id, GaussianBlurImage(t.tile.image, sigma)}, t.ground_truths};
}

AnnotatedTile Downscale(const AnnotatedTile& t, double factor) {
  if (!(factor >= kDownscaleMin && factor <= kDownscaleMax)) {
    throw std::invalid_argument("downscale factor must lie in [3, 5]");
  }
  const Image& src = t.tile.image;
  const int new_w = static_cast<int>(std::lround(src.width() / factor));
  const int new_h = static_cast<int>(std::lround(src.height() / factor));
  if (new_w < kMinTileSide || new_h < kMinTileSide) {
    throw std::invalid_argument("tile '" + t.tile.id + "' would shrink below " +
                                std::to_string(kMinTileSide) + " px");
  }

  Image out(new_w, new_h);
  for (int y = 0; y < new_h; ++y) {
    const double y0 = y * factor, y1 = std::min((y + 1) * factor, static_cast<double>(src.height()));
    for (int x = 0; x < new_w; ++x) {
      const double x0 = x * factor, x1 = std::min((x + 1) * factor, static_cast<double>(src.width()));
      double acc[3] = {0, 0, 0};
      double area = 0;
      for (int sy = static_cast<int>(std::floor(y0)); sy < static_cast<int>(std::ceil(y1)); ++sy) {
        const double wy = std::min<double>(sy + 1, y1) - std::max<double>(sy, y0);
        if (wy <= 0) continue;
        for (int sx = static_cast<int>(std::floor(x0)); sx < static_cast<int>(std::ceil(x1)); ++sx) {
          const double wx = std::min<double>(sx + 1, x1) - std::max<double>(sx, x0);
          if (wx <= 0) continue;
          const double wgt = wx * wy;
          for (int ch = 0; ch < 3; ++ch) acc[ch] += wgt * src.at(sx, sy, ch);
          area += wgt;
        }
      }
      for (int ch = 0; ch < 3; ++ch) out.at(x, y, ch) = ToByte(area > 0 ? acc[ch] / area : 255.0);
    }
  }

  AnnotatedTile result{{t.tile.id, std::move(out)}, {}};
  for (const Box& b : t.ground_truths) {
    result.ground_truths.push_back({b.cx / factor, b.cy / factor, b.w / factor, b.h / factor});
  }
  return result;
}

std::vector<AnnotatedTile> AugmentDataset(std::span<const AnnotatedTile> items,
                                          std::size_t target_count, std::uint64_t seed) {
  if (items.empty()) throw std::invalid_argument("augmentation needs at least one tile");
  if (target_count < items.size()) {
    throw std::invalid_argument("augmentation target is smaller than the dataset");
  }
  std::vector<AnnotatedTile> out(items.begin(), items.end());
  out.reserve(target_count);

  for (std::size_t i = 0; out.size() < target_count; ++i) {
    Rng rng(DeriveSeed(seed, "augment", i));
    const AnnotatedTile& source = items[rng.Below(items.size())];
    const double min_side = std::min(source.tile.width(), source.tile.height());
    // Largest factor that keeps the result at kMinTileSide or more.
    const double max_factor = std::min(kDownscaleMax, min_side / (kMinTileSide - 0.5));
    const bool can_downscale = max_factor >= kDownscaleMin;

    auto transform = static_cast<Transform>(rng.Below(kTransformCount));
    if (transform == Transform::kDownscale && !can_downscale) {
      transform = static_cast<Transform>(rng.Below(kTransformCount - 1));
    }

    AnnotatedTile made;
    switch (transform) {
      case Transform::kFlipH: made = FlipHorizontal(source); break;
      case Transform::kFlipV: made = FlipVertical(source); break;
      case Transform::kRotate: made = Rotate(source, rng.Uniform(0.0, 360.0)); break;
      case Transform::kBlur: made = GaussianBlur(source, rng.Uniform(kBlurSigmaMin, kBlurSigmaMax)); break;
      case Transform::kDownscale: made = Downscale(source, rng.Uniform(kDownscaleMin, max_factor)); break;
    }
    made.tile.id = source.tile.id + "_aug" + std::to_string(i) + "_" + std::string(TransformName(transform));
    ValidateAnnotatedTile(made);
    out.push_back(std::move(made));
  }
  return out;
}

}  // namespace xroads
