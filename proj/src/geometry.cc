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
#include "xroads/geometry.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace xroads {

bool Box::valid() const {
  return std::isfinite(cx) && std::isfinite(cy) && std::isfinite(w) && std::isfinite(h) &&
         w > 0 && h > 0;
}

Box Box::FromCorners(const Corners& c) {
  return {(c.x1 + c.x2) / 2, (c.y1 + c.y2) / 2, c.x2 - c.x1, c.y2 - c.y1};
}

bool Box::Contains(double x, double y) const {
  const Corners c = corners();
  return x >= c.x1 && x <= c.x2 && y >= c.y1 && y <= c.y2;
}

double Iou(const Box& a, const Box& b) {
  const Corners ca = a.corners();
  const Corners cb = b.corners();
  const double iw = std::min(ca.x2, cb.x2) - std::max(ca.x1, cb.x1);
  const double ih = std::min(ca.y2, cb.y2) - std::max(ca.y1, cb.y1);
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<Box> GenerateAnchors(const AnchorGrid& grid) {
  if (grid.scales.empty() || grid.ratios.empty()) {
    throw std::invalid_argument("anchor grid needs at least one scale and one ratio");
  }
  for (double s : grid.scales) {
    if (!(s > 0)) throw std::invalid_argument("anchor scale must be positive");
  }
  for (double r : grid.ratios) {
    if (!(r > 0)) throw std::invalid_argument("anchor ratio must be positive");
  }
  if (grid.fm_rows < 0 || grid.fm_cols < 0 || !(grid.stride > 0) || !(grid.base_size > 0)) {
    throw std::invalid_argument("anchor grid dimensions must be non-negative, stride and base positive");
  }

  std::vector<Box> anchors;
  anchors.reserve(grid.total());
  for (int row = 0; row < grid.fm_rows; ++row) {
    for (int col = 0; col < grid.fm_cols; ++col) {
      const double cx = (col + 0.5) * grid.stride;
      const double cy = (row + 0.5) * grid.stride;
      for (double scale : grid.scales) {
        const double side = scale * grid.base_size;
        for (double ratio : grid.ratios) {
          const double root = std::sqrt(ratio);
          anchors.push_back({cx, cy, side * root, side / root});
        }
      }
    }
  }
  return anchors;
}

BoxDelta EncodeBox(const Box& gt, const Box& anchor) {
  return {(gt.cx - anchor.cx) / anchor.w, (gt.cy - anchor.cy) / anchor.h,
          std::log(gt.w / anchor.w), std::log(gt.h / anchor.h)};
}

Box DecodeBox(const BoxDelta& d, const Box& anchor) {
  return {anchor.cx + d.tx * anchor.w, anchor.cy + d.ty * anchor.h, anchor.w * std::exp(d.tw),
          anchor.h * std::exp(d.th)};
}

Box ClipBox(const Box& b, double width, double height) {
  constexpr double kMinExtent = 1e-3;
  Corners c = b.corners();
  c.x1 = std::clamp(c.x1, 0.0, width);
  c.x2 = std::clamp(c.x2, 0.0, width);
  c.y1 = std::clamp(c.y1, 0.0, height);
  c.y2 = std::clamp(c.y2, 0.0, height);
  if (c.x2 - c.x1 < kMinExtent) {
    c.x1 = std::min(c.x1, width - kMinExtent);
    c.x2 = c.x1 + kMinExtent;
  }
  if (c.y2 - c.y1 < kMinExtent) {
    c.y1 = std::min(c.y1, height - kMinExtent);
    c.y2 = c.y1 + kMinExtent;
  }
  return Box::FromCorners(c);
}

std::vector<std::size_t> NmsIndices(std::span<const ScoredBox> boxes, double iou_threshold,
                                    std::size_t max_keep) {
  if (!(iou_threshold > 0 && iou_threshold < 1)) {
    throw std::invalid_argument("nms threshold must lie in (0, 1)");
  }
  if (max_keep < 1) throw std::invalid_argument("nms max_keep must be at least 1");

  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return boxes[a].score > boxes[b].score;
  });

  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    if (kept.size() >= max_keep) break;
    bool suppressed = false;
    for (std::size_t k : kept) {
      if (Iou(boxes[idx].box, boxes[k].box) > iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(idx);
  }
  return kept;
}

std::vector<ScoredBox> Nms(std::span<const ScoredBox> boxes, double iou_threshold,
                           std::size_t max_keep) {
  std::vector<ScoredBox> out;
  for (std::size_t idx : NmsIndices(boxes, iou_threshold, max_keep)) out.push_back(boxes[idx]);
  return out;
}

}  // namespace xroads
