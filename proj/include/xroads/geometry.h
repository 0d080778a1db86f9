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
#ifndef XROADS_GEOMETRY_H_
#define XROADS_GEOMETRY_H_

#include <cstddef>
#include <span>
#include <vector>

namespace xroads {

struct Corners {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
};

// Axis-aligned box in center form, pixel units. w and h must be positive.
struct Box {
  double cx = 0;
  double cy = 0;
  double w = 0;
  double h = 0;

  double area() const { return w * h; }
  bool valid() const;
  Corners corners() const { return {cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2}; }
  static Box FromCorners(const Corners& c);
  // Boundary inclusive.
  bool Contains(double x, double y) const;

  friend bool operator==(const Box&, const Box&) = default;
};

struct ScoredBox {
  Box box;
  double score = 0;

  friend bool operator==(const ScoredBox&, const ScoredBox&) = default;
};

// Offsets of a box relative to an anchor: normalized center shift and
// log-space size ratio.
struct BoxDelta {
  double tx = 0, ty = 0, tw = 0, th = 0;

  double& operator[](int i) { return i == 0 ? tx : i == 1 ? ty : i == 2 ? tw : th; }
  double operator[](int i) const { return i == 0 ? tx : i == 1 ? ty : i == 2 ? tw : th; }
  friend bool operator==(const BoxDelta&, const BoxDelta&) = default;
};

struct AnchorGrid {
  int fm_rows = 0;
  int fm_cols = 0;
  double stride = 8;
  double base_size = 16;
  std::vector<double> scales{0.25, 0.5, 1.0, 2.0};
  std::vector<double> ratios{0.5, 1.0, 2.0};

  std::size_t per_location() const { return scales.size() * ratios.size(); }
  std::size_t total() const {
    return per_location() * static_cast<std::size_t>(fm_rows) * static_cast<std::size_t>(fm_cols);
  }
};

double Iou(const Box& a, const Box& b);

// Row-major over cells, then scale-major, ratio-minor within a cell.
// Throws std::invalid_argument on a non-positive scale or ratio.
std::vector<Box> GenerateAnchors(const AnchorGrid& grid);

BoxDelta EncodeBox(const Box& gt, const Box& anchor);
Box DecodeBox(const BoxDelta& d, const Box& anchor);

// Clips to [0,width]x[0,height]. Degenerate results keep a minimal
// 1e-3 px extent so the Box invariant still holds.
Box ClipBox(const Box& b, double width, double height);

// Greedy suppression in descending score order (ties: lower input index
// first). A box is dropped when its IoU with an already-kept box exceeds
// iou_threshold.
std::vector<ScoredBox> Nms(std::span<const ScoredBox> boxes, double iou_threshold,
                           std::size_t max_keep);

// Same as Nms but returns the input indices that were kept.
std::vector<std::size_t> NmsIndices(std::span<const ScoredBox> boxes, double iou_threshold,
                                    std::size_t max_keep);

}  // namespace xroads

#endif  // XROADS_GEOMETRY_H_
