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

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "support/oracles.h"
#include "xroads/rng.h"

namespace xroads {
namespace {

Box RandomIntegerBox(Rng& rng, int extent) {
  const int x1 = static_cast<int>(rng.Below(extent - 1));
  const int y1 = static_cast<int>(rng.Below(extent - 1));
  const int x2 = x1 + 1 + static_cast<int>(rng.Below(extent - x1 - 1));
  const int y2 = y1 + 1 + static_cast<int>(rng.Below(extent - y1 - 1));
  return Box::FromCorners({double(x1), double(y1), double(x2), double(y2)});
}

Box RandomBox(Rng& rng) {
  return {rng.Uniform(0, 100), rng.Uniform(0, 100), rng.Uniform(1, 40), rng.Uniform(1, 40)};
}

TEST_CASE("iou of identical boxes is one") {
  const Box a{5, 5, 10, 10};
  CHECK(Iou(a, a) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("iou of disjoint boxes is zero") {
  CHECK(Iou({0, 0, 2, 2}, {100, 100, 2, 2}) == 0.0);
}

TEST_CASE("iou of half-shifted unit squares matches a raster count") {
  const Box a{0.5, 0.5, 1, 1}, b{1.0, 0.5, 1, 1};
  const double oracle = testing::RasterIou(a, b, 1e-3);
  CHECK(std::abs(oracle - 1.0 / 3.0) < 1e-9);
  CHECK(std::abs(Iou(a, b) - oracle) < 1e-9);
}

TEST_CASE("iou agrees with pixel counting on random integer boxes") {
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    const Box a = RandomIntegerBox(rng, 64), b = RandomIntegerBox(rng, 64);
    CHECK(std::abs(Iou(a, b) - testing::RasterIou(a, b, 1.0)) < 1e-9);
  }
}

TEST_CASE("iou is symmetric and bounded") {
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const Box a = RandomBox(rng), b = RandomBox(rng);
    const double v = Iou(a, b);
    CHECK(v == Iou(b, a));
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(std::abs(Iou(a, a) - 1.0) < 1e-12);
  }
}

TEST_CASE("corner form round-trips") {
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    const Box b = RandomBox(rng);
    const Box r = Box::FromCorners(b.corners());
    CHECK(std::abs(r.cx - b.cx) < 1e-9);
    CHECK(std::abs(r.cy - b.cy) < 1e-9);
    CHECK(std::abs(r.w - b.w) < 1e-9);
    CHECK(std::abs(r.h - b.h) < 1e-9);
  }
}

TEST_CASE("contains is boundary inclusive") {
  const Box b{10, 10, 4, 6};
  CHECK(b.Contains(8, 7));
  CHECK(b.Contains(12, 13));
  CHECK_FALSE(b.Contains(12.0001, 10));
}

TEST_CASE("anchors: twelve per location on a single cell") {
  AnchorGrid grid;
  grid.fm_rows = grid.fm_cols = 1;
  CHECK(GenerateAnchors(grid).size() == 12);
}

TEST_CASE("anchors: unit scale and ratio at cell zero") {
  AnchorGrid grid;
  grid.fm_rows = grid.fm_cols = 1;
  grid.stride = 16;
  grid.base_size = 16;
  grid.scales = {1.0};
  grid.ratios = {1.0};
  const auto anchors = GenerateAnchors(grid);
  REQUIRE(anchors.size() == 1);
  CHECK(anchors[0] == Box{8, 8, 16, 16});
}

TEST_CASE("anchors: enumeration order and shapes on a 4x4 grid") {
  AnchorGrid grid;
  grid.fm_rows = grid.fm_cols = 4;
  const auto anchors = GenerateAnchors(grid);
  REQUIRE(anchors.size() == 192);
  std::size_t i = 0;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      for (double s : grid.scales) {
        for (double q : grid.ratios) {
          const Box& a = anchors[i++];
          CHECK(a.cx == doctest::Approx((c + 0.5) * 8));
          CHECK(a.cy == doctest::Approx((r + 0.5) * 8));
          CHECK(a.w * a.h == doctest::Approx(s * 16 * s * 16));
          CHECK(a.w / a.h == doctest::Approx(q));
        }
      }
    }
  }
}

TEST_CASE("anchors: count law and rejection of bad parameters") {
  for (int rows = 1; rows <= 5; ++rows) {
    for (int cols = 1; cols <= 5; ++cols) {
      AnchorGrid grid;
      grid.fm_rows = rows;
      grid.fm_cols = cols;
      CHECK(GenerateAnchors(grid).size() == grid.total());
    }
  }
  AnchorGrid bad;
  bad.fm_rows = bad.fm_cols = 2;
  bad.scales = {1.0, 0.0};
  CHECK_THROWS_AS(GenerateAnchors(bad), std::invalid_argument);
  bad.scales = {1.0};
  bad.ratios = {-1.0};
  CHECK_THROWS_AS(GenerateAnchors(bad), std::invalid_argument);
}

TEST_CASE("encode: identity and hand example") {
  const Box anchor{0, 0, 10, 10};
  CHECK(EncodeBox(anchor, anchor) == BoxDelta{});
  const BoxDelta d = EncodeBox({5, 0, 20, 10}, anchor);
  CHECK(d.tx == doctest::Approx(0.5));
  CHECK(d.ty == 0.0);
  CHECK(d.tw == doctest::Approx(std::log(2.0)));
  CHECK(d.th == 0.0);
}

TEST_CASE("decode inverts encode") {
  Rng rng(14);
  for (int i = 0; i < 500; ++i) {
    const Box g = RandomBox(rng), a = RandomBox(rng);
    const Box r = DecodeBox(EncodeBox(g, a), a);
    CHECK(std::abs(r.cx - g.cx) <= 1e-6 * std::max(1.0, std::abs(g.cx)));
    CHECK(std::abs(r.cy - g.cy) <= 1e-6 * std::max(1.0, std::abs(g.cy)));
    CHECK(std::abs(r.w - g.w) <= 1e-6 * g.w);
    CHECK(std::abs(r.h - g.h) <= 1e-6 * g.h);
  }
}

TEST_CASE("clip keeps boxes inside the tile") {
  const Box c = ClipBox({-5, 50, 20, 20}, 100, 100);
  CHECK(c.corners().x1 == 0.0);
  CHECK(c.corners().x2 == doctest::Approx(5.0));
  const Box outside = ClipBox({-50, -50, 10, 10}, 100, 100);
  CHECK(outside.valid());
}

TEST_CASE("nms: single box and identical pair") {
  const ScoredBox one{{10, 10, 5, 5}, 0.3};
  CHECK(Nms(std::vector{one}, 0.5, 10) == std::vector{one});
  const ScoredBox hi{{10, 10, 5, 5}, 0.9}, lo{{10, 10, 5, 5}, 0.8};
  CHECK(Nms(std::vector{lo, hi}, 0.5, 10) == std::vector{hi});
}

TEST_CASE("nms: max_keep caps disjoint boxes") {
  std::vector<ScoredBox> boxes;
  for (int i = 0; i < 400; ++i) boxes.push_back({{i * 10.0 + 5, 5, 8, 8}, 0.5 + i * 1e-4});
  CHECK(Nms(boxes, 0.7, 300).size() == 300);
}

TEST_CASE("nms: ties go to the earlier input") {
  const std::vector<ScoredBox> boxes{{{10, 10, 5, 5}, 0.5}, {{10.5, 10, 5, 5}, 0.5}};
  CHECK(NmsIndices(boxes, 0.5, 10) == std::vector<std::size_t>{0});
}

TEST_CASE("nms: matches the exhaustive reference on random small instances") {
  Rng rng(15);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<ScoredBox> boxes;
    const int n = 1 + static_cast<int>(rng.Below(8));
    for (int i = 0; i < n; ++i) {
      boxes.push_back({{rng.Uniform(0, 30), rng.Uniform(0, 30), rng.Uniform(4, 20), rng.Uniform(4, 20)},
                       std::round(rng.Uniform() * 10) / 10});
    }
    const double thr = rng.Uniform(0.1, 0.9);
    CHECK(NmsIndices(boxes, thr, 8) == testing::ReferenceNms(boxes, thr, 8));
  }
}

TEST_CASE("nms: kept boxes never overlap above the threshold") {
  Rng rng(16);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ScoredBox> boxes;
    for (int i = 0; i < 60; ++i) boxes.push_back({RandomBox(rng), rng.Uniform()});
    const auto kept = Nms(boxes, 0.4, 100);
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (i > 0) CHECK(kept[i - 1].score >= kept[i].score);
      for (std::size_t j = i + 1; j < kept.size(); ++j) CHECK(Iou(kept[i].box, kept[j].box) <= 0.4);
    }
  }
}

TEST_CASE("nms: rejects invalid arguments") {
  const std::vector<ScoredBox> boxes{{{1, 1, 1, 1}, 0.5}};
  CHECK_THROWS_AS(Nms(boxes, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Nms(boxes, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Nms(boxes, 0.5, 0), std::invalid_argument);
}

}  // namespace
}  // namespace xroads
