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
#ifndef XROADS_IMAGE_H_
#define XROADS_IMAGE_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "xroads/geometry.h"

namespace xroads {

using Rgb = std::array<std::uint8_t, 3>;

// 8-bit RGB raster, row-major, interleaved channels.
class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgb fill = {255, 255, 255});

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }

  std::uint8_t& at(int x, int y, int c) { return data_[Offset(x, y) + c]; }
  std::uint8_t at(int x, int y, int c) const { return data_[Offset(x, y) + c]; }
  Rgb pixel(int x, int y) const {
    const std::size_t o = Offset(x, y);
    return {data_[o], data_[o + 1], data_[o + 2]};
  }
  void set_pixel(int x, int y, Rgb v) {
    const std::size_t o = Offset(x, y);
    data_[o] = v[0];
    data_[o + 1] = v[1];
    data_[o + 2] = v[2];
  }

  const std::vector<std::uint8_t>& data() const { return data_; }
  std::vector<std::uint8_t>& data() { return data_; }

  // ITU-R BT.601 luminance, row-major, one value per pixel in [0, 255].
  std::vector<double> Grayscale() const;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t Offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

inline constexpr int kMinTileSide = 8;

struct Tile {
  std::string id;
  Image image;

  int width() const { return image.width(); }
  int height() const { return image.height(); }
  friend bool operator==(const Tile&, const Tile&) = default;
};

struct AnnotatedTile {
  Tile tile;
  std::vector<Box> ground_truths;

  friend bool operator==(const AnnotatedTile&, const AnnotatedTile&) = default;
};

// Throws std::invalid_argument when the tile is smaller than kMinTileSide
// or a ground truth is degenerate or lies fully outside the tile.
void ValidateAnnotatedTile(const AnnotatedTile& t);

// PNG codec. Alpha and 16-bit depth are reduced to 8-bit RGB on read.
Image ReadPng(const std::filesystem::path& path);
void WritePng(const Image& image, const std::filesystem::path& path);

}  // namespace xroads

#endif  // XROADS_IMAGE_H_
