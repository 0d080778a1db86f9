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
#ifndef XROADS_AUGMENT_H_
#define XROADS_AUGMENT_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "xroads/image.h"

namespace xroads {

enum class Transform { kFlipH, kFlipV, kRotate, kBlur, kDownscale };

inline constexpr int kTransformCount = 5;
std::string_view TransformName(Transform t);

// Blur sigma range used when sampling random augmentations.
inline constexpr double kBlurSigmaMin = 0.5;
inline constexpr double kBlurSigmaMax = 2.0;
inline constexpr double kDownscaleMin = 3.0;
inline constexpr double kDownscaleMax = 5.0;

AnnotatedTile FlipHorizontal(const AnnotatedTile& t);
AnnotatedTile FlipVertical(const AnnotatedTile& t);

// Rotates about the tile center by theta degrees. The canvas grows to hold
// every source pixel and new area is filled white; each box becomes the
// axis-aligned hull of its rotated corners. A point (x, y) maps to (y, W - x)
// at 90 degrees on a square tile.
AnnotatedTile Rotate(const AnnotatedTile& t, double theta_degrees);

// Normalized 1-D Gaussian weights over [-ceil(3 sigma), ceil(3 sigma)].
std::vector<double> GaussianKernel(double sigma);
Image GaussianBlurImage(const Image& image, double sigma);
AnnotatedTile GaussianBlur(const AnnotatedTile& t, double sigma);

// Area-average resampling to round(W / factor) x round(H / factor). Throws
// std::invalid_argument for factors outside [3, 5] or results under 8 px.
AnnotatedTile Downscale(const AnnotatedTile& t, double factor);

// Keeps the originals first, then appends target_count - |items| synthetic
// tiles. Synthetic tile i draws its source, transform and parameters from its
// own stream derived from (seed, i).
std::vector<AnnotatedTile> AugmentDataset(std::span<const AnnotatedTile> items,
                                          std::size_t target_count, std::uint64_t seed);

}  // namespace xroads

#endif  // XROADS_AUGMENT_H_
