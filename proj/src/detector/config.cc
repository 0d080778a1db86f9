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
#include "xroads/detector/config.h"

#include <stdexcept>

namespace xroads {

ArchitectureConfig ArchitectureConfig::Default() {
  ArchitectureConfig c;
  c.backbone = {LayerSpec::Conv(16, 3, 2), LayerSpec::Relu(),
                LayerSpec::Conv(32), LayerSpec::Relu(), LayerSpec::MaxPool(),
                LayerSpec::Conv(32), LayerSpec::Relu(), LayerSpec::MaxPool(),
                LayerSpec::Conv(32), LayerSpec::Relu()};
  c.rpn_hidden = 32;
  c.roi_size = 4;
  c.head_hidden = 64;
  return c;
}

ArchitectureConfig ArchitectureConfig::Small() {
  ArchitectureConfig c;
  c.backbone = {LayerSpec::Conv(4), LayerSpec::Relu(), LayerSpec::MaxPool(),
                LayerSpec::Conv(8), LayerSpec::Relu(), LayerSpec::MaxPool()};
  c.rpn_hidden = 8;
  c.roi_size = 2;
  c.head_hidden = 16;
  c.anchor_base_size = 8;
  return c;
}

int ArchitectureConfig::feature_channels() const {
  int channels = input_channels;
  for (const LayerSpec& l : backbone) {
    if (l.kind == LayerSpec::Kind::kConv) channels = l.out_channels;
  }
  return channels;
}

int ArchitectureConfig::total_stride() const {
  int stride = 1;
  for (const LayerSpec& l : backbone) {
    if (l.kind == LayerSpec::Kind::kConv) stride *= l.stride;
    if (l.kind == LayerSpec::Kind::kMaxPool) stride *= 2;
  }
  return stride;
}

std::pair<int, int> ArchitectureConfig::FeatureSize(int rows, int cols) const {
  for (const LayerSpec& l : backbone) {
    if (l.kind == LayerSpec::Kind::kConv) {
      const int pad = l.kernel / 2;
      rows = (rows + 2 * pad - l.kernel) / l.stride + 1;
      cols = (cols + 2 * pad - l.kernel) / l.stride + 1;
    } else if (l.kind == LayerSpec::Kind::kMaxPool) {
      rows /= 2;
      cols /= 2;
    }
  }
  return {rows, cols};
}

AnchorGrid ArchitectureConfig::Anchors(int fm_rows, int fm_cols) const {
  AnchorGrid g;
  g.fm_rows = fm_rows;
  g.fm_cols = fm_cols;
  g.stride = total_stride();
  g.base_size = anchor_base_size;
  g.scales = anchor_scales;
  g.ratios = anchor_ratios;
  return g;
}

void ArchitectureConfig::Validate() const {
  if (input_channels < 1) throw std::invalid_argument("input_channels must be positive");
  bool has_conv = false;
  for (const LayerSpec& l : backbone) {
    if (l.kind == LayerSpec::Kind::kConv) {
      has_conv = true;
      if (l.out_channels < 1 || l.kernel < 1 || l.kernel % 2 == 0 || l.stride < 1) {
        throw std::invalid_argument("conv layers need positive channels, odd kernel, positive stride");
      }
    }
  }
  if (!has_conv) throw std::invalid_argument("backbone needs at least one conv layer");
  if (rpn_hidden < 1 || roi_size < 1 || head_hidden < 1) {
    throw std::invalid_argument("rpn_hidden, roi_size and head_hidden must be positive");
  }
  if (!(anchor_base_size > 0) || anchor_scales.empty() || anchor_ratios.empty()) {
    throw std::invalid_argument("anchor base size, scales and ratios are required");
  }
  for (double s : anchor_scales) if (!(s > 0)) throw std::invalid_argument("anchor scales must be positive");
  for (double r : anchor_ratios) if (!(r > 0)) throw std::invalid_argument("anchor ratios must be positive");
}

void LossConfig::Validate() const {
  if (!(lo_threshold > 0 && lo_threshold < hi_threshold && hi_threshold < 1)) {
    throw std::invalid_argument("label thresholds must satisfy 0 < lo < hi < 1");
  }
  if (!(lambda >= 0)) throw std::invalid_argument("lambda must be non-negative");
  if (n_cls < 1 || nms_max < 1 || proposals_to_head < 1) {
    throw std::invalid_argument("n_cls, nms_max and proposals_to_head must be at least 1");
  }
  if (!(learning_rate > 0)) throw std::invalid_argument("learning rate must be positive");
  if (!(detect_threshold >= 0 && detect_threshold <= 1)) {
    throw std::invalid_argument("detect threshold must lie in [0, 1]");
  }
  if (!(nms_threshold > 0 && nms_threshold < 1)) {
    throw std::invalid_argument("nms threshold must lie in (0, 1)");
  }
  if (!(detect_nms_threshold > 0 && detect_nms_threshold < 1)) {
    throw std::invalid_argument("detection nms threshold must lie in (0, 1)");
  }
  if (!(head_lo_threshold > 0 && head_lo_threshold <= head_hi_threshold && head_hi_threshold < 1)) {
    throw std::invalid_argument("head label thresholds must satisfy 0 < lo <= hi < 1");
  }
  if (!(min_proposal_size >= 0)) throw std::invalid_argument("min proposal size must be non-negative");
  if (head_batch < 0) throw std::invalid_argument("head batch must be non-negative");
  if (!(head_positive_fraction > 0 && head_positive_fraction <= 1)) {
    throw std::invalid_argument("head positive fraction must lie in (0, 1]");
  }
}

}  // namespace xroads
