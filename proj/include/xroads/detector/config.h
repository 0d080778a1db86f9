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
#ifndef XROADS_DETECTOR_CONFIG_H_
#define XROADS_DETECTOR_CONFIG_H_

#include <cstddef>
#include <string>
#include <vector>

#include "xroads/geometry.h"

namespace xroads {

struct LayerSpec {
  enum class Kind { kConv, kRelu, kMaxPool };
  Kind kind = Kind::kConv;
  int out_channels = 0;  // conv only
  int kernel = 3;        // conv only; padding is kernel / 2
  int stride = 1;        // conv only; max-pool is always 2x2 stride 2

  static LayerSpec Conv(int out_channels, int kernel = 3, int stride = 1) {
    return {Kind::kConv, out_channels, kernel, stride};
  }
  static LayerSpec Relu() { return {Kind::kRelu, 0, 0, 1}; }
  static LayerSpec MaxPool() { return {Kind::kMaxPool, 0, 2, 2}; }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct ArchitectureConfig {
  int input_channels = 3;
  std::vector<LayerSpec> backbone;
  int rpn_hidden = 32;
  int roi_size = 4;
  int head_hidden = 64;
  double anchor_base_size = 16;
  std::vector<double> anchor_scales{0.25, 0.5, 1.0, 2.0};
  std::vector<double> anchor_ratios{0.5, 1.0, 2.0};

  // 4 conv(3x3)+ReLU blocks: a stride-2 first conv and two 2x2 max-pools
  // give a total stride of 8.
  static ArchitectureConfig Default();
  // A few thousand parameters; used for gradient checks.
  static ArchitectureConfig Small();

  int feature_channels() const;
  int total_stride() const;
  int anchors_per_location() const {
    return static_cast<int>(anchor_scales.size() * anchor_ratios.size());
  }
  // Spatial size of the feature map for an input of the given size.
  std::pair<int, int> FeatureSize(int rows, int cols) const;
  AnchorGrid Anchors(int fm_rows, int fm_cols) const;
  // Throws std::invalid_argument on inconsistent settings.
  void Validate() const;

  friend bool operator==(const ArchitectureConfig&, const ArchitectureConfig&) = default;
};

struct LossConfig {
  double lambda = 1.0;
  int n_cls = 256;
  double hi_threshold = 0.7;
  double lo_threshold = 0.1;
  double learning_rate = 0.003;
  int nms_max = 300;
  int proposals_to_head = 100;
  double detect_threshold = 0.5;
  double nms_threshold = 0.7;
  // Suppression threshold of the final detections; defaults to the proposal
  // threshold.
  double detect_nms_threshold = 0.7;
  // Proposals smaller than this many pixels on either side are discarded
  // before suppression. 0 keeps everything.
  double min_proposal_size = 0;
  // Detection-head minibatch. 0 classifies every labeled proposal; otherwise
  // up to head_positive_fraction * head_batch positives are sampled and
  // negatives fill the rest.
  int head_batch = 0;
  // Proposal labels for the detection head. Equal values leave no ignored
  // band, so every near miss becomes a negative.
  double head_hi_threshold = 0.7;
  double head_lo_threshold = 0.1;
  double head_positive_fraction = 0.25;

  void Validate() const;
};

// Weight initialization. Biases always start at zero.
enum class InitScheme {
  kUniform,    // U(-range, range)
  kHeUniform,  // U(-b, b) with b = sqrt(6 / fan_in)
};

struct InitConfig {
  InitScheme scheme = InitScheme::kUniform;
  double range = 0.05;
};

struct DetectorConfig {
  ArchitectureConfig arch = ArchitectureConfig::Default();
  LossConfig loss;
  InitConfig init;
};

}  // namespace xroads

#endif  // XROADS_DETECTOR_CONFIG_H_
