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
#ifndef XROADS_DETECTOR_MODEL_H_
#define XROADS_DETECTOR_MODEL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "xroads/detector/config.h"
#include "xroads/detector/params.h"
#include "xroads/detector/tensor.h"
#include "xroads/geometry.h"
#include "xroads/image.h"

namespace xroads {

// Raised when an activation or loss stops being finite.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Network input: one channel per RGB component holding ink density
// (255 - value) / 255, so white paper is 0.
Tensor EncodeImage(const Image& image);

// Intermediate values of one backbone + RPN pass, kept for backprop.
struct BackboneCache {
  std::vector<Tensor> inputs;  // input to each backbone layer
  std::vector<std::vector<std::size_t>> pool_argmax;
  Tensor output;
};

FeatureMap BackboneForward(const Tensor& input, const NetworkParams& params,
                           const ArchitectureConfig& arch, BackboneCache* cache = nullptr);
FeatureMap BackboneForward(const Image& image, const NetworkParams& params,
                           const ArchitectureConfig& arch);

struct RpnOutput {
  std::vector<double> logits;       // one per anchor
  std::vector<double> objectness;   // sigmoid(logits)
  std::vector<BoxDelta> deltas;     // one per anchor
  Tensor hidden;                    // post-ReLU shared intermediate
};

// Anchor index (row * cols + col) * k + a reads channel a of the
// classification map and channels 4a..4a+3 of the regression map.
RpnOutput RpnForward(const FeatureMap& fm, const NetworkParams& params, const ArchitectureConfig& arch);

enum class LabelValue { kNegative, kIgnore, kPositive };

struct AnchorLabel {
  LabelValue value = LabelValue::kIgnore;
  std::optional<Box> matched_gt;
};

// IoU >= hi with some gt: positive, matched to the best gt. IoU < lo with
// every gt: negative. Otherwise ignored. Each gt also forces its best anchor
// (lowest index on ties) positive.
std::vector<AnchorLabel> LabelAnchors(std::span<const Box> anchors, std::span<const Box> gts,
                                      double hi_threshold, double lo_threshold);

// Up to floor(max_positive_fraction * n_cls) positives, negatives fill the
// rest; indices come back sorted. Throws std::invalid_argument when nothing
// is labeled.
std::vector<std::size_t> SampleMinibatch(std::span<const AnchorLabel> labels, int n_cls,
                                         std::uint64_t seed, double max_positive_fraction = 0.5);

struct LossTerms {
  double cls = 0;
  double reg = 0;
  double combined = 0;
};

// Mean binary log loss over the batch plus lambda times the mean smooth-L1
// (summed over the four offsets) over the positive entries of the batch.
// boxes[i] is the reference box (anchor or proposal) of entry i.
LossTerms TwoStageLoss(std::span<const double> probabilities, std::span<const BoxDelta> deltas,
                       std::span<const AnchorLabel> labels, std::span<const Box> boxes,
                       std::span<const std::size_t> batch, double lambda);

inline LossTerms RpnLoss(std::span<const double> objectness, std::span<const BoxDelta> deltas,
                         std::span<const AnchorLabel> labels, std::span<const Box> anchors,
                         std::span<const std::size_t> batch, double lambda) {
  return TwoStageLoss(objectness, deltas, labels, anchors, batch, lambda);
}

inline LossTerms DetectionLoss(std::span<const double> probabilities, std::span<const BoxDelta> refine,
                               std::span<const AnchorLabel> labels, std::span<const Box> proposals,
                               std::span<const std::size_t> batch, double lambda) {
  return TwoStageLoss(probabilities, refine, labels, proposals, batch, lambda);
}

double SmoothL1(double x);

// Decode every anchor, clip to the tile, drop boxes narrower or shorter than
// min_proposal_size, suppress at nms_threshold keeping at most nms_max, then
// keep the proposals_to_head best.
std::vector<ScoredBox> Propose(std::span<const double> objectness, std::span<const BoxDelta> deltas,
                               std::span<const Box> anchors, const LossConfig& config,
                               double tile_width, double tile_height);

// Max pooling of the feature map inside region (pixel coordinates divided by
// stride) over out_size x out_size bins. Empty bins give 0 and an argmax of
// -1. argmax holds flat feature-map indices, channel-major like the output.
Tensor RoiPool(const FeatureMap& fm, const Box& region, int out_size, double stride,
               std::vector<long>* argmax = nullptr);

struct HeadOutput {
  double logit = 0;
  double probability = 0.5;
  BoxDelta refine;
  std::vector<double> hidden;  // post-ReLU
};

HeadOutput DetectionHeadForward(const Tensor& pooled, const NetworkParams& params,
                                const ArchitectureConfig& arch);

}  // namespace xroads

#endif  // XROADS_DETECTOR_MODEL_H_
