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
#include "xroads/detector/model.h"

#include <algorithm>
#include <cmath>

#include "xroads/detector/layers.h"
#include "xroads/rng.h"

namespace xroads {

namespace {

void CheckFinite(const Tensor& t, const std::string& layer) {
  for (double v : t.values) {
    if (!std::isfinite(v)) throw NumericError("non-finite activation in layer " + layer);
  }
}

std::string LayerName(const LayerSpec& l, int index) {
  switch (l.kind) {
    case LayerSpec::Kind::kConv: return "backbone[" + std::to_string(index) + "] conv";
    case LayerSpec::Kind::kRelu: return "backbone[" + std::to_string(index) + "] relu";
    case LayerSpec::Kind::kMaxPool: return "backbone[" + std::to_string(index) + "] maxpool";
  }
  return "backbone";
}

double Sigmoid(double z) {
  if (z >= 0) return 1 / (1 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1 + e);
}

}  // namespace

Tensor EncodeImage(const Image& image) {
  Tensor t(3, image.height(), image.width());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < 3; ++c) t.at(c, y, x) = (255.0 - image.at(x, y, c)) / 255.0;
    }
  }
  return t;
}

FeatureMap BackboneForward(const Tensor& input, const NetworkParams& params,
                           const ArchitectureConfig& arch, BackboneCache* cache) {
  const ParamLayout layout = LayoutFor(arch);
  if (input.channels != arch.input_channels) {
    throw std::invalid_argument("input has " + std::to_string(input.channels) +
                                " channels, architecture expects " + std::to_string(arch.input_channels));
  }
  const auto [fr, fc] = arch.FeatureSize(input.rows, input.cols);
  if (fr < 1 || fc < 1) throw std::invalid_argument("input is too small for the backbone");

  if (cache) {
    cache->inputs.clear();
    cache->pool_argmax.clear();
  }
  Tensor x = input;
  int conv_index = 0;
  for (std::size_t li = 0; li < arch.backbone.size(); ++li) {
    const LayerSpec& l = arch.backbone[li];
    if (cache) cache->inputs.push_back(x);
    switch (l.kind) {
      case LayerSpec::Kind::kConv: {
        const int wb = layout.backbone_conv[conv_index++];
        x = layers::Conv2dForward(x, params.blocks[wb].values, params.blocks[wb + 1].values,
                                  l.out_channels, l.kernel, l.stride);
        break;
      }
      case LayerSpec::Kind::kRelu:
        x = layers::ReluForward(x);
        break;
      case LayerSpec::Kind::kMaxPool: {
        std::vector<std::size_t> argmax;
        x = layers::MaxPoolForward(x, argmax);
        if (cache) cache->pool_argmax.push_back(std::move(argmax));
        break;
      }
    }
    CheckFinite(x, LayerName(l, static_cast<int>(li)));
  }
  if (cache) cache->output = x;
  return x;
}

FeatureMap BackboneForward(const Image& image, const NetworkParams& params,
                           const ArchitectureConfig& arch) {
  return BackboneForward(EncodeImage(image), params, arch);
}

RpnOutput RpnForward(const FeatureMap& fm, const NetworkParams& params, const ArchitectureConfig& arch) {
  const ParamLayout layout = LayoutFor(arch);
  const int k = arch.anchors_per_location();
  RpnOutput out;
  Tensor pre = layers::Conv2dForward(fm, params.blocks[layout.rpn_conv].values,
                                     params.blocks[layout.rpn_conv + 1].values, arch.rpn_hidden, 3, 1);
  out.hidden = layers::ReluForward(pre);
  CheckFinite(out.hidden, "rpn conv");
  const Tensor cls = layers::Conv2dForward(out.hidden, params.blocks[layout.rpn_cls].values,
                                           params.blocks[layout.rpn_cls + 1].values, k, 1, 1);
  const Tensor reg = layers::Conv2dForward(out.hidden, params.blocks[layout.rpn_reg].values,
                                           params.blocks[layout.rpn_reg + 1].values, 4 * k, 1, 1);
  CheckFinite(cls, "rpn cls");
  CheckFinite(reg, "rpn reg");

  const std::size_t n = static_cast<std::size_t>(fm.rows) * fm.cols * k;
  out.logits.resize(n);
  out.objectness.resize(n);
  out.deltas.resize(n);
  for (int r = 0; r < fm.rows; ++r) {
    for (int c = 0; c < fm.cols; ++c) {
      for (int a = 0; a < k; ++a) {
        const std::size_t idx = (static_cast<std::size_t>(r) * fm.cols + c) * k + a;
        out.logits[idx] = cls.at(a, r, c);
        out.objectness[idx] = Sigmoid(out.logits[idx]);
        out.deltas[idx] = {reg.at(4 * a, r, c), reg.at(4 * a + 1, r, c), reg.at(4 * a + 2, r, c),
                           reg.at(4 * a + 3, r, c)};
      }
    }
  }
  return out;
}

std::vector<AnchorLabel> LabelAnchors(std::span<const Box> anchors, std::span<const Box> gts,
                                      double hi_threshold, double lo_threshold) {
  if (anchors.empty()) throw std::invalid_argument("anchor labeling needs at least one anchor");
  std::vector<AnchorLabel> labels(anchors.size());
  std::vector<double> best_for_gt(gts.size(), 0.0);
  std::vector<std::size_t> best_anchor_for_gt(gts.size(), 0);

  for (std::size_t a = 0; a < anchors.size(); ++a) {
    double best = 0;
    std::optional<std::size_t> best_gt;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double iou = Iou(anchors[a], gts[g]);
      if (!best_gt || iou > best) {
        best = iou;
        best_gt = g;
      }
      if (iou > best_for_gt[g]) {
        best_for_gt[g] = iou;
        best_anchor_for_gt[g] = a;
      }
    }
    if (best_gt && best >= hi_threshold) {
      labels[a] = {LabelValue::kPositive, gts[*best_gt]};
    } else if (!best_gt || best < lo_threshold) {
      labels[a] = {LabelValue::kNegative, std::nullopt};
    }
  }
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (best_for_gt[g] <= 0) continue;
    AnchorLabel& l = labels[best_anchor_for_gt[g]];
    if (l.value != LabelValue::kPositive) l = {LabelValue::kPositive, gts[g]};
  }
  return labels;
}

std::vector<std::size_t> SampleMinibatch(std::span<const AnchorLabel> labels, int n_cls,
                                         std::uint64_t seed, double max_positive_fraction) {
  if (n_cls < 1) throw std::invalid_argument("minibatch size must be positive");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].value == LabelValue::kPositive) pos.push_back(i);
    if (labels[i].value == LabelValue::kNegative) neg.push_back(i);
  }
  if (pos.empty() && neg.empty()) {
    throw std::invalid_argument("no positive or negative anchors to sample (degenerate tile)");
  }
  Rng rng(seed);
  rng.Shuffle(pos);
  rng.Shuffle(neg);
  const std::size_t n_pos =
      std::min<std::size_t>(pos.size(), static_cast<std::size_t>(max_positive_fraction * n_cls));
  const std::size_t n_neg = std::min<std::size_t>(neg.size(), static_cast<std::size_t>(n_cls) - n_pos);
  std::vector<std::size_t> batch(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(n_pos));
  batch.insert(batch.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(n_neg));
  std::sort(batch.begin(), batch.end());
  return batch;
}

double SmoothL1(double x) {
  const double a = std::abs(x);
  return a < 1 ? 0.5 * x * x : a - 0.5;
}

LossTerms TwoStageLoss(std::span<const double> probabilities, std::span<const BoxDelta> deltas,
                       std::span<const AnchorLabel> labels, std::span<const Box> boxes,
                       std::span<const std::size_t> batch, double lambda) {
  constexpr double kEps = 1e-15;
  LossTerms terms;
  std::size_t n_cls = 0, n_reg = 0;
  for (std::size_t i : batch) {
    const AnchorLabel& l = labels[i];
    if (l.value == LabelValue::kIgnore) continue;
    const double p = std::clamp(probabilities[i], kEps, 1 - kEps);
    const bool positive = l.value == LabelValue::kPositive;
    terms.cls += positive ? (probabilities[i] >= 1 ? 0.0 : -std::log(p))
                          : (probabilities[i] <= 0 ? 0.0 : -std::log(1 - p));
    ++n_cls;
    if (positive) {
      const BoxDelta target = EncodeBox(*l.matched_gt, boxes[i]);
      for (int c = 0; c < 4; ++c) terms.reg += SmoothL1(deltas[i][c] - target[c]);
      ++n_reg;
    }
  }
  if (n_cls > 0) terms.cls /= static_cast<double>(n_cls);
  if (n_reg > 0) terms.reg /= static_cast<double>(n_reg);
  terms.combined = terms.cls + lambda * terms.reg;
  if (!std::isfinite(terms.combined)) throw NumericError("non-finite loss");
  return terms;
}

std::vector<ScoredBox> Propose(std::span<const double> objectness, std::span<const BoxDelta> deltas,
                               std::span<const Box> anchors, const LossConfig& config,
                               double tile_width, double tile_height) {
  std::vector<ScoredBox> decoded;
  decoded.reserve(anchors.size());
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    BoxDelta d = deltas[i];
    // Keep exp() bounded for wild early-training outputs.
    d.tw = std::clamp(d.tw, -10.0, 10.0);
    d.th = std::clamp(d.th, -10.0, 10.0);
    const Box box = ClipBox(DecodeBox(d, anchors[i]), tile_width, tile_height);
    if (box.w < config.min_proposal_size || box.h < config.min_proposal_size) continue;
    decoded.push_back({box, objectness[i]});
  }
  std::vector<ScoredBox> kept = Nms(decoded, config.nms_threshold, static_cast<std::size_t>(config.nms_max));
  if (kept.size() > static_cast<std::size_t>(config.proposals_to_head)) {
    kept.resize(static_cast<std::size_t>(config.proposals_to_head));
  }
  return kept;
}

Tensor RoiPool(const FeatureMap& fm, const Box& region, int out_size, double stride,
               std::vector<long>* argmax) {
  if (out_size < 1) throw std::invalid_argument("roi pool output size must be positive");
  Tensor out(fm.channels, out_size, out_size);
  if (argmax) argmax->assign(out.size(), -1);
  const Corners c = region.corners();
  const double x1 = c.x1 / stride, y1 = c.y1 / stride;
  const double bw = (c.x2 - c.x1) / stride / out_size;
  const double bh = (c.y2 - c.y1) / stride / out_size;

  for (int by = 0; by < out_size; ++by) {
    const int ys = std::clamp(static_cast<int>(std::floor(y1 + by * bh)), 0, fm.rows);
    const int ye = std::clamp(static_cast<int>(std::ceil(y1 + (by + 1) * bh)), 0, fm.rows);
    for (int bx = 0; bx < out_size; ++bx) {
      const int xs = std::clamp(static_cast<int>(std::floor(x1 + bx * bw)), 0, fm.cols);
      const int xe = std::clamp(static_cast<int>(std::ceil(x1 + (bx + 1) * bw)), 0, fm.cols);
      if (ys >= ye || xs >= xe) continue;
      for (int ch = 0; ch < fm.channels; ++ch) {
        std::size_t best = fm.index(ch, ys, xs);
        for (int y = ys; y < ye; ++y) {
          for (int x = xs; x < xe; ++x) {
            const std::size_t idx = fm.index(ch, y, x);
            if (fm.values[idx] > fm.values[best]) best = idx;
          }
        }
        const std::size_t o = out.index(ch, by, bx);
        out.values[o] = fm.values[best];
        if (argmax) (*argmax)[o] = static_cast<long>(best);
      }
    }
  }
  return out;
}

HeadOutput DetectionHeadForward(const Tensor& pooled, const NetworkParams& params,
                                const ArchitectureConfig& arch) {
  const ParamLayout layout = LayoutFor(arch);
  HeadOutput out;
  std::vector<double> hidden = layers::DenseForward(pooled.values, params.blocks[layout.head_fc].values,
                                                    params.blocks[layout.head_fc + 1].values,
                                                    arch.head_hidden);
  for (double& v : hidden) v = v > 0 ? v : 0.0;
  out.hidden = std::move(hidden);
  out.logit = layers::DenseForward(out.hidden, params.blocks[layout.head_cls].values,
                                   params.blocks[layout.head_cls + 1].values, 1)[0];
  out.probability = Sigmoid(out.logit);
  const std::vector<double> reg = layers::DenseForward(out.hidden, params.blocks[layout.head_reg].values,
                                                       params.blocks[layout.head_reg + 1].values, 4);
  out.refine = {reg[0], reg[1], reg[2], reg[3]};
  if (!std::isfinite(out.logit) || !std::isfinite(reg[0]) || !std::isfinite(reg[1]) ||
      !std::isfinite(reg[2]) || !std::isfinite(reg[3])) {
    throw NumericError("non-finite activation in detection head");
  }
  return out;
}

}  // namespace xroads
