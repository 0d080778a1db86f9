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
#include "xroads/detector/training.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "xroads/detector/layers.h"
#include "xroads/rng.h"
#include "xroads/text_io.h"

namespace xroads {

namespace {

// softplus(z) - y z, the logistic log loss written on the logit.
double LogisticLoss(double z, bool positive) {
  const double softplus = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
  return positive ? softplus - z : softplus;
}

double SigmoidOf(double z) {
  if (z >= 0) return 1 / (1 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1 + e);
}

double SmoothL1Grad(double x) {
  if (x >= 1) return 1;
  if (x <= -1) return -1;
  return x;
}

struct ForwardState {
  BackboneCache backbone;
  RpnOutput rpn;
};

ForwardState RunForward(const NetworkParams& params, const ArchitectureConfig& arch, const Tensor& input) {
  ForwardState s;
  BackboneForward(input, params, arch, &s.backbone);
  s.rpn = RpnForward(s.backbone.output, params, arch);
  return s;
}

LossBreakdown LossAndBackward(const NetworkParams& params, const DetectorConfig& config,
                              const TrainingSample& sample, const ForwardState& state,
                              const StepPlan& plan, NetworkParams* grads) {
  const ArchitectureConfig& arch = config.arch;
  const double lambda = config.loss.lambda;
  const ParamLayout layout = LayoutFor(arch);
  const FeatureMap& fm = state.backbone.output;
  const RpnOutput& rpn = state.rpn;
  const int k = arch.anchors_per_location();
  LossBreakdown out;

  // Proposal network terms.
  Tensor g_cls, g_reg;
  if (grads) {
    g_cls = Tensor(k, fm.rows, fm.cols);
    g_reg = Tensor(4 * k, fm.rows, fm.cols);
  }
  {
    std::size_t n_cls = 0, n_reg = 0;
    for (std::size_t i : plan.rpn_batch) {
      const LabelValue v = sample.anchor_labels[i].value;
      if (v == LabelValue::kIgnore) continue;
      ++n_cls;
      if (v == LabelValue::kPositive) ++n_reg;
    }
    for (std::size_t i : plan.rpn_batch) {
      const AnchorLabel& l = sample.anchor_labels[i];
      if (l.value == LabelValue::kIgnore) continue;
      const bool positive = l.value == LabelValue::kPositive;
      const double z = rpn.logits[i];
      out.rpn_cls += LogisticLoss(z, positive) / static_cast<double>(n_cls);
      const int a = static_cast<int>(i % static_cast<std::size_t>(k));
      const int cell = static_cast<int>(i / static_cast<std::size_t>(k));
      const int r = cell / fm.cols, c = cell % fm.cols;
      if (grads) g_cls.at(a, r, c) += (SigmoidOf(z) - (positive ? 1.0 : 0.0)) / static_cast<double>(n_cls);
      if (positive) {
        const BoxDelta target = EncodeBox(*l.matched_gt, sample.anchors[i]);
        for (int j = 0; j < 4; ++j) {
          const double diff = rpn.deltas[i][j] - target[j];
          out.rpn_reg += SmoothL1(diff) / static_cast<double>(n_reg);
          if (grads) g_reg.at(4 * a + j, r, c) += lambda * SmoothL1Grad(diff) / static_cast<double>(n_reg);
        }
      }
    }
  }

  // Detection head terms.
  Tensor g_fm;
  if (grads) g_fm = Tensor(fm.channels, fm.rows, fm.cols);
  {
    std::size_t n_cls = 0, n_reg = 0;
    for (std::size_t j : plan.head_batch) {
      const LabelValue v = plan.proposal_labels[j].value;
      if (v == LabelValue::kIgnore) continue;
      ++n_cls;
      if (v == LabelValue::kPositive) ++n_reg;
    }
    const double stride = arch.total_stride();
    std::vector<long> argmax;
    for (std::size_t j : plan.head_batch) {
      const AnchorLabel& l = plan.proposal_labels[j];
      if (l.value == LabelValue::kIgnore) continue;
      const bool positive = l.value == LabelValue::kPositive;
      const Tensor pooled = RoiPool(fm, plan.proposals[j], arch.roi_size, stride, grads ? &argmax : nullptr);
      const HeadOutput head = DetectionHeadForward(pooled, params, arch);
      out.det_cls += LogisticLoss(head.logit, positive) / static_cast<double>(n_cls);
      double g_logit = 0;
      double g_refine[4] = {0, 0, 0, 0};
      if (grads) g_logit = (head.probability - (positive ? 1.0 : 0.0)) / static_cast<double>(n_cls);
      if (positive) {
        const BoxDelta target = EncodeBox(*l.matched_gt, plan.proposals[j]);
        for (int c = 0; c < 4; ++c) {
          const double diff = head.refine[c] - target[c];
          out.det_reg += SmoothL1(diff) / static_cast<double>(n_reg);
          g_refine[c] = lambda * SmoothL1Grad(diff) / static_cast<double>(n_reg);
        }
      }
      if (!grads) continue;

      std::vector<double> g_hidden =
          layers::DenseBackward(head.hidden, std::span<const double>(&g_logit, 1),
                                params.blocks[layout.head_cls].values, grads->blocks[layout.head_cls].values,
                                grads->blocks[layout.head_cls + 1].values);
      if (positive) {
        const std::vector<double> g_h2 =
            layers::DenseBackward(head.hidden, g_refine, params.blocks[layout.head_reg].values,
                                  grads->blocks[layout.head_reg].values,
                                  grads->blocks[layout.head_reg + 1].values);
        for (std::size_t h = 0; h < g_hidden.size(); ++h) g_hidden[h] += g_h2[h];
      }
      for (std::size_t h = 0; h < g_hidden.size(); ++h) {
        if (!(head.hidden[h] > 0)) g_hidden[h] = 0;
      }
      const std::vector<double> g_pooled =
          layers::DenseBackward(pooled.values, g_hidden, params.blocks[layout.head_fc].values,
                                grads->blocks[layout.head_fc].values, grads->blocks[layout.head_fc + 1].values);
      for (std::size_t p = 0; p < g_pooled.size(); ++p) {
        if (argmax[p] >= 0) g_fm.values[static_cast<std::size_t>(argmax[p])] += g_pooled[p];
      }
    }
  }
  out.total = out.rpn_cls + lambda * out.rpn_reg + out.det_cls + lambda * out.det_reg;
  if (!std::isfinite(out.total)) throw NumericError("non-finite loss");
  if (!grads) return out;

  // Proposal network backward.
  const Tensor& hidden = rpn.hidden;
  Tensor g_hidden = layers::Conv2dBackward(hidden, g_cls, params.blocks[layout.rpn_cls].values,
                                           grads->blocks[layout.rpn_cls].values,
                                           grads->blocks[layout.rpn_cls + 1].values, 1, 1);
  const Tensor g_hidden_reg = layers::Conv2dBackward(hidden, g_reg, params.blocks[layout.rpn_reg].values,
                                                     grads->blocks[layout.rpn_reg].values,
                                                     grads->blocks[layout.rpn_reg + 1].values, 1, 1);
  for (std::size_t i = 0; i < g_hidden.values.size(); ++i) g_hidden.values[i] += g_hidden_reg.values[i];
  g_hidden = layers::ReluBackward(hidden, g_hidden);
  const Tensor g_fm_rpn = layers::Conv2dBackward(fm, g_hidden, params.blocks[layout.rpn_conv].values,
                                                 grads->blocks[layout.rpn_conv].values,
                                                 grads->blocks[layout.rpn_conv + 1].values, 3, 1);
  for (std::size_t i = 0; i < g_fm.values.size(); ++i) g_fm.values[i] += g_fm_rpn.values[i];

  // Backbone backward.
  Tensor g = std::move(g_fm);
  int conv_index = static_cast<int>(layout.backbone_conv.size());
  int pool_index = static_cast<int>(state.backbone.pool_argmax.size());
  for (int li = static_cast<int>(arch.backbone.size()) - 1; li >= 0; --li) {
    const LayerSpec& l = arch.backbone[li];
    const Tensor& in = state.backbone.inputs[li];
    switch (l.kind) {
      case LayerSpec::Kind::kConv: {
        const int wb = layout.backbone_conv[--conv_index];
        g = layers::Conv2dBackward(in, g, params.blocks[wb].values, grads->blocks[wb].values,
                                   grads->blocks[wb + 1].values, l.kernel, l.stride, li > 0);
        break;
      }
      case LayerSpec::Kind::kRelu: {
        const Tensor& relu_out = li + 1 < static_cast<int>(arch.backbone.size())
                                     ? state.backbone.inputs[li + 1] : state.backbone.output;
        g = layers::ReluBackward(relu_out, g);
        break;
      }
      case LayerSpec::Kind::kMaxPool:
        g = layers::MaxPoolBackward(in, g, state.backbone.pool_argmax[--pool_index]);
        break;
    }
    if (li == 0) break;
  }
  return out;
}

}  // namespace

TrainingSample PrepareSample(const AnnotatedTile& tile, const DetectorConfig& config) {
  TrainingSample s;
  s.input = EncodeImage(tile.tile.image);
  s.gts = tile.ground_truths;
  s.width = tile.tile.width();
  s.height = tile.tile.height();
  const auto [fr, fc] = config.arch.FeatureSize(tile.tile.height(), tile.tile.width());
  if (fr < 1 || fc < 1) throw std::invalid_argument("tile '" + tile.tile.id + "' is too small for the backbone");
  s.anchors = GenerateAnchors(config.arch.Anchors(fr, fc));
  s.anchor_labels = LabelAnchors(s.anchors, s.gts, config.loss.hi_threshold, config.loss.lo_threshold);
  return s;
}

StepPlan MakeStepPlan(const TrainingSample& sample, const RpnOutput& rpn, const DetectorConfig& config,
                      std::uint64_t minibatch_seed) {
  StepPlan plan;
  plan.rpn_batch = SampleMinibatch(sample.anchor_labels, config.loss.n_cls, minibatch_seed);
  for (const ScoredBox& p : Propose(rpn.objectness, rpn.deltas, sample.anchors, config.loss, sample.width,
                                    sample.height)) {
    plan.proposals.push_back(p.box);
  }
  plan.proposals.insert(plan.proposals.end(), sample.gts.begin(), sample.gts.end());
  plan.proposal_labels = LabelAnchors(plan.proposals, sample.gts, config.loss.head_hi_threshold,
                                      config.loss.head_lo_threshold);
  const int head_n = config.loss.head_batch;
  if (head_n == 0) {
    for (std::size_t j = 0; j < plan.proposal_labels.size(); ++j) {
      if (plan.proposal_labels[j].value != LabelValue::kIgnore) plan.head_batch.push_back(j);
    }
  } else {
    plan.head_batch = SampleMinibatch(plan.proposal_labels, head_n, MixSeed(minibatch_seed),
                                      config.loss.head_positive_fraction);
  }
  return plan;
}

StepPlan MakeStepPlan(const TrainingSample& sample, const NetworkParams& params,
                      const DetectorConfig& config, std::uint64_t minibatch_seed) {
  const ForwardState state = RunForward(params, config.arch, sample.input);
  return MakeStepPlan(sample, state.rpn, config, minibatch_seed);
}

LossBreakdown EvaluateLoss(const NetworkParams& params, const DetectorConfig& config,
                           const TrainingSample& sample, const StepPlan& plan, NetworkParams* grads) {
  const ForwardState state = RunForward(params, config.arch, sample.input);
  return LossAndBackward(params, config, sample, state, plan, grads);
}

TrainResult Train(std::span<const AnnotatedTile> train_set, const DetectorConfig& config,
                  const TrainOptions& options) {
  if (train_set.empty()) throw std::invalid_argument("training set is empty");
  config.arch.Validate();
  config.loss.Validate();

  TrainResult result;
  result.params = options.initial ? *options.initial : InitializeParams(config.arch, options.seed, config.init);
  CheckParamsMatch(result.params, config.arch);
  if (options.steps == 0) return result;

  std::vector<TrainingSample> samples;
  samples.reserve(train_set.size());
  for (const AnnotatedTile& t : train_set) samples.push_back(PrepareSample(t, config));

  std::vector<std::size_t> order(samples.size());
  NetworkParams grads = result.params.ZerosLike();
  const double lr = config.loss.learning_rate;
  result.trace.reserve(options.steps);

  for (std::size_t step = 0; step < options.steps; ++step) {
    const std::size_t pos = step % samples.size();
    if (pos == 0) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      Rng(DeriveSeed(options.seed, "epoch", step / samples.size())).Shuffle(order);
    }
    const TrainingSample& sample = samples[order[pos]];
    for (ParamBlock& b : grads.blocks) std::fill(b.values.begin(), b.values.end(), 0.0);

    LossBreakdown loss;
    try {
      const ForwardState state = RunForward(result.params, config.arch, sample.input);
      const StepPlan plan = MakeStepPlan(sample, state.rpn, config, DeriveSeed(options.seed, "minibatch", step));
      loss = LossAndBackward(result.params, config, sample, state, plan, &grads);
    } catch (const NumericError& e) {
      throw TrainingDivergedError(step, e.what());
    }

    for (std::size_t b = 0; b < grads.blocks.size(); ++b) {
      std::vector<double>& w = result.params.blocks[b].values;
      const std::vector<double>& g = grads.blocks[b].values;
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * g[i];
    }
    if (!result.params.AllFinite()) throw TrainingDivergedError(step, "non-finite parameters after update");

    TrainRecord rec{step, loss.rpn_cls, loss.rpn_reg, loss.det_cls, loss.det_reg, loss.total};
    result.trace.push_back(rec);
    if (options.on_step) options.on_step(rec);
  }
  return result;
}

std::vector<ScoredBox> Detect(const Image& image, const NetworkParams& params, const DetectorConfig& config) {
  const ArchitectureConfig& arch = config.arch;
  const Tensor input = EncodeImage(image);
  const FeatureMap fm = BackboneForward(input, params, arch);
  const RpnOutput rpn = RpnForward(fm, params, arch);
  const std::vector<Box> anchors = GenerateAnchors(arch.Anchors(fm.rows, fm.cols));
  const double w = image.width(), h = image.height();
  const std::vector<ScoredBox> proposals = Propose(rpn.objectness, rpn.deltas, anchors, config.loss, w, h);

  std::vector<ScoredBox> candidates;
  const double stride = arch.total_stride();
  for (const ScoredBox& p : proposals) {
    const HeadOutput head = DetectionHeadForward(RoiPool(fm, p.box, arch.roi_size, stride), params, arch);
    if (head.probability < config.loss.detect_threshold) continue;
    BoxDelta d = head.refine;
    d.tw = std::clamp(d.tw, -10.0, 10.0);
    d.th = std::clamp(d.th, -10.0, 10.0);
    candidates.push_back({ClipBox(DecodeBox(d, p.box), w, h), head.probability});
  }
  return Nms(candidates, config.loss.detect_nms_threshold, std::max<std::size_t>(candidates.size(), 1));
}

GradientCheckResult GradientCheck(const NetworkParams& params, const DetectorConfig& config,
                                  const TrainingSample& sample, const StepPlan& plan, double epsilon,
                                  std::size_t num_params, std::uint64_t seed, double floor) {
  NetworkParams grads = params.ZerosLike();
  EvaluateLoss(params, config, sample, plan, &grads);

  GradientCheckResult result;
  Rng rng(seed);
  NetworkParams probe = params;
  const std::size_t total = params.count();
  for (std::size_t n = 0; n < num_params; ++n) {
    const std::size_t idx = rng.Below(total);
    const double original = probe.flat(idx);
    probe.flat(idx) = original + epsilon;
    const double up = EvaluateLoss(probe, config, sample, plan).total;
    probe.flat(idx) = original - epsilon;
    const double down = EvaluateLoss(probe, config, sample, plan).total;
    probe.flat(idx) = original;

    const double numeric = (up - down) / (2 * epsilon);
    const double analytic = grads.flat(idx);
    const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
    ++result.checked;
    if (rel > result.max_relative_error || n == 0) {
      result.max_relative_error = rel;
      result.worst_index = idx;
      result.worst_analytic = analytic;
      result.worst_numeric = numeric;
    }
  }
  return result;
}

std::string TrainTraceCsv(const TrainTrace& trace) {
  std::string out = "step,rpn_cls,rpn_reg,det_cls,det_reg,total\n";
  for (const TrainRecord& r : trace) {
    out += std::to_string(r.step) + "," + FormatDouble(r.rpn_cls) + "," + FormatDouble(r.rpn_reg) + "," +
           FormatDouble(r.det_cls) + "," + FormatDouble(r.det_reg) + "," + FormatDouble(r.total) + "\n";
  }
  return out;
}

TrainTrace ParseTrainTraceCsv(const std::string& text) {
  const CsvTable t = ParseCsv(text);
  const std::size_t s = t.Column("step"), a = t.Column("rpn_cls"), b = t.Column("rpn_reg"),
                    c = t.Column("det_cls"), d = t.Column("det_reg"), e = t.Column("total");
  TrainTrace trace;
  for (const auto& row : t.rows) {
    trace.push_back({static_cast<std::size_t>(ParseInt(row[s])), ParseDouble(row[a]), ParseDouble(row[b]),
                     ParseDouble(row[c]), ParseDouble(row[d]), ParseDouble(row[e])});
  }
  return trace;
}

std::vector<double> SmoothEma(std::span<const double> values, double factor) {
  std::vector<double> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.push_back(i == 0 ? values[0] : factor * out.back() + (1 - factor) * values[i]);
  }
  return out;
}

}  // namespace xroads
