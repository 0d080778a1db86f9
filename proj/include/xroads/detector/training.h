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
#ifndef XROADS_DETECTOR_TRAINING_H_
#define XROADS_DETECTOR_TRAINING_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "xroads/detector/config.h"
#include "xroads/detector/model.h"
#include "xroads/detector/params.h"
#include "xroads/image.h"

namespace xroads {

// A tile prepared for training: encoded input, anchors and their labels.
// Labels depend only on geometry, so they are computed once per tile.
struct TrainingSample {
  Tensor input;
  std::vector<Box> gts;
  double width = 0;
  double height = 0;
  std::vector<Box> anchors;
  std::vector<AnchorLabel> anchor_labels;
};

TrainingSample PrepareSample(const AnnotatedTile& tile, const DetectorConfig& config);

// The discrete choices of one step. Holding them fixed makes the loss a
// smooth (piecewise) function of the parameters, which is what the gradient
// check differentiates; proposal boxes are treated as constants.
struct StepPlan {
  std::vector<std::size_t> rpn_batch;
  std::vector<Box> proposals;  // RPN proposals followed by the ground truths
  std::vector<AnchorLabel> proposal_labels;
  std::vector<std::size_t> head_batch;
};

struct LossBreakdown {
  double rpn_cls = 0;
  double rpn_reg = 0;
  double det_cls = 0;
  double det_reg = 0;
  double total = 0;  // rpn_cls + lambda rpn_reg + det_cls + lambda det_reg
};

StepPlan MakeStepPlan(const TrainingSample& sample, const RpnOutput& rpn, const DetectorConfig& config,
                      std::uint64_t minibatch_seed);
StepPlan MakeStepPlan(const TrainingSample& sample, const NetworkParams& params,
                      const DetectorConfig& config, std::uint64_t minibatch_seed);

// Full forward pass and, when grads is non-null, backprop of the total loss
// into grads (accumulated).
LossBreakdown EvaluateLoss(const NetworkParams& params, const DetectorConfig& config,
                           const TrainingSample& sample, const StepPlan& plan,
                           NetworkParams* grads = nullptr);

class TrainingDivergedError : public std::runtime_error {
 public:
  TrainingDivergedError(std::size_t step, const std::string& what)
      : std::runtime_error("training diverged at step " + std::to_string(step) + ": " + what),
        step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

struct TrainRecord {
  std::size_t step = 0;
  double rpn_cls = 0, rpn_reg = 0, det_cls = 0, det_reg = 0, total = 0;
};

using TrainTrace = std::vector<TrainRecord>;

struct TrainResult {
  NetworkParams params;
  TrainTrace trace;
};

struct TrainOptions {
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  // Starting point; freshly initialized from seed when absent.
  std::optional<NetworkParams> initial;
  // Called after every step with (step, record).
  std::function<void(const TrainRecord&)> on_step;
};

// One tile per step, visited in a per-epoch seeded shuffle; plain SGD.
TrainResult Train(std::span<const AnnotatedTile> train_set, const DetectorConfig& config,
                  const TrainOptions& options);

// Proposals -> head -> refined, clipped boxes with probability >= threshold
// -> suppression -> sorted by probability.
std::vector<ScoredBox> Detect(const Image& image, const NetworkParams& params, const DetectorConfig& config);

struct GradientCheckResult {
  double max_relative_error = 0;
  std::size_t checked = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0;
  double worst_numeric = 0;
};

// Central differences on num_params randomly drawn parameters. The relative
// error is |a - n| / max(|a|, |n|, floor).
GradientCheckResult GradientCheck(const NetworkParams& params, const DetectorConfig& config,
                                  const TrainingSample& sample, const StepPlan& plan, double epsilon,
                                  std::size_t num_params, std::uint64_t seed, double floor = 1e-6);

// step,rpn_cls,rpn_reg,det_cls,det_reg,total
std::string TrainTraceCsv(const TrainTrace& trace);
TrainTrace ParseTrainTraceCsv(const std::string& text);

// s_0 = x_0, s_t = factor * s_{t-1} + (1 - factor) * x_t.
std::vector<double> SmoothEma(std::span<const double> values, double factor);

}  // namespace xroads

#endif  // XROADS_DETECTOR_TRAINING_H_
