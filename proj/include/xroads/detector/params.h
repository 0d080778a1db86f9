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
#ifndef XROADS_DETECTOR_PARAMS_H_
#define XROADS_DETECTOR_PARAMS_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "xroads/detector/config.h"

namespace xroads {

struct ParamBlock {
  std::string name;
  std::vector<int> shape;
  std::vector<double> values;

  friend bool operator==(const ParamBlock&, const ParamBlock&) = default;
};

// Indices into NetworkParams::blocks for the fixed heads that follow the
// backbone. Backbone conv layer i owns blocks 2i (weights) and 2i + 1 (bias).
struct ParamLayout {
  std::vector<int> backbone_conv;  // weight block per conv layer
  int rpn_conv = 0;
  int rpn_cls = 0;
  int rpn_reg = 0;
  int head_fc = 0;
  int head_cls = 0;
  int head_reg = 0;
};

// Weights and biases of the whole detector, in a fixed order determined by
// the architecture. Every weight block is immediately followed by its bias.
struct NetworkParams {
  std::vector<ParamBlock> blocks;

  std::size_t count() const;
  double& flat(std::size_t i);
  double flat(std::size_t i) const;
  bool AllFinite() const;
  // Zero-valued blocks of the same shapes.
  NetworkParams ZerosLike() const;

  friend bool operator==(const NetworkParams&, const NetworkParams&) = default;
};

ParamLayout LayoutFor(const ArchitectureConfig& arch);

NetworkParams InitializeParams(const ArchitectureConfig& arch, std::uint64_t seed,
                               const InitConfig& init = {});

// Checks block count and shapes against the architecture.
void CheckParamsMatch(const NetworkParams& params, const ArchitectureConfig& arch);

struct Checkpoint {
  ArchitectureConfig arch;
  NetworkParams params;
};

std::string SerializeCheckpoint(const Checkpoint& ckpt);
Checkpoint ParseCheckpoint(const std::string& text);
void SaveCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace xroads

#endif  // XROADS_DETECTOR_PARAMS_H_
