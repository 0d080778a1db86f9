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
#include "xroads/detector/params.h"

#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "xroads/rng.h"
#include "xroads/text_io.h"

namespace xroads {

using nlohmann::json;

std::size_t NetworkParams::count() const {
  std::size_t n = 0;
  for (const ParamBlock& b : blocks) n += b.values.size();
  return n;
}

double& NetworkParams::flat(std::size_t i) {
  for (ParamBlock& b : blocks) {
    if (i < b.values.size()) return b.values[i];
    i -= b.values.size();
  }
  throw std::out_of_range("flat parameter index out of range");
}

double NetworkParams::flat(std::size_t i) const {
  return const_cast<NetworkParams*>(this)->flat(i);
}

bool NetworkParams::AllFinite() const {
  for (const ParamBlock& b : blocks) {
    for (double v : b.values) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

NetworkParams NetworkParams::ZerosLike() const {
  NetworkParams z;
  z.blocks.reserve(blocks.size());
  for (const ParamBlock& b : blocks) {
    z.blocks.push_back({b.name, b.shape, std::vector<double>(b.values.size(), 0.0)});
  }
  return z;
}

namespace {

struct BlockShape {
  std::string name;
  std::vector<int> shape;
  bool is_bias;
};

std::vector<BlockShape> ShapesFor(const ArchitectureConfig& arch) {
  arch.Validate();
  std::vector<BlockShape> shapes;
  int in = arch.input_channels;
  int conv_index = 0;
  for (const LayerSpec& l : arch.backbone) {
    if (l.kind != LayerSpec::Kind::kConv) continue;
    const std::string name = "backbone.conv" + std::to_string(conv_index++);
    shapes.push_back({name + ".weight", {l.out_channels, in, l.kernel, l.kernel}, false});
    shapes.push_back({name + ".bias", {l.out_channels}, true});
    in = l.out_channels;
  }
  const int k = arch.anchors_per_location();
  const int r = arch.rpn_hidden;
  shapes.push_back({"rpn.conv.weight", {r, in, 3, 3}, false});
  shapes.push_back({"rpn.conv.bias", {r}, true});
  shapes.push_back({"rpn.cls.weight", {k, r, 1, 1}, false});
  shapes.push_back({"rpn.cls.bias", {k}, true});
  shapes.push_back({"rpn.reg.weight", {4 * k, r, 1, 1}, false});
  shapes.push_back({"rpn.reg.bias", {4 * k}, true});
  const int pooled = in * arch.roi_size * arch.roi_size;
  shapes.push_back({"head.fc.weight", {arch.head_hidden, pooled}, false});
  shapes.push_back({"head.fc.bias", {arch.head_hidden}, true});
  shapes.push_back({"head.cls.weight", {1, arch.head_hidden}, false});
  shapes.push_back({"head.cls.bias", {1}, true});
  shapes.push_back({"head.reg.weight", {4, arch.head_hidden}, false});
  shapes.push_back({"head.reg.bias", {4}, true});
  return shapes;
}

std::size_t Product(const std::vector<int>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); });
}

json LayerToJson(const LayerSpec& l) {
  switch (l.kind) {
    case LayerSpec::Kind::kConv:
      return {{"type", "conv"}, {"out_channels", l.out_channels}, {"kernel", l.kernel}, {"stride", l.stride}};
    case LayerSpec::Kind::kRelu: return {{"type", "relu"}};
    case LayerSpec::Kind::kMaxPool: return {{"type", "maxpool"}};
  }
  return {};
}

LayerSpec LayerFromJson(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "conv") {
    return LayerSpec::Conv(j.at("out_channels").get<int>(), j.at("kernel").get<int>(),
                           j.at("stride").get<int>());
  }
  if (type == "relu") return LayerSpec::Relu();
  if (type == "maxpool") return LayerSpec::MaxPool();
  throw std::runtime_error("unknown layer type '" + type + "'");
}

}  // namespace

ParamLayout LayoutFor(const ArchitectureConfig& arch) {
  const auto shapes = ShapesFor(arch);
  ParamLayout layout;
  int i = 0;
  for (const BlockShape& s : shapes) {
    if (!s.is_bias) {
      if (s.name.rfind("backbone.", 0) == 0) layout.backbone_conv.push_back(i);
      else if (s.name == "rpn.conv.weight") layout.rpn_conv = i;
      else if (s.name == "rpn.cls.weight") layout.rpn_cls = i;
      else if (s.name == "rpn.reg.weight") layout.rpn_reg = i;
      else if (s.name == "head.fc.weight") layout.head_fc = i;
      else if (s.name == "head.cls.weight") layout.head_cls = i;
      else if (s.name == "head.reg.weight") layout.head_reg = i;
    }
    ++i;
  }
  return layout;
}

NetworkParams InitializeParams(const ArchitectureConfig& arch, std::uint64_t seed, const InitConfig& init) {
  if (init.scheme == InitScheme::kUniform && !(init.range > 0)) {
    throw std::invalid_argument("init range must be positive");
  }
  Rng rng(DeriveSeed(seed, "init"));
  NetworkParams params;
  for (const BlockShape& s : ShapesFor(arch)) {
    ParamBlock block{s.name, s.shape, std::vector<double>(Product(s.shape), 0.0)};
    if (!s.is_bias) {
      const double fan_in = static_cast<double>(Product(s.shape) / static_cast<std::size_t>(s.shape[0]));
      const double bound = init.scheme == InitScheme::kUniform ? init.range : std::sqrt(6.0 / fan_in);
      for (double& v : block.values) v = rng.Uniform(-bound, bound);
    }
    params.blocks.push_back(std::move(block));
  }
  return params;
}

void CheckParamsMatch(const NetworkParams& params, const ArchitectureConfig& arch) {
  const auto shapes = ShapesFor(arch);
  if (shapes.size() != params.blocks.size()) {
    throw std::invalid_argument("parameter block count does not match the architecture");
  }
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const ParamBlock& b = params.blocks[i];
    if (b.shape != shapes[i].shape || b.values.size() != Product(shapes[i].shape)) {
      throw std::invalid_argument("parameter block '" + b.name + "' has the wrong shape");
    }
  }
}

std::string SerializeCheckpoint(const Checkpoint& ckpt) {
  CheckParamsMatch(ckpt.params, ckpt.arch);
  const ArchitectureConfig& a = ckpt.arch;
  json backbone = json::array();
  for (const LayerSpec& l : a.backbone) backbone.push_back(LayerToJson(l));
  json arch = {{"input_channels", a.input_channels},
               {"backbone", backbone},
               {"rpn_hidden", a.rpn_hidden},
               {"roi_size", a.roi_size},
               {"head_hidden", a.head_hidden},
               {"anchor_base_size", a.anchor_base_size},
               {"anchor_scales", a.anchor_scales},
               {"anchor_ratios", a.anchor_ratios}};
  json blocks = json::array();
  for (const ParamBlock& b : ckpt.params.blocks) {
    blocks.push_back({{"name", b.name}, {"shape", b.shape}, {"values", b.values}});
  }
  json doc = {{"format", "xroads-checkpoint"}, {"version", 1}, {"architecture", arch}, {"params", blocks}};
  return doc.dump() + "\n";
}

Checkpoint ParseCheckpoint(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format").get<std::string>() != "xroads-checkpoint") {
      throw std::runtime_error("not an xroads checkpoint");
    }
    if (doc.at("version").get<int>() != 1) throw std::runtime_error("unsupported checkpoint version");
    const json& a = doc.at("architecture");
    Checkpoint ckpt;
    ckpt.arch.input_channels = a.at("input_channels").get<int>();
    for (const json& l : a.at("backbone")) ckpt.arch.backbone.push_back(LayerFromJson(l));
    ckpt.arch.rpn_hidden = a.at("rpn_hidden").get<int>();
    ckpt.arch.roi_size = a.at("roi_size").get<int>();
    ckpt.arch.head_hidden = a.at("head_hidden").get<int>();
    ckpt.arch.anchor_base_size = a.at("anchor_base_size").get<double>();
    ckpt.arch.anchor_scales = a.at("anchor_scales").get<std::vector<double>>();
    ckpt.arch.anchor_ratios = a.at("anchor_ratios").get<std::vector<double>>();
    for (const json& b : doc.at("params")) {
      ckpt.params.blocks.push_back({b.at("name").get<std::string>(), b.at("shape").get<std::vector<int>>(),
                                    b.at("values").get<std::vector<double>>()});
    }
    CheckParamsMatch(ckpt.params, ckpt.arch);
    return ckpt;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("bad checkpoint: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("bad checkpoint: ") + e.what());
  }
}

void SaveCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  WriteTextFile(path, SerializeCheckpoint(ckpt));
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  try {
    return ParseCheckpoint(ReadTextFile(path));
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace xroads
