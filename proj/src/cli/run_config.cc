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
#include "xroads/cli/run_config.h"

#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "xroads/text_io.h"

namespace xroads::cli {

namespace fs = std::filesystem;

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t ParseUnsigned(const std::string& v) {
  const long long x = ParseInt(v);
  if (x < 0) throw std::invalid_argument("expected a non-negative integer, got '" + v + "'");
  return static_cast<std::uint64_t>(x);
}

}  // namespace

std::uint64_t RunConfig::RequireSeed() const {
  if (!seed) throw ConfigError("config key 'seed' is required");
  return *seed;
}

RunConfig ParseRunConfig(const std::string& text, const fs::path& base_dir) {
  RunConfig c;
  std::map<std::string, fs::path*> paths = {
      {"output_dir", &c.output_dir},       {"dataset", &c.dataset},
      {"augmented_dataset", &c.augmented_dataset}, {"split", &c.split},
      {"checkpoint", &c.checkpoint},       {"trace", &c.trace},
      {"loss_plot", &c.loss_plot},         {"detections", &c.detections},
      {"evaluation", &c.evaluation},       {"metrics", &c.metrics},
      {"regression_fp", &c.regression_fp}, {"regression_fn", &c.regression_fn},
  };
  LossConfig& loss = c.detector.loss;
  const std::map<std::string, std::function<void(const std::string&)>> scalars = {
      {"seed", [&](const std::string& v) { c.seed = ParseUnsigned(v); }},
      {"steps", [&](const std::string& v) { c.steps = ParseUnsigned(v); }},
      {"augment_target", [&](const std::string& v) { c.augment_target = ParseUnsigned(v); }},
      {"smoothing", [&](const std::string& v) { c.smoothing = ParseDouble(v); }},
      {"test_fraction", [&](const std::string& v) { c.test_fraction = ParseDouble(v); }},
      {"alpha", [&](const std::string& v) { c.alpha = ParseDouble(v); }},
      {"log_every", [&](const std::string& v) { c.log_every = ParseUnsigned(v); }},
      {"detect_on",
       [&](const std::string& v) {
         if (v != "test" && v != "all") throw std::invalid_argument("expected test or all");
         c.detect_on = v;
       }},
      {"averaging",
       [&](const std::string& v) {
         if (v == "micro") c.averaging = Averaging::kMicro;
         else if (v == "macro") c.averaging = Averaging::kMacro;
         else throw std::invalid_argument("expected micro or macro");
       }},
      {"match_mode",
       [&](const std::string& v) {
         if (v == "point") c.match_mode = MatchMode::kPoint;
         else if (v == "iou50") c.match_mode = MatchMode::kIou50;
         else throw std::invalid_argument("expected point or iou50");
       }},
      {"architecture",
       [&](const std::string& v) {
         if (v == "default") c.detector.arch = ArchitectureConfig::Default();
         else if (v == "small") c.detector.arch = ArchitectureConfig::Small();
         else throw std::invalid_argument("expected default or small");
       }},
      {"init",
       [&](const std::string& v) {
         if (v == "uniform") c.detector.init.scheme = InitScheme::kUniform;
         else if (v == "he_uniform") c.detector.init.scheme = InitScheme::kHeUniform;
         else throw std::invalid_argument("expected uniform or he_uniform");
       }},
      {"init_range", [&](const std::string& v) { c.detector.init.range = ParseDouble(v); }},
      {"lambda", [&](const std::string& v) { loss.lambda = ParseDouble(v); }},
      {"n_cls", [&](const std::string& v) { loss.n_cls = static_cast<int>(ParseInt(v)); }},
      {"hi_threshold", [&](const std::string& v) { loss.hi_threshold = ParseDouble(v); }},
      {"lo_threshold", [&](const std::string& v) { loss.lo_threshold = ParseDouble(v); }},
      {"learning_rate", [&](const std::string& v) { loss.learning_rate = ParseDouble(v); }},
      {"nms_max", [&](const std::string& v) { loss.nms_max = static_cast<int>(ParseInt(v)); }},
      {"proposals_to_head", [&](const std::string& v) { loss.proposals_to_head = static_cast<int>(ParseInt(v)); }},
      {"detect_threshold", [&](const std::string& v) { loss.detect_threshold = ParseDouble(v); }},
      {"nms_threshold", [&](const std::string& v) { loss.nms_threshold = ParseDouble(v); }},
      {"detect_nms_threshold", [&](const std::string& v) { loss.detect_nms_threshold = ParseDouble(v); }},
      {"min_proposal_size", [&](const std::string& v) { loss.min_proposal_size = ParseDouble(v); }},
      {"head_batch", [&](const std::string& v) { loss.head_batch = static_cast<int>(ParseInt(v)); }},
      {"head_hi_threshold", [&](const std::string& v) { loss.head_hi_threshold = ParseDouble(v); }},
      {"head_lo_threshold", [&](const std::string& v) { loss.head_lo_threshold = ParseDouble(v); }},
      {"head_positive_fraction", [&](const std::string& v) { loss.head_positive_fraction = ParseDouble(v); }},
      {"synthetic_count", [&](const std::string& v) { c.synthetic_count = static_cast<int>(ParseInt(v)); }},
      {"synthetic_tile_size", [&](const std::string& v) { c.synthetic.tile_size = static_cast<int>(ParseInt(v)); }},
      {"synthetic_min_roads", [&](const std::string& v) { c.synthetic.min_roads = static_cast<int>(ParseInt(v)); }},
      {"synthetic_max_roads", [&](const std::string& v) { c.synthetic.max_roads = static_cast<int>(ParseInt(v)); }},
      {"synthetic_double_line_probability",
       [&](const std::string& v) { c.synthetic.double_line_probability = ParseDouble(v); }},
      {"synthetic_min_crossing_angle",
       [&](const std::string& v) { c.synthetic.min_crossing_angle_deg = ParseDouble(v); }},
      {"synthetic_box_size", [&](const std::string& v) { c.synthetic.box_size = ParseDouble(v); }},
      {"synthetic_max_distractors",
       [&](const std::string& v) { c.synthetic.max_distractors = static_cast<int>(ParseInt(v)); }},
  };

  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(line_no);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError(where + ": key '" + key + "' given twice");
    if (value.empty()) throw ConfigError(where + ": key '" + key + "' has no value");
    if (auto p = paths.find(key); p != paths.end()) {
      const fs::path v(value);
      *p->second = v.is_absolute() ? v : base_dir / v;
      continue;
    }
    const auto s = scalars.find(key);
    if (s == scalars.end()) throw ConfigError(where + ": unknown key '" + key + "'");
    try {
      s->second(value);
    } catch (const std::exception& e) {
      throw ConfigError(where + ": bad value for '" + key + "': " + e.what());
    }
  }

  if (c.output_dir.empty()) c.output_dir = base_dir / "out";
  const std::pair<fs::path*, const char*> defaults[] = {
      {&c.dataset, "dataset/annotations.json"},
      {&c.augmented_dataset, "augmented/annotations.json"},
      {&c.split, "split.json"},
      {&c.checkpoint, "checkpoint.json"},
      {&c.trace, "trace.csv"},
      {&c.loss_plot, "loss.svg"},
      {&c.detections, "detections.csv"},
      {&c.evaluation, "evaluation.csv"},
      {&c.metrics, "metrics.csv"},
      {&c.regression_fp, "regression_fp.csv"},
      {&c.regression_fn, "regression_fn.csv"},
  };
  for (auto& [p, name] : defaults) {
    if (p->empty()) *p = c.output_dir / name;
  }
  try {
    c.detector.arch.Validate();
    c.detector.loss.Validate();
    c.synthetic.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  if (!(c.smoothing >= 0 && c.smoothing < 1)) throw ConfigError("smoothing must lie in [0, 1)");
  if (!(c.alpha > 0 && c.alpha < 1)) throw ConfigError("alpha must lie in (0, 1)");
  if (!(c.test_fraction > 0 && c.test_fraction < 1)) throw ConfigError("test_fraction must lie in (0, 1)");
  return c;
}

RunConfig LoadRunConfig(const fs::path& path) {
  RequireExists(path, "--config");
  fs::path base = path.parent_path();
  if (base.empty()) base = ".";
  return ParseRunConfig(ReadTextFile(path), base);
}

void ApplyOverrides(RunConfig& config, const Overrides& o) {
  if (o.seed) config.seed = *o.seed;
  if (o.steps) config.steps = *o.steps;
  if (o.learning_rate) config.detector.loss.learning_rate = *o.learning_rate;
  if (o.threshold) config.detector.loss.detect_threshold = *o.threshold;
  try {
    config.detector.loss.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid override: ") + e.what());
  }
}

void RequireExists(const fs::path& path, const std::string& key) {
  if (!fs::exists(path)) throw ConfigError(key + ": '" + path.string() + "' does not exist");
}

}  // namespace xroads::cli
