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
#ifndef XROADS_CLI_RUN_CONFIG_H_
#define XROADS_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "xroads/detector/config.h"
#include "xroads/evaluation.h"
#include "xroads/synthetic.h"

namespace xroads::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Settings shared by all subcommands. Read from a flat "key = value" file;
// '#' starts a comment. Relative paths resolve against the directory of the
// config file, and unset paths default to fixed names under output_dir.
struct RunConfig {
  std::optional<std::uint64_t> seed;

  std::filesystem::path output_dir;
  std::filesystem::path dataset;            // annotation document read by most commands
  std::filesystem::path augmented_dataset;  // written by augment
  std::filesystem::path split;
  std::filesystem::path checkpoint;
  std::filesystem::path trace;
  std::filesystem::path loss_plot;
  std::filesystem::path detections;
  std::filesystem::path evaluation;
  std::filesystem::path metrics;
  std::filesystem::path regression_fp;
  std::filesystem::path regression_fn;

  DetectorConfig detector;
  std::size_t steps = 5000;
  std::size_t augment_target = 0;  // 0 leaves the training split as is
  double smoothing = 0.9;
  double test_fraction = 0.2;
  std::string detect_on = "test";  // "test" or "all"
  Averaging averaging = Averaging::kMicro;
  MatchMode match_mode = MatchMode::kPoint;
  double alpha = 0.05;
  int synthetic_count = 200;
  SyntheticConfig synthetic;
  std::size_t log_every = 500;

  std::uint64_t RequireSeed() const;
};

// Unknown keys, malformed values and repeated keys are errors that name the
// line.
RunConfig ParseRunConfig(const std::string& text, const std::filesystem::path& base_dir);
RunConfig LoadRunConfig(const std::filesystem::path& path);

// Command-line overrides of individual fields.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> steps;
  std::optional<double> learning_rate;
  std::optional<double> threshold;
};

void ApplyOverrides(RunConfig& config, const Overrides& overrides);

// Throws ConfigError naming key when path does not exist.
void RequireExists(const std::filesystem::path& path, const std::string& key);

}  // namespace xroads::cli

#endif  // XROADS_CLI_RUN_CONFIG_H_
