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
// xroads: batch entry points for the road-intersection pipeline.
//
// Exit status: 0 on success, 2 for usage and configuration errors, 1 for
// any other failure (I/O, malformed data, training divergence).

#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "xroads/cli/commands.h"
#include "xroads/cli/run_config.h"

namespace {

using Command = std::function<void(const xroads::cli::RunConfig&, std::ostream&)>;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Road intersection detection on map tiles"};
  app.require_subcommand(1);

  std::string config_path;
  xroads::cli::Overrides overrides;
  const std::pair<const char*, const char*> descriptions[] = {
      {"synthetic", "Generate a synthetic road-crossing dataset"},
      {"augment", "Enlarge a dataset with flipped, rotated, blurred and downscaled copies"},
      {"train", "Split the dataset and train the detector"},
      {"detect", "Run a trained detector over the evaluation tiles"},
      {"evaluate", "Score detections with point-in-box matching"},
      {"metrics", "Compute edge density, RGB diversity and sharpness per tile"},
      {"analyze", "Regress false positives and negatives on tile metrics"},
  };
  const std::map<std::string, Command> commands = {
      {"synthetic", xroads::cli::CmdSynthetic}, {"augment", xroads::cli::CmdAugment},
      {"train", xroads::cli::CmdTrain},         {"detect", xroads::cli::CmdDetect},
      {"evaluate", xroads::cli::CmdEvaluate},   {"metrics", xroads::cli::CmdMetrics},
      {"analyze", xroads::cli::CmdAnalyze},
  };
  for (const auto& [name, description] : descriptions) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_path, "Run configuration file")->required();
    sub->add_option("--seed", overrides.seed, "Override the run seed");
    sub->add_option("--steps", overrides.steps, "Override the number of training steps");
    sub->add_option("--lr", overrides.learning_rate, "Override the learning rate");
    sub->add_option("--threshold", overrides.threshold, "Override the detection probability threshold");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    xroads::cli::RunConfig config = xroads::cli::LoadRunConfig(config_path);
    xroads::cli::ApplyOverrides(config, overrides);
    commands.at(name)(config, std::cout);
  } catch (const xroads::cli::ConfigError& e) {
    std::cerr << "xroads " << name << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "xroads " << name << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
