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
#ifndef XROADS_CLI_COMMANDS_H_
#define XROADS_CLI_COMMANDS_H_

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "xroads/cli/run_config.h"
#include "xroads/geometry.h"
#include "xroads/image.h"

namespace xroads::cli {

struct DetectionRow {
  std::string tile_id;
  ScoredBox detection;
};

// tile_id,cx,cy,w,h,score
std::string DetectionsCsv(std::span<const DetectionRow> rows);
std::vector<DetectionRow> ParseDetectionsCsv(const std::string& text);

// The tiles a command operates on: the test split, or every tile when
// detect_on = all.
std::vector<AnnotatedTile> EvaluationTiles(const RunConfig& config);

// Each command reads its inputs from the paths in config, writes its outputs
// and prints a short summary to log. Failures are thrown; ConfigError marks a
// usage problem, anything else a runtime failure.
void CmdSynthetic(const RunConfig& config, std::ostream& log);
void CmdAugment(const RunConfig& config, std::ostream& log);
void CmdTrain(const RunConfig& config, std::ostream& log);
void CmdDetect(const RunConfig& config, std::ostream& log);
void CmdEvaluate(const RunConfig& config, std::ostream& log);
void CmdMetrics(const RunConfig& config, std::ostream& log);
void CmdAnalyze(const RunConfig& config, std::ostream& log);

}  // namespace xroads::cli

#endif  // XROADS_CLI_COMMANDS_H_
