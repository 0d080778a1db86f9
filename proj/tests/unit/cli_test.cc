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
#include <cstdlib>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "doctest.h"
#include "support/temp_dir.h"
#include "xroads/cli/commands.h"
#include "xroads/cli/run_config.h"
#include "xroads/cli/svg_plot.h"
#include "xroads/dataset.h"
#include "xroads/detector/training.h"
#include "xroads/evaluation.h"
#include "xroads/image_metrics.h"
#include "xroads/regression.h"
#include "xroads/text_io.h"

namespace xroads::cli {
namespace {

namespace fs = std::filesystem;

std::string ErrorOf(const std::string& text) {
  try {
    ParseRunConfig(text, "/base");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST_CASE("config: values, comments and defaults") {
  const RunConfig c = ParseRunConfig(
      "# a run\nseed = 42  # trailing\nsteps=12\nlearning_rate = 0.01\narchitecture = small\n"
      "detect_on = all\naveraging = macro\n",
      "/base");
  CHECK(c.RequireSeed() == 42);
  CHECK(c.steps == 12);
  CHECK(c.detector.loss.learning_rate == 0.01);
  CHECK(c.detector.arch == ArchitectureConfig::Small());
  CHECK(c.detect_on == "all");
  CHECK(c.averaging == Averaging::kMacro);
  CHECK(c.smoothing == 0.9);
  CHECK(c.output_dir == fs::path("/base/out"));
  CHECK(c.trace == fs::path("/base/out/trace.csv"));
  CHECK(c.dataset == fs::path("/base/out/dataset/annotations.json"));
}

TEST_CASE("config: relative paths resolve against the config directory") {
  const RunConfig c = ParseRunConfig("seed = 1\noutput_dir = run\ndataset = data/a.json\ntrace = /abs/t.csv\n",
                                     "/base");
  CHECK(c.output_dir == fs::path("/base/run"));
  CHECK(c.dataset == fs::path("/base/data/a.json"));
  CHECK(c.trace == fs::path("/abs/t.csv"));
  CHECK(c.checkpoint == fs::path("/base/run/checkpoint.json"));
}

TEST_CASE("config: errors name the line and key") {
  CHECK(ErrorOf("seed = 1\nbogus = 3\n").find("line 2") != std::string::npos);
  CHECK(ErrorOf("seed = 1\nbogus = 3\n").find("'bogus'") != std::string::npos);
  CHECK(ErrorOf("seed = 1\nseed = 2\n").find("twice") != std::string::npos);
  CHECK(ErrorOf("seed =\n").find("no value") != std::string::npos);
  CHECK(ErrorOf("steps = many\n").find("'steps'") != std::string::npos);
  CHECK(ErrorOf("seed = -4\n").find("'seed'") != std::string::npos);
  CHECK(ErrorOf("just words\n").find("key = value") != std::string::npos);
  CHECK(ErrorOf("smoothing = 1.5\n").find("smoothing") != std::string::npos);
  CHECK(ErrorOf("hi_threshold = 0.05\n").find("invalid config") != std::string::npos);
}

TEST_CASE("config: the seed is mandatory") {
  const RunConfig c = ParseRunConfig("steps = 3\n", "/base");
  CHECK_THROWS_AS(c.RequireSeed(), ConfigError);
}

TEST_CASE("overrides replace individual fields") {
  RunConfig c = ParseRunConfig("seed = 1\n", "/base");
  ApplyOverrides(c, {7, 99, 0.5, 0.25});
  CHECK(c.seed == 7u);
  CHECK(c.steps == 99);
  CHECK(c.detector.loss.learning_rate == 0.5);
  CHECK(c.detector.loss.detect_threshold == 0.25);
  CHECK_THROWS_AS(ApplyOverrides(c, {std::nullopt, std::nullopt, -1.0, std::nullopt}), ConfigError);
}

TEST_CASE("detections csv round-trips") {
  const std::vector<DetectionRow> rows{{"a", {{10.5, 20.25, 16, 15.5}, 0.875}}, {"b", {{1, 2, 3, 4}, 1.0 / 3}}};
  const std::string csv = DetectionsCsv(rows);
  CHECK(csv.rfind("tile_id,cx,cy,w,h,score\n", 0) == 0);
  const auto back = ParseDetectionsCsv(csv);
  REQUIRE(back.size() == 2);
  CHECK(back[0].detection == rows[0].detection);
  CHECK(back[1].detection == rows[1].detection);
  CHECK(back[1].tile_id == "b");
}

TEST_CASE("loss svg draws five series and is deterministic") {
  TrainTrace trace;
  for (std::size_t i = 0; i < 40; ++i) {
    const double x = 1.0 / (1 + static_cast<double>(i));
    trace.push_back({i, x, x / 2, x / 3, x / 4, x + x / 2 + x / 3 + x / 4});
  }
  const std::string svg = LossCurveSvg(trace, 0.9);
  CHECK(svg.rfind("<svg", 0) == 0);
  std::size_t lines = 0;
  for (auto p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++lines;
  CHECK(lines == 5);
  CHECK(svg == LossCurveSvg(trace, 0.9));
  CHECK(svg != LossCurveSvg(trace, 0.5));
}

// A tiny end-to-end configuration in a scratch directory.
struct Run {
  testing::TempDir dir{"cli"};
  fs::path config_path() const { return dir / "run.cfg"; }
  RunConfig Write(const std::string& extra = "") const {
    WriteTextFile(config_path(),
                  "seed = 5\nsynthetic_count = 12\nsynthetic_tile_size = 64\narchitecture = small\n"
                  "steps = 6\nlog_every = 0\ndetect_on = all\nn_cls = 32\n" + extra);
    return LoadRunConfig(config_path());
  }
};

TEST_CASE("pipeline: zero steps save the initialization, trace rows match steps") {
  Run run;
  std::ostringstream log;
  RunConfig c = run.Write();
  c.steps = 0;
  CmdSynthetic(c, log);
  CmdTrain(c, log);
  const Checkpoint ckpt = LoadCheckpoint(c.checkpoint);
  CHECK(ckpt.params == InitializeParams(c.detector.arch, 5));
  CHECK(ParseTrainTraceCsv(ReadTextFile(c.trace)).empty());

  c.steps = 6;
  fs::remove(c.split);
  CmdTrain(c, log);
  CHECK(ParseTrainTraceCsv(ReadTextFile(c.trace)).size() == 6);
}

TEST_CASE("pipeline: augment to the current size adds nothing; same seed is byte identical") {
  Run run;
  std::ostringstream log;
  RunConfig c = run.Write();
  CmdSynthetic(c, log);
  c.augment_target = 12;
  CmdAugment(c, log);
  CHECK(LoadAnnotations(c.augmented_dataset) == LoadAnnotations(c.dataset));

  c.augment_target = 20;
  CmdAugment(c, log);
  const std::string first = ReadTextFile(c.augmented_dataset);
  CHECK(LoadAnnotations(c.augmented_dataset).size() == 20);
  CmdAugment(c, log);
  CHECK(ReadTextFile(c.augmented_dataset) == first);
}

TEST_CASE("pipeline: detect then evaluate reproduces the in-process report") {
  Run run;
  std::ostringstream log;
  RunConfig c = run.Write();
  c.detector.loss.detect_threshold = 0.0;
  CmdSynthetic(c, log);
  CmdTrain(c, log);
  CmdDetect(c, log);
  CmdEvaluate(c, log);

  const Checkpoint ckpt = LoadCheckpoint(c.checkpoint);
  DetectorConfig detector = c.detector;
  detector.arch = ckpt.arch;
  std::vector<TileEvaluation> evals;
  for (const AnnotatedTile& t : EvaluationTiles(c)) {
    evals.push_back({t.tile.id, MatchDetections(Detect(t.tile.image, ckpt.params, detector), t.ground_truths)});
  }
  CHECK(ReadTextFile(c.evaluation) == EvaluationCsv(evals));
}

TEST_CASE("analyze joins evaluation and metrics by tile id") {
  Run run;
  std::ostringstream log;
  RunConfig c = run.Write();
  CmdSynthetic(c, log);
  CmdMetrics(c, log);
  std::vector<TileEvaluation> evals;
  int i = 0;
  for (const TileMetricsRow& m : ParseTileMetricsCsv(ReadTextFile(c.metrics))) {
    evals.push_back({m.tile_id, {static_cast<std::size_t>(i % 3), static_cast<std::size_t>(i % 4),
                                 static_cast<std::size_t>((i * 7) % 5), {}}});
    ++i;
  }
  WriteTextFile(c.evaluation, EvaluationCsv(evals));
  CmdAnalyze(c, log);
  const std::string fp = ReadTextFile(c.regression_fp);
  CHECK(fp.find("# response=fp\n# df=8\n") == 0);
  CHECK(fp.find("predictor,coef,se,t,p,ci_lo,ci_hi\nedge_density,") != std::string::npos);
  CHECK(ReadTextFile(c.regression_fn).find("sharpness,") != std::string::npos);

  // Constant errors cannot be standardized.
  for (auto& e : evals) e.match.fn = 1;
  WriteTextFile(c.evaluation, EvaluationCsv(evals));
  CHECK_THROWS_AS(CmdAnalyze(c, log), RegressionError);
}

TEST_CASE("evaluate rejects detections for unknown tiles") {
  Run run;
  std::ostringstream log;
  RunConfig c = run.Write();
  CmdSynthetic(c, log);
  WriteTextFile(c.detections, "tile_id,cx,cy,w,h,score\nnowhere,1,1,2,2,0.9\n");
  CHECK_THROWS_AS(CmdEvaluate(c, log), DatasetError);
}

int Exec(const std::string& args) {
  const std::string cmd = std::string(XROADS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_CASE("exit status of the command-line tool") {
  Run run;
  run.Write();
  const std::string cfg = "--config " + run.config_path().string();
  CHECK(Exec("") == 2);
  CHECK(Exec("train") == 2);
  CHECK(Exec("frobnicate " + cfg) == 2);
  CHECK(Exec("train --config " + (run.dir / "missing.cfg").string()) == 2);
  CHECK(Exec("detect " + cfg) == 2);  // no checkpoint yet
  CHECK(Exec("synthetic " + cfg) == 0);
  CHECK(Exec("train " + cfg + " --steps 2") == 0);
  CHECK(Exec("train " + cfg + " --lr -1") == 2);

  WriteTextFile(run.dir / "bad.cfg", "seed = 1\ncolour = blue\n");
  CHECK(Exec("train --config " + (run.dir / "bad.cfg").string()) == 2);
  WriteTextFile(run.dir / "noseed.cfg", "steps = 1\n");
  CHECK(Exec("synthetic --config " + (run.dir / "noseed.cfg").string()) == 2);

  // A corrupt dataset is a runtime failure, not a usage error.
  WriteTextFile(run.dir / "out/dataset/annotations.json", "[{");
  CHECK(Exec("metrics " + cfg) == 1);
}

}  // namespace
}  // namespace xroads::cli
