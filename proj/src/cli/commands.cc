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
#include "xroads/cli/commands.h"

#include <map>

#include "xroads/augment.h"
#include "xroads/cli/svg_plot.h"
#include "xroads/dataset.h"
#include "xroads/detector/training.h"
#include "xroads/evaluation.h"
#include "xroads/image_metrics.h"
#include "xroads/regression.h"
#include "xroads/synthetic.h"
#include "xroads/text_io.h"

namespace xroads::cli {

namespace fs = std::filesystem;

namespace {

std::vector<AnnotatedTile> LoadDataset(const RunConfig& config) {
  RequireExists(config.dataset, "dataset");
  return LoadAnnotations(config.dataset);
}

DatasetSplit LoadOrCreateSplit(const RunConfig& config, std::span<const AnnotatedTile> items,
                               std::ostream& log) {
  if (fs::exists(config.split)) return LoadSplit(config.split);
  DatasetSplit split = SplitTrainTest(items, config.RequireSeed(), config.test_fraction);
  SaveSplit(split, config.split);
  log << "split: " << split.train.size() << " train / " << split.test.size() << " test -> "
      << config.split.string() << "\n";
  return split;
}

}  // namespace

std::string DetectionsCsv(std::span<const DetectionRow> rows) {
  std::string out = "tile_id,cx,cy,w,h,score\n";
  for (const DetectionRow& r : rows) {
    const Box& b = r.detection.box;
    out += r.tile_id + "," + FormatDouble(b.cx) + "," + FormatDouble(b.cy) + "," + FormatDouble(b.w) + "," +
           FormatDouble(b.h) + "," + FormatDouble(r.detection.score) + "\n";
  }
  return out;
}

std::vector<DetectionRow> ParseDetectionsCsv(const std::string& text) {
  const CsvTable t = ParseCsv(text);
  const std::size_t id = t.Column("tile_id"), cx = t.Column("cx"), cy = t.Column("cy"), w = t.Column("w"),
                    h = t.Column("h"), score = t.Column("score");
  std::vector<DetectionRow> rows;
  for (const auto& row : t.rows) {
    rows.push_back({row[id],
                    {Box{ParseDouble(row[cx]), ParseDouble(row[cy]), ParseDouble(row[w]), ParseDouble(row[h])},
                     ParseDouble(row[score])}});
  }
  return rows;
}

std::vector<AnnotatedTile> EvaluationTiles(const RunConfig& config) {
  std::vector<AnnotatedTile> items = LoadDataset(config);
  if (config.detect_on == "all") return items;
  RequireExists(config.split, "split");
  const DatasetSplit split = LoadSplit(config.split);
  return SelectTiles(items, split.test);
}

void CmdSynthetic(const RunConfig& config, std::ostream& log) {
  const std::uint64_t seed = config.RequireSeed();
  const std::vector<AnnotatedTile> items =
      GenerateSyntheticDataset(config.synthetic, config.synthetic_count, seed);
  SaveAnnotations(items, config.dataset);
  std::size_t boxes = 0;
  for (const AnnotatedTile& t : items) boxes += t.ground_truths.size();
  log << "synthetic: " << items.size() << " tiles, " << boxes << " crossings -> " << config.dataset.string()
      << "\n";
}

void CmdAugment(const RunConfig& config, std::ostream& log) {
  const std::uint64_t seed = config.RequireSeed();
  const std::vector<AnnotatedTile> items = LoadDataset(config);
  const std::size_t target = std::max(config.augment_target, items.size());
  const std::vector<AnnotatedTile> out = AugmentDataset(items, target, seed);
  SaveAnnotations(out, config.augmented_dataset);
  log << "augment: " << items.size() << " originals + " << (out.size() - items.size()) << " new = "
      << out.size() << " tiles -> " << config.augmented_dataset.string() << "\n";
}

void CmdTrain(const RunConfig& config, std::ostream& log) {
  const std::uint64_t seed = config.RequireSeed();
  const std::vector<AnnotatedTile> items = LoadDataset(config);
  const DatasetSplit split = LoadOrCreateSplit(config, items, log);
  std::vector<AnnotatedTile> train = SelectTiles(items, split.train);
  if (config.augment_target > train.size()) {
    train = AugmentDataset(train, config.augment_target, seed);
    log << "train: augmented training split to " << train.size() << " tiles\n";
  }

  TrainOptions options;
  options.steps = config.steps;
  options.seed = seed;
  if (config.log_every > 0) {
    options.on_step = [&](const TrainRecord& r) {
      if ((r.step + 1) % config.log_every == 0) {
        log << "step " << (r.step + 1) << "/" << config.steps << " loss " << FormatDouble(r.total) << "\n";
      }
    };
  }
  const TrainResult result = Train(train, config.detector, options);
  SaveCheckpoint({config.detector.arch, result.params}, config.checkpoint);
  WriteTextFile(config.trace, TrainTraceCsv(result.trace));
  WriteTextFile(config.loss_plot, LossCurveSvg(result.trace, config.smoothing));
  log << "train: " << result.trace.size() << " steps on " << train.size() << " tiles -> "
      << config.checkpoint.string() << "\n";
}

void CmdDetect(const RunConfig& config, std::ostream& log) {
  RequireExists(config.checkpoint, "checkpoint");
  const Checkpoint ckpt = LoadCheckpoint(config.checkpoint);
  DetectorConfig detector = config.detector;
  detector.arch = ckpt.arch;
  const std::vector<AnnotatedTile> tiles = EvaluationTiles(config);
  std::vector<DetectionRow> rows;
  for (const AnnotatedTile& t : tiles) {
    for (const ScoredBox& d : Detect(t.tile.image, ckpt.params, detector)) rows.push_back({t.tile.id, d});
  }
  WriteTextFile(config.detections, DetectionsCsv(rows));
  log << "detect: " << rows.size() << " detections on " << tiles.size() << " tiles -> "
      << config.detections.string() << "\n";
}

void CmdEvaluate(const RunConfig& config, std::ostream& log) {
  RequireExists(config.detections, "detections");
  const std::vector<AnnotatedTile> tiles = EvaluationTiles(config);
  std::map<std::string, std::vector<ScoredBox>> by_tile;
  for (const DetectionRow& r : ParseDetectionsCsv(ReadTextFile(config.detections))) {
    by_tile[r.tile_id].push_back(r.detection);
  }
  std::vector<TileEvaluation> evals;
  for (const AnnotatedTile& t : tiles) {
    const auto it = by_tile.find(t.tile.id);
    const std::vector<ScoredBox> none;
    evals.push_back({t.tile.id, MatchDetections(it == by_tile.end() ? none : it->second, t.ground_truths,
                                                config.match_mode)});
    if (it != by_tile.end()) by_tile.erase(it);
  }
  if (!by_tile.empty()) {
    throw DatasetError("detections reference tile '" + by_tile.begin()->first +
                       "' which is not in the evaluated set");
  }
  WriteTextFile(config.evaluation, EvaluationCsv(evals, config.averaging));
  const EvalReport total = Aggregate(evals, config.averaging);
  auto fmt = [](const std::optional<double>& v) { return v ? FormatDouble(*v) : std::string("NA"); };
  log << "evaluate: tp " << total.tp << " fp " << total.fp << " fn " << total.fn << " precision "
      << fmt(total.precision) << " recall " << fmt(total.recall) << " f1 " << fmt(total.f1) << " -> "
      << config.evaluation.string() << "\n";
}

void CmdMetrics(const RunConfig& config, std::ostream& log) {
  const std::vector<AnnotatedTile> tiles = EvaluationTiles(config);
  std::vector<TileMetricsRow> rows;
  for (const AnnotatedTile& t : tiles) rows.push_back({t.tile.id, ComputeTileMetrics(t.tile.image)});
  WriteTextFile(config.metrics, TileMetricsCsv(rows));
  log << "metrics: " << rows.size() << " tiles -> " << config.metrics.string() << "\n";
}

void CmdAnalyze(const RunConfig& config, std::ostream& log) {
  RequireExists(config.evaluation, "evaluation");
  RequireExists(config.metrics, "metrics");
  std::vector<TileErrorCounts> errors;
  for (const EvaluationCsvRow& r : ParseEvaluationCsv(ReadTextFile(config.evaluation))) {
    errors.push_back({r.tile_id, static_cast<double>(r.report.fp), static_cast<double>(r.report.fn)});
  }
  const std::vector<TileMetricsRow> metrics = ParseTileMetricsCsv(ReadTextFile(config.metrics));
  const auto [fp, fn] = AnalyzeErrors(errors, metrics, config.alpha);
  WriteTextFile(config.regression_fp, RegressionReportCsv(fp));
  WriteTextFile(config.regression_fn, RegressionReportCsv(fn));
  log << "analyze: " << errors.size() << " tiles, df " << fp.df << " -> " << config.regression_fp.string()
      << ", " << config.regression_fn.string() << "\n";
}

}  // namespace xroads::cli
