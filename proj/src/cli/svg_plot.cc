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
#include "xroads/cli/svg_plot.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace xroads::cli {

namespace {

constexpr double kWidth = 800, kHeight = 480;
constexpr double kLeft = 60, kRight = 170, kTop = 30, kBottom = 50;

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

}  // namespace

std::string LossCurveSvg(const TrainTrace& trace, double smoothing) {
  struct Series {
    const char* name;
    const char* color;
    double TrainRecord::*field;
  };
  const Series series[] = {
      {"total", "#000000", &TrainRecord::total},
      {"rpn_cls", "#1f77b4", &TrainRecord::rpn_cls},
      {"rpn_reg", "#ff7f0e", &TrainRecord::rpn_reg},
      {"det_cls", "#2ca02c", &TrainRecord::det_cls},
      {"det_reg", "#d62728", &TrainRecord::det_reg},
  };

  std::vector<std::vector<double>> smoothed;
  double y_max = 0;
  for (const Series& s : series) {
    std::vector<double> raw;
    raw.reserve(trace.size());
    for (const TrainRecord& r : trace) raw.push_back(r.*s.field);
    smoothed.push_back(SmoothEma(raw, smoothing));
    for (double v : smoothed.back()) y_max = std::max(y_max, v);
  }
  if (!(y_max > 0)) y_max = 1;
  const double x_max = trace.size() > 1 ? static_cast<double>(trace.size() - 1) : 1;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double step) { return kLeft + pw * step / x_max; };
  auto py = [&](double v) { return kTop + ph * (1 - v / y_max); };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + Num(kWidth) + "\" height=\"" +
                    Num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + Num(kLeft) + "\" y=\"18\">Training loss (EMA " + Label(smoothing) + ")</text>\n";
  // Axes and ticks.
  svg += "<g stroke=\"#444\" fill=\"none\"><path d=\"M" + Num(kLeft) + " " + Num(kTop) + " V" +
         Num(kTop + ph) + " H" + Num(kLeft + pw) + "\"/></g>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = y_max * i / 4, s = x_max * i / 4;
    svg += "<text x=\"" + Num(kLeft - 6) + "\" y=\"" + Num(py(v) + 4) + "\" text-anchor=\"end\">" + Label(v) +
           "</text>\n";
    svg += "<text x=\"" + Num(px(s)) + "\" y=\"" + Num(kTop + ph + 18) + "\" text-anchor=\"middle\">" +
           Label(std::round(s)) + "</text>\n";
  }
  svg += "<text x=\"" + Num(kLeft + pw / 2) + "\" y=\"" + Num(kHeight - 10) +
         "\" text-anchor=\"middle\">step</text>\n";

  for (std::size_t k = 0; k < smoothed.size(); ++k) {
    const std::vector<double>& ys = smoothed[k];
    if (!ys.empty()) {
      svg += "<polyline fill=\"none\" stroke=\"" + std::string(series[k].color) + "\" stroke-width=\"1.2\" points=\"";
      for (std::size_t i = 0; i < ys.size(); ++i) {
        if (i) svg += ' ';
        svg += Num(px(static_cast<double>(i))) + "," + Num(py(ys[i]));
      }
      svg += "\"/>\n";
    }
    const double ly = kTop + 10 + 20 * static_cast<double>(k);
    svg += "<line x1=\"" + Num(kWidth - kRight + 15) + "\" y1=\"" + Num(ly) + "\" x2=\"" +
           Num(kWidth - kRight + 40) + "\" y2=\"" + Num(ly) + "\" stroke=\"" + series[k].color + "\"/>\n";
    svg += "<text x=\"" + Num(kWidth - kRight + 46) + "\" y=\"" + Num(ly + 4) + "\">" + series[k].name +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace xroads::cli
