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
#ifndef XROADS_CLI_SVG_PLOT_H_
#define XROADS_CLI_SVG_PLOT_H_

#include <string>

#include "xroads/detector/training.h"

namespace xroads::cli {

// Line chart of the five loss series of a trace, each smoothed with an
// exponential moving average of the given factor. Output depends only on the
// inputs, so plots can be diffed.
std::string LossCurveSvg(const TrainTrace& trace, double smoothing);

}  // namespace xroads::cli

#endif  // XROADS_CLI_SVG_PLOT_H_
