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
#ifndef XROADS_DETECTOR_TENSOR_H_
#define XROADS_DETECTOR_TENSOR_H_

#include <cstddef>
#include <vector>

namespace xroads {

// Dense channels x rows x cols tensor, channel-major.
struct Tensor {
  int channels = 0;
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  Tensor() = default;
  Tensor(int c, int r, int w, double fill = 0.0)
      : channels(c), rows(r), cols(w),
        values(static_cast<std::size_t>(c) * static_cast<std::size_t>(r) * static_cast<std::size_t>(w), fill) {}

  std::size_t index(int c, int r, int w) const {
    return (static_cast<std::size_t>(c) * static_cast<std::size_t>(rows) + static_cast<std::size_t>(r)) *
               static_cast<std::size_t>(cols) + static_cast<std::size_t>(w);
  }
  double& at(int c, int r, int w) { return values[index(c, r, w)]; }
  double at(int c, int r, int w) const { return values[index(c, r, w)]; }
  std::size_t size() const { return values.size(); }
  bool SameShape(const Tensor& o) const {
    return channels == o.channels && rows == o.rows && cols == o.cols;
  }
};

// The shared feature map the proposal network and ROI pooling read.
using FeatureMap = Tensor;

}  // namespace xroads

#endif  // XROADS_DETECTOR_TENSOR_H_
