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
#ifndef XROADS_DETECTOR_LAYERS_H_
#define XROADS_DETECTOR_LAYERS_H_

#include <span>
#include <vector>

#include "xroads/detector/tensor.h"

namespace xroads::layers {

// Zero-padded (kernel / 2) 2-D convolution. weights are
// [out][in][kernel][kernel].
Tensor Conv2dForward(const Tensor& in, std::span<const double> weights, std::span<const double> bias,
                     int out_channels, int kernel, int stride);
// Accumulates into grad_weights / grad_bias; returns the input gradient
// (skipped, returning an empty tensor, when want_input_grad is false).
Tensor Conv2dBackward(const Tensor& in, const Tensor& grad_out, std::span<const double> weights,
                      std::span<double> grad_weights, std::span<double> grad_bias, int kernel,
                      int stride, bool want_input_grad = true);

Tensor ReluForward(const Tensor& in);
// Gradient passes where the forward output was positive.
Tensor ReluBackward(const Tensor& out, const Tensor& grad_out);

// 2x2 stride-2 max pool with floor semantics. argmax receives the flat input
// index chosen for each output cell (first maximum in scan order).
Tensor MaxPoolForward(const Tensor& in, std::vector<std::size_t>& argmax);
Tensor MaxPoolBackward(const Tensor& in_shape, const Tensor& grad_out,
                       const std::vector<std::size_t>& argmax);

// y = W x + b with W [out][in].
std::vector<double> DenseForward(std::span<const double> x, std::span<const double> weights,
                                 std::span<const double> bias, int out);
// Accumulates parameter gradients and returns dL/dx.
std::vector<double> DenseBackward(std::span<const double> x, std::span<const double> grad_out,
                                  std::span<const double> weights, std::span<double> grad_weights,
                                  std::span<double> grad_bias);

}  // namespace xroads::layers

#endif  // XROADS_DETECTOR_LAYERS_H_
