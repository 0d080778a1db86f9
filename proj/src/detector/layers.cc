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
#include "xroads/detector/layers.h"

#include <algorithm>
#include <stdexcept>

namespace xroads::layers {

namespace {

struct ConvGeometry {
  int pad, out_rows, out_cols;
};

ConvGeometry Geometry(const Tensor& in, int kernel, int stride) {
  const int pad = kernel / 2;
  const int rows = (in.rows + 2 * pad - kernel) / stride + 1;
  const int cols = (in.cols + 2 * pad - kernel) / stride + 1;
  if (rows < 1 || cols < 1) throw std::invalid_argument("convolution input too small");
  return {pad, rows, cols};
}

// Range of output columns whose tap kx lands inside the input row.
std::pair<int, int> ValidRange(int offset, int stride, int in_size, int out_size) {
  // index = o * stride + offset must lie in [0, in_size).
  int lo = offset >= 0 ? 0 : (-offset + stride - 1) / stride;
  int hi = (in_size - 1 - offset) < 0 ? 0 : (in_size - 1 - offset) / stride + 1;
  return {lo, std::min(hi, out_size)};
}

}  // namespace

Tensor Conv2dForward(const Tensor& in, std::span<const double> weights, std::span<const double> bias,
                     int out_channels, int kernel, int stride) {
  const ConvGeometry g = Geometry(in, kernel, stride);
  Tensor out(out_channels, g.out_rows, g.out_cols);
  const int ksq = kernel * kernel;
  for (int o = 0; o < out_channels; ++o) {
    double* out_plane = &out.values[out.index(o, 0, 0)];
    std::fill(out_plane, out_plane + static_cast<std::size_t>(g.out_rows) * g.out_cols, bias[o]);
    for (int i = 0; i < in.channels; ++i) {
      const double* w = &weights[(static_cast<std::size_t>(o) * in.channels + i) * ksq];
      for (int ky = 0; ky < kernel; ++ky) {
        const auto [oy_lo, oy_hi] = ValidRange(ky - g.pad, stride, in.rows, g.out_rows);
        for (int kx = 0; kx < kernel; ++kx) {
          const double wv = w[ky * kernel + kx];
          if (wv == 0.0) continue;
          const auto [ox_lo, ox_hi] = ValidRange(kx - g.pad, stride, in.cols, g.out_cols);
          for (int oy = oy_lo; oy < oy_hi; ++oy) {
            const double* in_row = &in.values[in.index(i, oy * stride + ky - g.pad, 0)];
            double* out_row = out_plane + static_cast<std::size_t>(oy) * g.out_cols;
            if (stride == 1) {
              const double* src = in_row + (kx - g.pad);
              for (int ox = ox_lo; ox < ox_hi; ++ox) out_row[ox] += wv * src[ox];
            } else {
              for (int ox = ox_lo; ox < ox_hi; ++ox) out_row[ox] += wv * in_row[ox * stride + kx - g.pad];
            }
          }
        }
      }
    }
  }
  return out;
}

Tensor Conv2dBackward(const Tensor& in, const Tensor& grad_out, std::span<const double> weights,
                      std::span<double> grad_weights, std::span<double> grad_bias, int kernel,
                      int stride, bool want_input_grad) {
  const ConvGeometry g = Geometry(in, kernel, stride);
  Tensor grad_in;
  if (want_input_grad) grad_in = Tensor(in.channels, in.rows, in.cols);
  const int ksq = kernel * kernel;
  const int out_channels = grad_out.channels;
  for (int o = 0; o < out_channels; ++o) {
    const double* g_plane = &grad_out.values[grad_out.index(o, 0, 0)];
    double bsum = 0;
    for (std::size_t k = 0; k < static_cast<std::size_t>(g.out_rows) * g.out_cols; ++k) bsum += g_plane[k];
    grad_bias[o] += bsum;
    for (int i = 0; i < in.channels; ++i) {
      const std::size_t wbase = (static_cast<std::size_t>(o) * in.channels + i) * ksq;
      for (int ky = 0; ky < kernel; ++ky) {
        const auto [oy_lo, oy_hi] = ValidRange(ky - g.pad, stride, in.rows, g.out_rows);
        for (int kx = 0; kx < kernel; ++kx) {
          const double wv = weights[wbase + ky * kernel + kx];
          const auto [ox_lo, ox_hi] = ValidRange(kx - g.pad, stride, in.cols, g.out_cols);
          double gw = 0;
          for (int oy = oy_lo; oy < oy_hi; ++oy) {
            const int iy = oy * stride + ky - g.pad;
            const double* in_row = &in.values[in.index(i, iy, 0)];
            const double* g_row = g_plane + static_cast<std::size_t>(oy) * g.out_cols;
            if (stride == 1) {
              const double* src = in_row + (kx - g.pad);
              for (int ox = ox_lo; ox < ox_hi; ++ox) gw += g_row[ox] * src[ox];
              if (want_input_grad) {
                double* dst = &grad_in.values[grad_in.index(i, iy, 0)] + (kx - g.pad);
                for (int ox = ox_lo; ox < ox_hi; ++ox) dst[ox] += wv * g_row[ox];
              }
            } else {
              for (int ox = ox_lo; ox < ox_hi; ++ox) gw += g_row[ox] * in_row[ox * stride + kx - g.pad];
              if (want_input_grad) {
                double* dst = &grad_in.values[grad_in.index(i, iy, 0)];
                for (int ox = ox_lo; ox < ox_hi; ++ox) dst[ox * stride + kx - g.pad] += wv * g_row[ox];
              }
            }
          }
          grad_weights[wbase + ky * kernel + kx] += gw;
        }
      }
    }
  }
  return grad_in;
}

Tensor ReluForward(const Tensor& in) {
  Tensor out = in;
  for (double& v : out.values) v = v > 0 ? v : 0.0;
  return out;
}

Tensor ReluBackward(const Tensor& out, const Tensor& grad_out) {
  Tensor grad = grad_out;
  for (std::size_t i = 0; i < grad.values.size(); ++i) {
    if (!(out.values[i] > 0)) grad.values[i] = 0.0;
  }
  return grad;
}

Tensor MaxPoolForward(const Tensor& in, std::vector<std::size_t>& argmax) {
  const int rows = in.rows / 2, cols = in.cols / 2;
  if (rows < 1 || cols < 1) throw std::invalid_argument("max-pool input too small");
  Tensor out(in.channels, rows, cols);
  argmax.assign(out.size(), 0);
  for (int c = 0; c < in.channels; ++c) {
    for (int r = 0; r < rows; ++r) {
      for (int w = 0; w < cols; ++w) {
        std::size_t best = in.index(c, 2 * r, 2 * w);
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const std::size_t idx = in.index(c, 2 * r + dy, 2 * w + dx);
            if (in.values[idx] > in.values[best]) best = idx;
          }
        }
        const std::size_t o = out.index(c, r, w);
        out.values[o] = in.values[best];
        argmax[o] = best;
      }
    }
  }
  return out;
}

Tensor MaxPoolBackward(const Tensor& in_shape, const Tensor& grad_out,
                       const std::vector<std::size_t>& argmax) {
  Tensor grad(in_shape.channels, in_shape.rows, in_shape.cols);
  for (std::size_t o = 0; o < grad_out.values.size(); ++o) grad.values[argmax[o]] += grad_out.values[o];
  return grad;
}

std::vector<double> DenseForward(std::span<const double> x, std::span<const double> weights,
                                 std::span<const double> bias, int out) {
  std::vector<double> y(static_cast<std::size_t>(out));
  const std::size_t n = x.size();
  for (int o = 0; o < out; ++o) {
    const double* w = &weights[static_cast<std::size_t>(o) * n];
    double acc = bias[o];
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * x[i];
    y[o] = acc;
  }
  return y;
}

std::vector<double> DenseBackward(std::span<const double> x, std::span<const double> grad_out,
                                  std::span<const double> weights, std::span<double> grad_weights,
                                  std::span<double> grad_bias) {
  const std::size_t n = x.size();
  std::vector<double> grad_x(n, 0.0);
  for (std::size_t o = 0; o < grad_out.size(); ++o) {
    const double g = grad_out[o];
    if (g == 0.0) continue;
    grad_bias[o] += g;
    const double* w = &weights[o * n];
    double* gw = &grad_weights[o * n];
    for (std::size_t i = 0; i < n; ++i) {
      gw[i] += g * x[i];
      grad_x[i] += g * w[i];
    }
  }
  return grad_x;
}

}  // namespace xroads::layers
