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
#include "xroads/student_t.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace xroads {

namespace {

// Past this many degrees of freedom the normal limit is used.
constexpr double kNormalLimitDf = 1e7;

double BetaContinuedFraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1, qam = a - 1;
  double c = 1;
  double d = 1 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1) < kEps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

// I_x(a, b) given both x and y = 1 - x, so callers can pass a y that was
// computed without cancellation.
double IncompleteBeta(double a, double b, double x, double y) {
  if (x <= 0) return 0;
  if (y <= 0) return 1;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log(y);
  if (x < (a + 1) / (a + b + 2)) {
    return std::exp(log_front) * BetaContinuedFraction(a, b, x) / a;
  }
  return 1 - std::exp(log_front) * BetaContinuedFraction(b, a, y) / b;
}

// P(|T| > |t|).
double TwoSidedTail(double t, double df) {
  if (std::isinf(t)) return 0;
  if (df >= kNormalLimitDf) return std::erfc(std::abs(t) / std::numbers::sqrt2);
  const double t2 = t * t;
  const double x = df / (df + t2);
  const double y = t2 / (df + t2);
  return IncompleteBeta(df / 2, 0.5, x, y);
}

double StudentTPdf(double t, double df) {
  if (df >= kNormalLimitDf) return std::exp(-t * t / 2) / std::sqrt(2 * std::numbers::pi);
  const double log_norm = std::lgamma((df + 1) / 2) - std::lgamma(df / 2) -
                          0.5 * std::log(df * std::numbers::pi);
  return std::exp(log_norm - (df + 1) / 2 * std::log1p(t * t / df));
}

}  // namespace

double RegularizedIncompleteBeta(double a, double b, double x) {
  if (!(a > 0 && b > 0)) throw std::invalid_argument("incomplete beta needs a, b > 0");
  if (!(x >= 0 && x <= 1)) throw std::invalid_argument("incomplete beta needs x in [0, 1]");
  return IncompleteBeta(a, b, x, 1 - x);
}

double StudentTCdf(double t, double df) {
  if (!(df > 0)) throw std::invalid_argument("student t needs df > 0");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  const double half_tail = TwoSidedTail(t, df) / 2;
  return t > 0 ? 1 - half_tail : half_tail;
}

double StudentTTwoSidedPValue(double t, double df) {
  if (!(df > 0)) throw std::invalid_argument("student t needs df > 0");
  return std::min(1.0, TwoSidedTail(t, df));
}

double StudentTQuantile(double p, double df) {
  if (!(p > 0 && p < 1)) throw std::invalid_argument("quantile needs p in (0, 1)");
  if (!(df > 0)) throw std::invalid_argument("student t needs df > 0");
  if (p == 0.5) return 0;
  // Bracket, then Newton steps that fall back to bisection when they leave
  // the bracket.
  double lo = -1, hi = 1;
  while (StudentTCdf(lo, df) > p) lo *= 2;
  while (StudentTCdf(hi, df) < p) hi *= 2;
  double t = (lo + hi) / 2;
  for (int i = 0; i < 200; ++i) {
    const double f = StudentTCdf(t, df) - p;
    if (f == 0) return t;
    if (f < 0) lo = t; else hi = t;
    const double pdf = StudentTPdf(t, df);
    double next = pdf > 0 ? t - f / pdf : (lo + hi) / 2;
    if (!(next > lo && next < hi)) next = (lo + hi) / 2;
    if (std::abs(next - t) <= 1e-14 * std::max(1.0, std::abs(t))) return next;
    t = next;
  }
  return t;
}

}  // namespace xroads
