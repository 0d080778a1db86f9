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
#ifndef XROADS_STUDENT_T_H_
#define XROADS_STUDENT_T_H_

namespace xroads {

// Regularized incomplete beta I_x(a, b), evaluated with a modified-Lentz
// continued fraction.
double RegularizedIncompleteBeta(double a, double b, double x);

// Student-t distribution with df > 0 degrees of freedom.
double StudentTCdf(double t, double df);
double StudentTTwoSidedPValue(double t, double df);
// Inverse CDF for p in (0, 1), by bracketed Newton iteration on the CDF.
double StudentTQuantile(double p, double df);

}  // namespace xroads

#endif  // XROADS_STUDENT_T_H_
