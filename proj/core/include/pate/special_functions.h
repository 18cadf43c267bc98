// Copyright 2026 The PATE Accounting Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PATE_SPECIAL_FUNCTIONS_H_
#define PATE_SPECIAL_FUNCTIONS_H_

#include <span>

namespace pate {

// Arguments above this use the asymptotic expansion in LogErfc. Below it
// std::erfc is accurate to a few ulp and does not underflow.
inline constexpr double kLogErfcAsymptoticCutoff = 26.0;

// Complementary error function.
double Erfc(double x);

// log(erfc(x)), finite for every finite x. For x > kLogErfcAsymptoticCutoff
// the continued asymptotic series
//   erfc(x) ~ exp(-x^2) / (x sqrt(pi)) * (1 - 1/(2x^2) + 3/(4x^4) - ...)
// is used, so the result stays accurate where erfc(x) underflows.
double LogErfc(double x);

// Inverse of erfc on [0, 2]. Returns +inf at 0 and -inf at 2.
double ErfcInv(double y);

// log(1 - exp(x)) for x <= 0, evaluated without cancellation.
double Log1mExp(double x);

// log(exp(a) + exp(b)).
double LogAddExp(double a, double b);

// log(sum_i exp(values[i])). Returns -inf for an empty span.
double LogSumExp(std::span<const double> values);

// log(Pr[N(0, 1) > x]).
double LogNormalSf(double x);

// Pr[N(0, 1) > x].
double NormalSf(double x);

}  // namespace pate

#endif  // PATE_SPECIAL_FUNCTIONS_H_
