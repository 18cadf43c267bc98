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

#include "pate/special_functions.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "boost/math/special_functions/erf.hpp"

namespace pate {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sum of the asymptotic series for erfc(x) * x * sqrt(pi) * exp(x^2),
// truncated at its smallest term.
double AsymptoticErfcSeries(double x) {
  const double inv_two_x2 = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    const double next = -term * (2.0 * k - 1.0) * inv_two_x2;
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

double Erfc(double x) { return std::erfc(x); }

double LogErfc(double x) {
  if (std::isnan(x)) return x;
  if (x == kInf) return -kInf;
  if (x <= kLogErfcAsymptoticCutoff) return std::log(std::erfc(x));
  return -x * x - std::log(x) - 0.5 * std::log(std::numbers::pi) +
         std::log(AsymptoticErfcSeries(x));
}

double ErfcInv(double y) {
  if (std::isnan(y)) return y;
  if (y <= 0.0) return kInf;
  if (y >= 2.0) return -kInf;
  return boost::math::erfc_inv(y);
}

double Log1mExp(double x) {
  if (x >= 0.0) return x == 0.0 ? -kInf : std::numeric_limits<double>::quiet_NaN();
  // Split at -log(2) to keep both branches well conditioned.
  if (x > -std::numbers::ln2) return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

double LogAddExp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double LogSumExp(std::span<const double> values) {
  if (values.empty()) return -kInf;
  const double hi = *std::max_element(values.begin(), values.end());
  if (hi == -kInf) return -kInf;
  if (hi == kInf) return kInf;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

double LogNormalSf(double x) {
  return LogErfc(x / std::numbers::sqrt2) - std::numbers::ln2;
}

double NormalSf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

}  // namespace pate
