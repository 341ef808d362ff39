// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

// Small statistical oracles shared by the Monte Carlo tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace aht::test {

/// Half width of a 3-sigma binomial band around p for n draws.
inline double binomial_3sigma(double p, std::size_t n) {
  return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

/// Kolmogorov-Smirnov statistic of `xs` against `cdf`.
template <typename Cdf>
double ks_statistic(std::vector<double> xs, Cdf&& cdf) {
  std::sort(xs.begin(), xs.end());
  const auto n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// KS critical value at the 0.1% level.
inline double ks_critical_001(std::size_t n) { return 1.95 / std::sqrt(static_cast<double>(n)); }

}  // namespace aht::test
