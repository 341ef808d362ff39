// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "aht/distribution.hpp"
#include "aht/model.hpp"

namespace aht {

struct KlResult {
  double value = 0.0;
  /// Estimated absolute error; 0 for closed forms.
  double abs_error = 0.0;
  /// p puts mass where q has none; value is +inf.
  bool support_violation = false;
};

/// Closed form D(p||q) for Exponential/Exponential and Geometric/Geometric
/// pairs; empty for any other pair.
std::optional<double> kl_closed_form(const DistributionSpec& p, const DistributionSpec& q);

/// D(p||q) by adaptive Gauss-Kronrod quadrature (continuous) or truncated
/// summation (discrete), ignoring any closed form. Throws NumericError when
/// the error estimate exceeds 1e-8 and DomainError on mixed sample spaces.
KlResult kl_numeric(const Mixture& p, const Mixture& q);

/// Closed form when both sides are single laws of a supported pair,
/// otherwise kl_numeric.
KlResult kl_divergence(const Mixture& p, const Mixture& q);

/// D(g~||f) + (K-1)/(M-1) * D(f||g~) with g~ = level * f + (1 - level) * g.
double rate_I_d(const DistributionSpec& f, const DistributionSpec& g, double level, std::size_t cells,
                std::size_t probes);

struct RateReport {
  std::vector<double> I_d;
  double I_star = 0.0;

  /// -log(c) / I*
  double predicted_delay(double cost) const;
  /// -c log(c) / I*
  double predicted_risk(double cost) const;
};

RateReport rate_I_star(const DistributionSpec& f, const DistributionSpec& g, const OraclePalette& palette,
                       std::size_t cells, std::size_t probes);

struct MixtureKlReport {
  /// sum_d w_d D(g_d||f)
  double lhs = 0.0;
  /// D(sum_d w_d g_d || f)
  double rhs = 0.0;
  /// lhs - rhs
  double slack = 0.0;
  /// sum_d w_d D(g_d || gbar): the closed expression for the slack,
  /// computed independently.
  double posterior_term = 0.0;
  double abs_error = 0.0;

  bool holds(double tol) const { return slack >= -tol; }
};

/// Both sides of sum_d w_d D(g_d||f) >= D(sum_d w_d g_d || f). Weights must
/// sum to 1 within 1e-12.
MixtureKlReport verify_mixture_kl_inequality(const DistributionSpec& f,
                                             std::span<const std::pair<double, Mixture>> components);

struct Theorem2Report {
  double I_adhm = 0.0;
  /// Rate of the marginal mixture sum_d w_d g~_d taken as one i.i.d. law.
  double I_chernoff = 0.0;
  double gap = 0.0;
};

Theorem2Report theorem2_gap(const DistributionSpec& f, const DistributionSpec& g, const OraclePalette& palette,
                            std::size_t cells, std::size_t probes);

}  // namespace aht
