// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "aht/model.hpp"

#include <cmath>

#include <fmt/format.h>

#include "aht/error.hpp"

namespace aht {

void HmmParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError(fmt::format("alpha must lie in (0,1), got {}", alpha));
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError(fmt::format("beta must lie in (0,1), got {}", beta));
}

double stationary_p0(const HmmParams& params) { return params.beta / (params.alpha + params.beta); }

void OraclePalette::validate() const {
  if (levels.empty()) throw DomainError("oracle palette needs at least one level");
  if (levels.size() != weights.size()) {
    throw DomainError(fmt::format("oracle palette has {} levels but {} weights", levels.size(), weights.size()));
  }
  double total = 0.0;
  for (std::size_t d = 0; d < levels.size(); ++d) {
    if (!(levels[d] >= 0.0 && levels[d] <= 1.0)) {
      throw DomainError(fmt::format("oracle level {} must lie in [0,1], got {}", d, levels[d]));
    }
    if (!(weights[d] >= 0.0 && weights[d] <= 1.0)) {
      throw DomainError(fmt::format("oracle weight {} must lie in [0,1], got {}", d, weights[d]));
    }
    total += weights[d];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError(fmt::format("oracle weights must sum to 1 (within 1e-12), got {:.17g}", total));
  }
}

double OraclePalette::mean_level() const {
  double m = 0.0;
  for (std::size_t d = 0; d < levels.size(); ++d) m += weights[d] * levels[d];
  return m;
}

OraclePalette state_revealing_palette(const HmmParams& params) {
  params.validate();
  const double p0 = stationary_p0(params);
  return OraclePalette{{params.beta, 1.0 - params.alpha}, {1.0 - p0, p0}};
}

double ObservationModel::marginal_p0() const {
  return oracle ? oracle->mean_level() : stationary_p0(hmm);
}

void ObservationModel::validate() const {
  hmm.validate();
  if (normal.space() != abnormal.space()) {
    throw DomainError("normal and abnormal laws must both be continuous or both be discrete");
  }
  if (oracle) oracle->validate();
}

}  // namespace aht
