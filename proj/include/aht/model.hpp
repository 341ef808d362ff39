// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "aht/distribution.hpp"
#include "aht/hmm.hpp"
#include "aht/rng.hpp"

namespace aht {

/// Discrete set of belief values P_d that the oracle reveals, with the
/// stationary frequency of each.
struct OraclePalette {
  std::vector<double> levels;
  std::vector<double> weights;

  /// Throws DomainError unless sizes match, every level is in [0,1] and the
  /// weights are a probability vector (sum within 1e-12).
  void validate() const;
  std::size_t size() const noexcept { return levels.size(); }
  /// sum_d weights_d * levels_d
  double mean_level() const;

  bool operator==(const OraclePalette&) const = default;
};

/// Draw d ~ weights. Returns the drawn index and the law of the anomalous
/// observation at that step, levels_d * f + (1 - levels_d) * g.
template <std::uniform_random_bit_generator G>
std::pair<std::size_t, Mixture> oracle_world_step(const OraclePalette& palette, const DistributionSpec& f,
                                                  const DistributionSpec& g, G& gen) {
  double u = unit_uniform(gen);
  std::size_t d = palette.size() - 1;
  for (std::size_t i = 0; i < palette.size(); ++i) {
    if (u < palette.weights[i]) {
      d = i;
      break;
    }
    u -= palette.weights[i];
  }
  // Never land on a zero-weight tail entry through rounding.
  while (palette.weights[d] == 0.0 && d > 0) --d;
  return {d, Mixture::two_point(palette.levels[d], f, g)};
}

/// Palette the forward filter would visit if every observation revealed the
/// hidden state: level beta (state 1 seen) with weight alpha/(alpha+beta),
/// level 1-alpha (state 0 seen) with weight beta/(alpha+beta).
OraclePalette state_revealing_palette(const HmmParams& params);

enum class WorldMode { Hmm, Oracle };

/// Everything the simulator and the policies know about how observations
/// are generated.
struct ObservationModel {
  DistributionSpec normal;
  DistributionSpec abnormal;
  HmmParams hmm;
  std::optional<OraclePalette> oracle;

  WorldMode mode() const noexcept { return oracle ? WorldMode::Oracle : WorldMode::Hmm; }

  /// Probability that an anomalous observation comes from the normal law,
  /// averaged over time: beta/(alpha+beta) for the HMM world, the palette
  /// mean in oracle mode.
  double marginal_p0() const;

  /// Throws DomainError on invalid HMM params, mixed sample spaces or an
  /// invalid palette.
  void validate() const;
};

}  // namespace aht
