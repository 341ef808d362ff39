// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "aht/rng.hpp"

namespace aht {

enum class HiddenState : std::uint8_t { Normal = 0, Abnormal = 1 };

/// Two-state chain with transition matrix
///   [1 - alpha, alpha]
///   [beta,  1 - beta ]
/// alpha: P(0 -> 1), beta: P(1 -> 0).
///
/// Configured models require 0 < alpha, beta < 1 (see validate()); the
/// recursions below accept the closed interval so degenerate chains can be
/// exercised directly.
struct HmmParams {
  double alpha = 0.5;
  double beta = 0.5;

  /// Throws DomainError unless 0 < alpha < 1 and 0 < beta < 1.
  void validate() const;

  bool operator==(const HmmParams&) const = default;
};

/// beta / (alpha + beta)
double stationary_p0(const HmmParams& params);

template <std::uniform_random_bit_generator G>
HiddenState hmm_step(const HmmParams& params, HiddenState state, G& gen) {
  if (state == HiddenState::Normal) {
    return bernoulli(gen, params.alpha) ? HiddenState::Abnormal : HiddenState::Normal;
  }
  return bernoulli(gen, params.beta) ? HiddenState::Normal : HiddenState::Abnormal;
}

}  // namespace aht
