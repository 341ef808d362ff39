// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "aht/model.hpp"

namespace aht {

struct Observation {
  std::size_t cell;
  double value;

  bool operator==(const Observation&) const = default;
};

/// Ground-truth simulator: one anomalous cell among `cells`, whose hidden
/// state advances once per time step whether or not it is probed.
///
/// Every random draw is keyed by (seed, stream, cell, time), so two policies
/// that probe the same cell at the same time see the same value. Cells are
/// indexed from 0.
class World {
 public:
  /// Draws the anomalous cell uniformly and its initial hidden state from
  /// the stationary law.
  World(const ObservationModel& model, std::size_t cells, std::uint64_t seed);

  /// Pin the anomalous cell (tests and replays).
  World(const ObservationModel& model, std::size_t cells, std::size_t anomalous_cell, std::uint64_t seed);

  std::size_t cells() const noexcept { return cells_; }
  std::size_t anomalous_cell() const noexcept { return anomalous_; }
  HiddenState hidden_state() const noexcept { return state_; }
  std::uint64_t time() const noexcept { return time_; }

  /// Oracle mode: palette index governing the current step. Empty in HMM
  /// mode.
  std::optional<std::size_t> revealed_component() const noexcept { return component_; }

  /// Observe the probed cells at the current time, then advance one step.
  /// Throws ContractViolation on an empty set, duplicates or out-of-range
  /// cells.
  std::vector<Observation> observe(std::span<const std::size_t> probed);

  /// Advance one step without observing.
  void idle();

 private:
  double draw(std::size_t cell) const;
  void advance();
  void draw_component();

  const ObservationModel* model_;
  std::size_t cells_;
  std::size_t anomalous_;
  std::uint64_t seed_;
  std::uint64_t time_ = 0;
  HiddenState state_ = HiddenState::Normal;
  std::optional<std::size_t> component_;
};

}  // namespace aht
