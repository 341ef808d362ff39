// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "aht/world.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "aht/error.hpp"

namespace aht {

namespace {

// Stream tags keep the draws of different roles independent.
enum Stream : std::uint64_t {
  kTarget = 1,
  kInitialState = 2,
  kTransition = 3,
  kObservation = 4,
  kOracle = 5,
};

}  // namespace

World::World(const ObservationModel& model, std::size_t cells, std::uint64_t seed)
    : World(model, cells,
            [&] {
              if (cells == 0) throw ContractViolation("world needs at least one cell");
              SplitMix64 gen(derive_seed({seed, kTarget}));
              return static_cast<std::size_t>(uniform_index(gen, cells));
            }(),
            seed) {}

World::World(const ObservationModel& model, std::size_t cells, std::size_t anomalous_cell, std::uint64_t seed)
    : model_(&model), cells_(cells), anomalous_(anomalous_cell), seed_(seed) {
  if (anomalous_cell >= cells) {
    throw ContractViolation(fmt::format("anomalous cell {} out of range for {} cells", anomalous_cell, cells));
  }
  SplitMix64 gen(derive_seed({seed, kInitialState}));
  state_ = bernoulli(gen, stationary_p0(model.hmm)) ? HiddenState::Normal : HiddenState::Abnormal;
  draw_component();
}

std::vector<Observation> World::observe(std::span<const std::size_t> probed) {
  if (probed.empty()) throw ContractViolation("probe set must not be empty");
  std::vector<Observation> out;
  out.reserve(probed.size());
  for (std::size_t cell : probed) {
    if (cell >= cells_) throw ContractViolation(fmt::format("probed cell {} out of range", cell));
    if (std::any_of(out.begin(), out.end(), [&](const Observation& o) { return o.cell == cell; })) {
      throw ContractViolation(fmt::format("cell {} probed twice in one step", cell));
    }
    out.push_back({cell, draw(cell)});
  }
  advance();
  return out;
}

void World::idle() { advance(); }

double World::draw(std::size_t cell) const {
  SplitMix64 gen(derive_seed({seed_, kObservation, cell, time_}));
  if (cell != anomalous_) return model_->normal.sample(gen);
  if (component_) {
    const double level = model_->oracle->levels[*component_];
    return Mixture::two_point(level, model_->normal, model_->abnormal).sample(gen);
  }
  return state_ == HiddenState::Normal ? model_->normal.sample(gen) : model_->abnormal.sample(gen);
}

void World::advance() {
  SplitMix64 gen(derive_seed({seed_, kTransition, time_}));
  state_ = hmm_step(model_->hmm, state_, gen);
  ++time_;
  draw_component();
}

void World::draw_component() {
  if (!model_->oracle) return;
  SplitMix64 gen(derive_seed({seed_, kOracle, time_}));
  component_ = oracle_world_step(*model_->oracle, model_->normal, model_->abnormal, gen).first;
}

}  // namespace aht
