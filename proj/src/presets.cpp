// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <utility>

#include "aht/config.hpp"

namespace aht {

namespace {

constexpr std::string_view kFig2Exp = R"({
  "name": "fig2_exp",
  "cells": 10, "probes": 2,
  "normal":   {"family": "exponential", "rate": 0.5},
  "abnormal": {"family": "exponential", "rate": 10},
  "hmm": {"alpha": 0.9, "beta": 0.9},
  "policies": [{"kind": "ADHM"}, {"kind": "DGF"}, {"kind": "Chernoff"}],
  "neg_log_c": [1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20,21,22,23,24,25,26,27,28,29,30],
  "trials": 10000, "base_seed": 1, "horizon": 1000000,
  // Ten cells put a larger constant on top of the asymptotic delay.
  "verify": {"oracle_neg_log_c": 50}
})";

constexpr std::string_view kFig2ExpText = R"({
  "name": "fig2_exp_text",
  "cells": 10, "probes": 2,
  "normal":   {"family": "exponential", "rate": 0.2},
  "abnormal": {"family": "exponential", "rate": 10},
  "hmm": {"alpha": 0.9, "beta": 0.9},
  "policies": [{"kind": "ADHM"}, {"kind": "DGF"}, {"kind": "Chernoff"}],
  "neg_log_c": [1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20,21,22,23,24,25,26,27,28,29,30],
  "trials": 10000, "base_seed": 1, "horizon": 1000000,
  // Ten cells put a larger constant on top of the asymptotic delay.
  "verify": {"oracle_neg_log_c": 50}
})";

constexpr std::string_view kFig5GeomText = R"({
  "name": "fig5_geom_text",
  "cells": 10, "probes": 2,
  "normal":   {"family": "geometric", "success": 0.8},
  "abnormal": {"family": "geometric", "success": 0.5},
  "hmm": {"alpha": 0.9, "beta": 0.9},
  "policies": [{"kind": "ADHM"}, {"kind": "DGF"}, {"kind": "Chernoff"}],
  "neg_log_c": [1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20,21,22,23,24,25,26,27,28,29,30],
  "trials": 10000, "base_seed": 1, "horizon": 1000000,
  // Ten cells put a larger constant on top of the asymptotic delay.
  "verify": {"oracle_neg_log_c": 50}
})";

constexpr std::string_view kFig5GeomCaption = R"({
  "name": "fig5_geom_caption",
  "cells": 10, "probes": 5,
  "normal":   {"family": "geometric", "success": 0.1},
  "abnormal": {"family": "geometric", "success": 0.9},
  "hmm": {"alpha": 0.9, "beta": 0.9},
  "policies": [{"kind": "ADHM"}, {"kind": "DGF"}, {"kind": "Chernoff"}],
  "neg_log_c": [1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20,21,22,23,24,25,26,27,28,29,30],
  "trials": 10000, "base_seed": 1, "horizon": 1000000,
  // Ten cells put a larger constant on top of the asymptotic delay.
  "verify": {"oracle_neg_log_c": 50}
})";

constexpr std::string_view kFig7Adhmp = R"({
  "name": "fig7_adhmp",
  "cells": 5, "probes": 2,
  "normal":   {"family": "exponential", "rate": 0.5},
  "abnormal": {"family": "exponential", "rate": 10},
  "hmm": {"alpha": 0.1, "beta": 0.1},
  "policies": [{"kind": "ADHM"}, {"kind": "ADHM-P", "p_th": 0.7, "gamma": 1e-6}],
  "neg_log_c": [4,5,6,7,8,9,10,11,12],
  "trials": 10000, "base_seed": 1, "horizon": 1000000
})";

constexpr std::string_view kOracleExp = R"({
  "name": "oracle_exp",
  "cells": 5, "probes": 2,
  "normal":   {"family": "exponential", "rate": 0.5},
  "abnormal": {"family": "exponential", "rate": 10},
  "hmm": {"alpha": 0.2, "beta": 0.2},
  "world": {"mode": "oracle", "levels": [0.2, 0.8], "weights": [0.5, 0.5]},
  "policies": [{"kind": "ADHM-Oracle"}, {"kind": "DGF"}],
  "neg_log_c": [5, 10, 15, 20, 25],
  "trials": 1000, "base_seed": 1, "horizon": 1000000
})";

constexpr std::array<PresetInfo, 6> kPresets{{
    {"fig2_exp", "M=10 K=2, Exp(0.5) vs Exp(10), alpha=beta=0.9", kFig2Exp},
    {"fig2_exp_text", "M=10 K=2, Exp(0.2) vs Exp(10), alpha=beta=0.9",
     kFig2ExpText},
    {"fig5_geom_text", "M=10 K=2, Geom(0.8) vs Geom(0.5), alpha=beta=0.9", kFig5GeomText},
    {"fig5_geom_caption", "M=10 K=5, Geom(0.1) vs Geom(0.9), alpha=beta=0.9",
     kFig5GeomCaption},
    {"fig7_adhmp", "M=5 K=2, Exp(0.5) vs Exp(10), alpha=beta=0.1, ADHM vs ADHM-P with P_th=0.7", kFig7Adhmp},
    {"oracle_exp", "M=5 K=2, Exp(0.5) vs Exp(10), oracle world, palette {0.2, 0.8} (state-revealing for alpha=beta=0.2)", kOracleExp},
}};

constexpr std::array<std::pair<std::string_view, std::string_view>, 3> kAliases{{
    {"fig2", "fig2_exp"},
    {"fig7", "fig7_adhmp"},
    {"oracle", "oracle_exp"},
}};

}  // namespace

std::span<const PresetInfo> presets() noexcept { return kPresets; }

const PresetInfo* find_preset(std::string_view name) noexcept {
  for (const auto& [alias, target] : kAliases) {
    if (alias == name) name = target;
  }
  for (const auto& p : kPresets) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

}  // namespace aht
