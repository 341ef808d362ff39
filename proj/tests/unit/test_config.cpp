// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <string>

#include "doctest.h"

#include "aht/config.hpp"
#include "aht/error.hpp"

using namespace aht;

namespace {

constexpr const char* kMinimal = R"({
  // comment
  "cells": 4, "probes": 2, /* inline */
  "normal": {"family": "exponential", "rate": 1},
  "abnormal": {"family": "exponential", "rate": 5},
  "hmm": {"alpha": 0.2, "beta": 0.3},
  "policies": [{"kind": "ADHM"}],
  "neg_log_c": [1, 2]
})";

std::vector<std::string> issue_paths(const std::string& text) {
  try {
    ConfigDocument::from_text(text).parse();
  } catch (const ConfigError& e) {
    std::vector<std::string> out;
    for (const auto& i : e.issues()) out.push_back(i.path);
    return out;
  }
  return {};
}

bool has(const std::vector<std::string>& xs, const std::string& x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}

std::string with(const std::string& key, const std::string& value) {
  auto doc = ConfigDocument::from_text(kMinimal);
  doc.set(key, value);
  return doc.dump();
}

}  // namespace

TEST_CASE("shipped presets") {
  CHECK(presets().size() >= 5);
  for (const auto& p : presets()) {
    CAPTURE(p.name);
    const auto cfg = ConfigDocument::from_preset(p.name).parse();
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.name == p.name);
  }
  const auto fig7 = ConfigDocument::from_preset("fig7_adhmp").parse();
  CHECK(fig7.cells == 5);
  CHECK(fig7.probes == 2);
  CHECK(fig7.model.hmm == HmmParams{0.1, 0.1});
  REQUIRE(fig7.policies.size() == 2);
  CHECK(fig7.policies[1].kind == PolicyKind::AdhmP);
  CHECK(fig7.policies[1].p_th == 0.7);

  const auto fig2 = ConfigDocument::from_preset("fig2").parse();
  CHECK(fig2.name == "fig2_exp");
  CHECK(fig2.cells == 10);
  CHECK(fig2.model.hmm == HmmParams{0.9, 0.9});
  CHECK(fig2.model.abnormal == DistributionSpec::exponential(10.0));
  CHECK(ConfigDocument::from_preset("fig2_exp_text").parse().model.normal == DistributionSpec::exponential(0.2));
  CHECK(find_preset("fig5_geom_text") != nullptr);
  CHECK(find_preset("fig5_geom_caption") != nullptr);
  CHECK(find_preset("nope") == nullptr);
  CHECK_THROWS_AS(ConfigDocument::from_preset("nope"), ConfigError);
}

TEST_CASE("resolve accepts preset paths") {
  CHECK(ConfigDocument::resolve("presets/fig2").parse().name == "fig2_exp");
  CHECK(ConfigDocument::resolve("fig7_adhmp.jsonc").parse().name == "fig7_adhmp");
  CHECK_THROWS_AS(ConfigDocument::resolve("/missing/dir/none.jsonc"), ConfigError);
}

TEST_CASE("annotated example parses") {
  const auto cfg = ConfigDocument::from_file(AHT_SOURCE_DIR "/presets/annotated_example.jsonc").parse();
  CHECK(cfg.policies.size() == 4);
  CHECK(cfg.verify.oracle_neg_log_c == 25.0);
}

TEST_CASE("minimal config with comments and defaults") {
  const auto cfg = ConfigDocument::from_text(kMinimal).parse();
  CHECK(cfg.cells == 4);
  CHECK(cfg.policies[0].label == "ADHM");
  CHECK(cfg.policies[0].belief_source == BeliefSource::PerCell);
  CHECK(cfg.trials == 10000);
  CHECK(cfg.model.mode() == WorldMode::Hmm);
}

TEST_CASE("dotted overrides") {
  auto doc = ConfigDocument::from_text(kMinimal);
  doc.set("trials=10");
  doc.set("policies.0.label=first");
  doc.set("hmm.alpha", "0.5");
  const auto cfg = doc.parse();
  CHECK(cfg.trials == 10);
  CHECK(cfg.policies[0].label == "first");
  CHECK(cfg.model.hmm.alpha == 0.5);
  CHECK_THROWS_AS(doc.set("novalue"), ConfigError);
  CHECK_THROWS_AS(doc.set("a..b=1"), ConfigError);
}

TEST_CASE("cost grid given as costs") {
  std::string text = kMinimal;
  text.replace(text.find("\"neg_log_c\": [1, 2]"), 20, "\"c_grid\": [0.1, 0.001]");
  const auto cfg = ConfigDocument::from_text(text).parse();
  REQUIRE(cfg.neg_log_c.size() == 2);
  CHECK(cfg.neg_log_c[0] == doctest::Approx(std::log(10.0)));
  CHECK(cfg.neg_log_c[1] == doctest::Approx(std::log(1000.0)));
  CHECK(has(issue_paths(with("c_grid", "[0.1]")), "c_grid"));
  CHECK(has(issue_paths(with("neg_log_c", "null")), "neg_log_c"));
}

TEST_CASE("validation names every bad field") {
  CHECK(has(issue_paths(with("cells", "1")), "cells"));
  CHECK(has(issue_paths(with("probes", "5")), "probes"));
  CHECK(has(issue_paths(with("hmm.alpha", "0")), "hmm.alpha"));
  CHECK(has(issue_paths(with("hmm.beta", "1")), "hmm.beta"));
  CHECK(has(issue_paths(with("normal.rate", "-1")), "normal"));
  CHECK(has(issue_paths(with("normal.family", "\"cauchy\"")), "normal.family"));
  CHECK(has(issue_paths(with("abnormal", R"({"family":"geometric","success":0.5})")), "abnormal"));
  CHECK(has(issue_paths(with("neg_log_c", "[2, 1]")), "neg_log_c.1"));
  CHECK(has(issue_paths(with("neg_log_c", "[0]")), "neg_log_c.0"));
  CHECK(has(issue_paths(with("trials", "0")), "trials"));
  CHECK(has(issue_paths(with("trials", "-3")), "trials"));
  CHECK(has(issue_paths(with("surprise", "1")), "surprise"));
  CHECK(has(issue_paths(with("policies.0.kind", "\"Greedy\"")), "policies.0.kind"));
  CHECK(has(issue_paths(with("policies.0.p_th", "2")), "policies.0.p_th"));
  CHECK(has(issue_paths(with("policies", R"([{"kind":"ADHM"},{"kind":"ADHM"}])")), "policies.1.label"));
  CHECK(has(issue_paths(with("policies", R"([{"kind":"ADHM-Oracle"}])")), "policies.0.kind"));
  CHECK(has(issue_paths(with("world", R"({"mode":"oracle","levels":[0.1],"weights":[0.5]})")), "world"));
  CHECK(has(issue_paths(with("verify.tol", "\"x\"")), "verify.tol"));

  // Several problems are reported together.
  auto doc = ConfigDocument::from_text(kMinimal);
  doc.set("cells=1");
  doc.set("trials=0");
  const auto paths = issue_paths(doc.dump());
  CHECK(has(paths, "cells"));
  CHECK(has(paths, "trials"));
}

TEST_CASE("malformed text names its origin") {
  try {
    ConfigDocument::from_text("{ \"cells\": ", "broken.jsonc");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("broken.jsonc") != std::string::npos);
  }
}

TEST_CASE("serialization round trip") {
  for (const auto& p : presets()) {
    CAPTURE(p.name);
    const auto a = ConfigDocument::from_preset(p.name).parse();
    const auto b = parse_config(to_json(a));
    CHECK(to_json(b) == to_json(a));
  }
}

TEST_CASE("policy config per cost") {
  const auto cfg = ConfigDocument::from_preset("fig7_adhmp").parse();
  const auto pc = cfg.policy_config(1, 0.01);
  CHECK(pc.kind == PolicyKind::AdhmP);
  CHECK(pc.cells == 5);
  CHECK(pc.cost == 0.01);
  CHECK(pc.threshold() == doctest::Approx(-std::log(0.01)));
}
