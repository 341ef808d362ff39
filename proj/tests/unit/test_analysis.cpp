// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <utility>
#include <vector>

#include "doctest.h"

#include "aht/analysis.hpp"
#include "aht/error.hpp"

using namespace aht;

namespace {

const DistributionSpec kF = DistributionSpec::exponential(0.5);
const DistributionSpec kG = DistributionSpec::exponential(10.0);

// Independent oracles in long double.
long double kl_exp(long double a, long double b) { return std::log(a / b) + b / a - 1.0L; }
long double kl_geom(long double a, long double b) {
  return std::log(a / b) + (1.0L - a) / a * (std::log(1.0L - a) - std::log(1.0L - b));
}

}  // namespace

TEST_CASE("KL of a law with itself") {
  for (const auto& p : {kF, kG, DistributionSpec::geometric(0.3), DistributionSpec::tabulated({0.25, 0.75})}) {
    CHECK(kl_divergence(p, p).value == 0.0);
  }
  CHECK(kl_numeric(kF, kF).value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("exponential KL closed form and quadrature") {
  const double oracle = static_cast<double>(kl_exp(10.0L, 0.5L));
  CHECK(*kl_closed_form(kG, kF) == doctest::Approx(oracle).epsilon(1e-15));
  CHECK(oracle == doctest::Approx(2.04573).epsilon(5e-6));
  const KlResult q = kl_numeric(kG, kF);
  CHECK(std::abs(q.value - oracle) < 1e-8);
  CHECK(q.abs_error <= 1e-8);
  const KlResult r = kl_numeric(kF, kG);
  CHECK(std::abs(r.value - static_cast<double>(kl_exp(0.5L, 10.0L))) < 1e-8);
}

TEST_CASE("geometric KL closed form and summation") {
  const auto p = DistributionSpec::geometric(0.5);
  const auto q = DistributionSpec::geometric(0.8);
  const double oracle = static_cast<double>(kl_geom(0.5L, 0.8L));
  CHECK(*kl_closed_form(p, q) == doctest::Approx(oracle).epsilon(1e-15));
  CHECK(oracle == doctest::Approx(0.44629).epsilon(1e-5));
  CHECK(std::abs(kl_numeric(p, q).value - oracle) < 1e-10);
  CHECK(std::abs(kl_numeric(q, p).value - static_cast<double>(kl_geom(0.8L, 0.5L))) < 1e-10);
}

TEST_CASE("tabulated KL by direct summation") {
  const auto p = DistributionSpec::tabulated({0.1, 0.2, 0.7});
  const auto q = DistributionSpec::tabulated({0.3, 0.3, 0.4});
  const double oracle = 0.1 * std::log(0.1 / 0.3) + 0.2 * std::log(0.2 / 0.3) + 0.7 * std::log(0.7 / 0.4);
  CHECK(kl_divergence(p, q).value == doctest::Approx(oracle).epsilon(1e-14));
  CHECK_FALSE(kl_closed_form(p, q).has_value());

  const auto hole = DistributionSpec::tabulated({0.5, 0.0, 0.5});
  const KlResult v = kl_divergence(p, hole);
  CHECK(v.support_violation);
  CHECK(std::isinf(v.value));
  CHECK_FALSE(kl_divergence(hole, p).support_violation);
}

TEST_CASE("KL across sample spaces is rejected") {
  CHECK_THROWS_AS(kl_numeric(kF, DistributionSpec::geometric(0.5)), DomainError);
  CHECK_FALSE(kl_closed_form(kF, DistributionSpec::geometric(0.5)).has_value());
}

TEST_CASE("per-level rate") {
  CHECK(rate_I_d(kF, kG, 1.0, 10, 2) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rate_I_d(kF, kG, 0.3, 10, 1) ==
        doctest::Approx(kl_divergence(Mixture::two_point(0.3, kF, kG), kF).value).epsilon(1e-15));
  const double oracle = static_cast<double>(kl_exp(10.0L, 0.5L) + kl_exp(0.5L, 10.0L) / 9.0L);
  const double got = rate_I_d(kF, kG, 0.0, 10, 2);
  CHECK(std::abs(got - oracle) < 1e-12);
  // Quoted to five decimals; the exact value is 3.8239842...
  CHECK(got == doctest::Approx(3.82399).epsilon(2e-6));
  CHECK_THROWS_AS(rate_I_d(kF, kG, 0.5, 1, 1), DomainError);
  CHECK_THROWS_AS(rate_I_d(kF, kG, 0.5, 4, 5), DomainError);
}

TEST_CASE("palette rate and its predictions") {
  const auto one = rate_I_star(kF, kG, {{0.2}, {1.0}}, 5, 2);
  CHECK(one.I_star == doctest::Approx(rate_I_d(kF, kG, 0.2, 5, 2)));
  const auto same = rate_I_star(kF, kG, {{0.4, 0.4, 0.4}, {0.2, 0.3, 0.5}}, 5, 2);
  CHECK(same.I_star == doctest::Approx(rate_I_d(kF, kG, 0.4, 5, 2)).epsilon(1e-14));

  const auto r = rate_I_star(kF, kG, {{0.0, 1.0}, {0.5, 0.5}}, 10, 2);
  const double oracle = 0.5 * static_cast<double>(kl_exp(10.0L, 0.5L) + kl_exp(0.5L, 10.0L) / 9.0L);
  CHECK(std::abs(r.I_star - oracle) < 1e-12);
  CHECK(r.I_star == doctest::Approx(1.91200).epsilon(1e-5));
  const double c = std::exp(-10.0);
  CHECK(r.predicted_delay(c) == doctest::Approx(10.0 / r.I_star));
  CHECK(r.predicted_risk(c) == doctest::Approx(10.0 * c / r.I_star));
}

TEST_CASE("mixture KL inequality") {
  SUBCASE("worked example is strict, and both routes agree") {
    const std::vector<std::pair<double, Mixture>> parts{{0.5, Mixture(kG)}, {0.5, Mixture(kF)}};
    const auto r = verify_mixture_kl_inequality(kF, parts);
    CHECK(r.slack > 0.0);
    CHECK(r.holds(1e-6));
    CHECK(std::abs(r.slack - r.posterior_term) < 1e-8);
    // lhs = 0.5 D(g||f) + 0.5 * 0.
    CHECK(r.lhs == doctest::Approx(0.5 * static_cast<double>(kl_exp(10.0L, 0.5L))).epsilon(1e-14));
  }
  SUBCASE("single component has zero slack") {
    const std::vector<std::pair<double, Mixture>> parts{{1.0, Mixture::two_point(0.3, kF, kG)}};
    CHECK(std::abs(verify_mixture_kl_inequality(kF, parts).slack) < 1e-10);
  }
  SUBCASE("identical components have zero slack") {
    const Mixture m = Mixture::two_point(0.6, kF, kG);
    const std::vector<std::pair<double, Mixture>> parts{{0.2, m}, {0.3, m}, {0.5, m}};
    const auto r = verify_mixture_kl_inequality(kF, parts);
    CHECK(std::abs(r.slack) < 1e-10);
    CHECK(std::abs(r.posterior_term) < 1e-10);
  }
  SUBCASE("geometric components") {
    const auto f = DistributionSpec::geometric(0.8);
    const auto g = DistributionSpec::geometric(0.3);
    const std::vector<std::pair<double, Mixture>> parts{{0.4, Mixture::two_point(0.1, f, g)},
                                                        {0.6, Mixture::two_point(0.9, f, g)}};
    const auto r = verify_mixture_kl_inequality(f, parts);
    CHECK(r.slack > 0.0);
    CHECK(std::abs(r.slack - r.posterior_term) < 1e-9);
  }
  SUBCASE("weights must be a probability vector") {
    const std::vector<std::pair<double, Mixture>> parts{{0.5, Mixture(kG)}, {0.6, Mixture(kF)}};
    CHECK_THROWS_AS(verify_mixture_kl_inequality(kF, parts), DomainError);
    CHECK_THROWS_AS(verify_mixture_kl_inequality(kF, {}), DomainError);
  }
}

TEST_CASE("rate gap between ADHM and the i.i.d. view") {
  CHECK(theorem2_gap(kF, kG, {{0.3}, {1.0}}, 10, 2).gap == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(theorem2_gap(kF, kG, {{0.7, 0.7}, {0.5, 0.5}}, 10, 2).gap) < 1e-12);
  const auto r = theorem2_gap(kF, kG, {{0.0, 1.0}, {0.5, 0.5}}, 10, 2);
  CHECK(r.gap > 0.0);
  CHECK(r.I_chernoff == doctest::Approx(rate_I_d(kF, kG, 0.5, 10, 2)));
  CHECK(r.I_adhm == doctest::Approx(1.911992).epsilon(1e-6));
  // Frozen after the analysis above: the state-revealing palette of the
  // oracle preset.
  const auto o = theorem2_gap(kF, kG, {{0.2, 0.8}, {0.5, 0.5}}, 5, 2);
  CHECK(o.I_adhm == doctest::Approx(0.85098227).epsilon(1e-7));
  CHECK(o.gap == doctest::Approx(0.18094).epsilon(1e-4));
}
