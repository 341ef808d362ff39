// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "aht/rng.hpp"

namespace aht {

enum class DistributionKind { Exponential, Geometric, Tabulated };

/// Continuous laws live on [0, inf); discrete laws on {0, 1, 2, ...}.
enum class SampleSpace { Continuous, Discrete };

/// A univariate observation law.
///
/// Geometric uses the failures-before-success convention: pmf
/// theta * (1 - theta)^k on k = 0, 1, 2, ...  Tabulated laws put
/// probs[k] on k = 0 .. probs.size() - 1.
class DistributionSpec {
 public:
  static DistributionSpec exponential(double rate);
  static DistributionSpec geometric(double success);
  static DistributionSpec tabulated(std::vector<double> probs);

  DistributionKind kind() const noexcept { return kind_; }
  SampleSpace space() const noexcept {
    return kind_ == DistributionKind::Exponential ? SampleSpace::Continuous : SampleSpace::Discrete;
  }
  /// Rate for Exponential, success probability for Geometric.
  double parameter() const noexcept { return param_; }
  std::span<const double> probabilities() const noexcept { return probs_; }

  /// True if y is a point of the sample space (not necessarily of positive mass).
  bool in_domain(double y) const noexcept;
  /// Density or pmf. Throws DomainError outside the sample space.
  double density(double y) const;
  /// log density; -inf where the density vanishes inside the sample space.
  double log_density(double y) const;
  double cdf(double y) const;
  double mean() const noexcept;
  /// Smallest point u with P(Y > u) <= tail.
  double upper_quantile(double tail) const;

  template <std::uniform_random_bit_generator G>
  double sample(G& gen) const;

  std::string describe() const;

  bool operator==(const DistributionSpec&) const = default;

 private:
  DistributionSpec(DistributionKind kind, double param, std::vector<double> probs)
      : kind_(kind), param_(param), probs_(std::move(probs)) {}

  double sample_tabulated(double u) const;

  DistributionKind kind_;
  double param_ = 0.0;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

/// r * f(y) + (1 - r) * g(y): the law of the anomalous process given that it
/// is in the normal state with probability r.
double mixture_density(double r, const DistributionSpec& f, const DistributionSpec& g, double y);

/// Finite mixture of laws drawn from one sample space. A plain
/// DistributionSpec converts to a one-component mixture.
class Mixture {
 public:
  struct Component {
    double weight;
    DistributionSpec law;
  };

  Mixture(const DistributionSpec& law);  // NOLINT(google-explicit-constructor)
  explicit Mixture(std::vector<Component> components);

  /// r * f + (1 - r) * g, dropping zero-weight terms.
  static Mixture two_point(double r, const DistributionSpec& f, const DistributionSpec& g);
  /// Flatten sum_d weight_d * parts_d into one mixture.
  static Mixture combine(std::span<const std::pair<double, Mixture>> parts);

  std::span<const Component> components() const noexcept { return components_; }
  SampleSpace space() const noexcept { return components_.front().law.space(); }
  bool is_single() const noexcept { return components_.size() == 1; }
  const DistributionSpec& single() const { return components_.front().law; }

  bool in_domain(double y) const noexcept { return components_.front().law.in_domain(y); }
  double density(double y) const;
  double log_density(double y) const;
  double upper_quantile(double tail) const;

  template <std::uniform_random_bit_generator G>
  double sample(G& gen) const {
    double u = unit_uniform(gen);
    for (const auto& c : components_) {
      if (u < c.weight) return c.law.sample(gen);
      u -= c.weight;
    }
    return components_.back().law.sample(gen);
  }

 private:
  std::vector<Component> components_;
};

template <std::uniform_random_bit_generator G>
double DistributionSpec::sample(G& gen) const {
  const double u = unit_uniform(gen);
  switch (kind_) {
    case DistributionKind::Exponential:
      return -std::log1p(-u) / param_;
    case DistributionKind::Geometric:
      // floor(log(1-u) / log(1-theta)) is Geom(theta) on {0,1,...}.
      return std::floor(std::log1p(-u) / std::log1p(-param_));
    case DistributionKind::Tabulated:
      return sample_tabulated(u);
  }
  return 0.0;
}

}  // namespace aht
